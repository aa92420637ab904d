//! Variable-width histogram (VWH) EDA.
//!
//! Per dimension the model has `K` bins. The first and last bins run from
//! the search bounds to an adaptive edge placed half a gap beyond the two
//! most extreme population values; they carry a fixed weight of 0.1 (or 0
//! when empty-width). The `K - 2` interior bins tile the remaining span
//! uniformly and are weighted by occupancy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{Bounds, DecisionVector, Population};

const BOUNDARY_WEIGHT: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdaParams {
    /// Bins per dimension, including the two boundary bins.
    pub bins: usize,
}

impl Default for EdaParams {
    fn default() -> Self {
        Self { bins: 10 }
    }
}

impl EdaParams {
    pub fn validate(&self) -> Result<()> {
        if self.bins < 3 {
            return Err(Error::InvalidParameter(format!(
                "VWH needs at least 3 bins, got {}",
                self.bins
            )));
        }
        Ok(())
    }
}

/// Histogram of one dimension: `K + 1` edges and `K` probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.probabilities.len()
    }

    fn sample(&self, rng: &mut RngStream) -> f64 {
        let u = rng.uniform();
        let mut acc = 0.0;
        let mut chosen = None;
        for (k, &p) in self.probabilities.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            chosen = Some(k);
            acc += p;
            if u < acc {
                break;
            }
        }
        // the sum can fall a few ulps short of 1; the last live bin absorbs it
        let k = chosen.expect("histogram has positive mass");
        let (lo, hi) = (self.edges[k], self.edges[k + 1]);
        (lo + rng.uniform() * (hi - lo)).min(hi)
    }
}

/// Product of per-dimension histograms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VwhModel {
    pub dims: Vec<Histogram>,
}

fn build_dimension(values: &mut [f64], bins: usize, lo: f64, hi: f64) -> Histogram {
    values.sort_by(f64::total_cmp);
    let m = values.len();
    let (min1, min2) = (values[0], values[1]);
    let (max1, max2) = (values[m - 1], values[m - 2]);

    let (mut inner_lo, mut inner_hi) = if max1 > min1 {
        (
            (min1 - 0.5 * (min2 - min1)).max(lo),
            (max1 + 0.5 * (max1 - max2)).min(hi),
        )
    } else {
        // collapsed dimension: one narrow interior span around the common value
        let half = 0.5 * (1e-8 * (hi - lo)).max(1e-12);
        ((min1 - half).max(lo), (min1 + half).min(hi))
    };
    inner_lo = inner_lo.min(min1);
    inner_hi = inner_hi.max(max1);

    let interior = bins - 2;
    let width = (inner_hi - inner_lo) / interior as f64;
    let mut edges = Vec::with_capacity(bins + 1);
    edges.push(lo);
    for k in 0..interior {
        edges.push((inner_lo + k as f64 * width).min(inner_hi));
    }
    edges.push(inner_hi);
    edges.push(hi);

    let mut weights = vec![0.0; bins];
    weights[0] = if edges[1] > edges[0] { BOUNDARY_WEIGHT } else { 0.0 };
    weights[bins - 1] = if edges[bins] > edges[bins - 1] {
        BOUNDARY_WEIGHT
    } else {
        0.0
    };
    let cuts = &edges[1..bins - 1];
    for &v in values.iter() {
        // right-open interior bins, last interior bin right-closed
        let k = cuts.partition_point(|&e| e <= v).clamp(1, bins - 2);
        weights[k] += 1.0;
    }
    let total: f64 = weights.iter().sum();
    Histogram {
        edges,
        probabilities: weights.into_iter().map(|w| w / total).collect(),
    }
}

fn build_from(points: &[&DecisionVector], bins: usize, bounds: &Bounds) -> Result<VwhModel> {
    EdaParams { bins }.validate()?;
    if points.len() < 2 {
        return Err(Error::NotEnoughIndividuals {
            needed: 2,
            available: points.len(),
        });
    }
    for p in points {
        if p.dim() != bounds.dim() {
            return Err(Error::DimensionMismatch {
                expected: bounds.dim(),
                actual: p.dim(),
            });
        }
    }
    let mut column = vec![0.0; points.len()];
    let dims = (0..bounds.dim())
        .map(|d| {
            for (c, p) in column.iter_mut().zip(points) {
                *c = p[d];
            }
            build_dimension(&mut column, bins, bounds.lower()[d], bounds.upper()[d])
        })
        .collect();
    Ok(VwhModel { dims })
}

/// Fit a VWH model with `bins` bins per dimension.
pub fn vwh_build(pop: &Population, bins: usize, bounds: &Bounds) -> Result<VwhModel> {
    let points: Vec<&DecisionVector> = pop.iter().map(|m| m.x()).collect();
    build_from(&points, bins, bounds)
}

/// Draw `n` points: per dimension, pick a bin by its probability, then a
/// value uniformly inside it.
pub fn vwh_sample(model: &VwhModel, n: usize, rng: &mut RngStream) -> Population {
    let xs = (0..n)
        .map(|_| {
            DecisionVector::from_finite(model.dims.iter().map(|h| h.sample(rng)).collect())
        })
        .collect();
    Population::offspring(xs)
}

/// Classic VWH EDA on `P_e`.
pub fn eda_plain(
    evaluated: &Population,
    n: usize,
    params: &EdaParams,
    bounds: &Bounds,
    rng: &mut RngStream,
) -> Result<Population> {
    let model = vwh_build(evaluated, params.bins, bounds)?;
    Ok(vwh_sample(&model, n, rng))
}

/// VWH EDA on `P_e ∪ P_u`.
pub fn eda_reproduce(
    evaluated: &Population,
    unevaluated: &Population,
    n: usize,
    params: &EdaParams,
    bounds: &Bounds,
    rng: &mut RngStream,
) -> Result<Population> {
    let points: Vec<&DecisionVector> = evaluated
        .iter()
        .chain(unevaluated.iter())
        .map(|m| m.x())
        .collect();
    let model = build_from(&points, params.bins, bounds)?;
    Ok(vwh_sample(&model, n, rng))
}
