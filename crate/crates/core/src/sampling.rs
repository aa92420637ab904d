//! Latin hypercube design for the initial population.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{Bounds, DecisionVector, Population};

/// Draw `n` points such that, in every dimension, each of the `n`
/// equal-width strata holds exactly one point. Placement inside a stratum
/// is uniform. Points come back with absent fitness.
pub fn lhs_init(n: usize, bounds: &Bounds, rng: &mut RngStream) -> Result<Population> {
    if n == 0 {
        return Err(Error::InvalidParameter("LHS needs at least one point".into()));
    }
    let dim = bounds.dim();
    let mut points = vec![vec![0.0; dim]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for d in 0..dim {
        strata.shuffle(rng);
        let (lo, width) = (bounds.lower()[d], bounds.width(d));
        let step = width / n as f64;
        for (point, &s) in points.iter_mut().zip(&strata) {
            let v = lo + (s as f64 + rng.uniform()) * step;
            // rounding can land exactly on the next stratum's edge
            point[d] = v.min(lo + (s + 1) as f64 * step).min(bounds.upper()[d]);
        }
    }
    Ok(Population::offspring(
        points.into_iter().map(DecisionVector::from_finite).collect(),
    ))
}
