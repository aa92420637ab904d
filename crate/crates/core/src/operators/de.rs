use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::ga::{polynomial_mutation, GaParams};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{Bounds, DecisionVector, Population};

/// Number of random individuals drawn per target.
const POOL_SIZE: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeVariant {
    #[serde(rename = "rand/1")]
    Rand1,
    #[serde(rename = "rand/2")]
    Rand2,
    #[serde(rename = "best/1")]
    Best1,
    #[serde(rename = "best/2")]
    Best2,
    #[serde(rename = "current-to-best/1")]
    CurrentToBest1,
}

impl DeVariant {
    pub const ALL: [DeVariant; 5] = [
        DeVariant::Rand1,
        DeVariant::Rand2,
        DeVariant::Best1,
        DeVariant::Best2,
        DeVariant::CurrentToBest1,
    ];

    /// How many random pool members the variant consumes.
    pub fn arity(&self) -> usize {
        match self {
            DeVariant::Rand1 => 3,
            DeVariant::Rand2 => 5,
            DeVariant::Best1 | DeVariant::CurrentToBest1 => 2,
            DeVariant::Best2 => 4,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DeVariant::Rand1 => "rand/1",
            DeVariant::Rand2 => "rand/2",
            DeVariant::Best1 => "best/1",
            DeVariant::Best2 => "best/2",
            DeVariant::CurrentToBest1 => "current-to-best/1",
        }
    }
}

impl fmt::Display for DeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DeVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DeVariant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown DE variant `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeParams {
    /// Scaling factor.
    pub f: f64,
    /// Crossover rate.
    pub cr: f64,
    pub variant: DeVariant,
}

impl Default for DeParams {
    fn default() -> Self {
        Self {
            f: 0.5,
            cr: 0.9,
            variant: DeVariant::Best2,
        }
    }
}

impl DeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.f > 0.0 && self.f.is_finite()) {
            return Err(Error::InvalidParameter(format!("F = {} must be > 0", self.f)));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::InvalidParameter(format!("Cr = {} not in [0, 1]", self.cr)));
        }
        Ok(())
    }
}

/// Mutant vector for `variant`, taking `pool[0..]` as `x_r1, x_r2, ...`.
pub fn de_mutant(
    variant: DeVariant,
    target: &[f64],
    best: &[f64],
    pool: &[&[f64]],
    f: f64,
) -> Result<DecisionVector> {
    if pool.len() < variant.arity() {
        return Err(Error::NotEnoughIndividuals {
            needed: variant.arity(),
            available: pool.len(),
        });
    }
    let dim = target.len();
    for v in std::iter::once(best).chain(pool.iter().copied()) {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: v.len(),
            });
        }
    }
    let r = |k: usize, j: usize| pool[k][j];
    let v = (0..dim)
        .map(|j| match variant {
            DeVariant::Rand1 => r(0, j) + f * (r(1, j) - r(2, j)),
            DeVariant::Rand2 => r(0, j) + f * (r(1, j) - r(2, j)) + f * (r(3, j) - r(4, j)),
            DeVariant::Best1 => best[j] + f * (r(0, j) - r(1, j)),
            DeVariant::Best2 => best[j] + f * (r(0, j) - r(1, j)) + f * (r(2, j) - r(3, j)),
            DeVariant::CurrentToBest1 => {
                target[j] + f * (best[j] - target[j]) + f * (r(0, j) - r(1, j))
            }
        })
        .collect();
    DecisionVector::new(v)
}

/// Binomial crossover: component `j` comes from the mutant when
/// `rand_j <= cr` or `j` is the forced index.
pub fn de_crossover(
    target: &DecisionVector,
    mutant: &DecisionVector,
    cr: f64,
    rng: &mut RngStream,
) -> Result<DecisionVector> {
    if target.dim() != mutant.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            actual: mutant.dim(),
        });
    }
    let forced = rng.index(target.dim().max(1));
    let trial = (0..target.dim())
        .map(|j| {
            let draw = rng.uniform();
            if draw <= cr || j == forced {
                mutant[j]
            } else {
                target[j]
            }
        })
        .collect();
    Ok(DecisionVector::from_finite(trial))
}

/// Clamp every out-of-range component to the violated bound.
pub fn boundary_repair(x: &[f64], bounds: &Bounds) -> DecisionVector {
    DecisionVector::from_finite(
        x.iter()
            .zip(bounds.lower().iter().zip(bounds.upper()))
            .map(|(v, (lo, hi))| v.clamp(*lo, *hi))
            .collect(),
    )
}

fn best_index(pop: &Population) -> Result<usize> {
    let values = pop.fitness_values()?;
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    Ok(best)
}

// One DE offspring per target in `targets`, donors drawn from `donors`
// (which starts with the targets themselves).
fn de_generate(
    targets: &Population,
    donors: &[&DecisionVector],
    n: usize,
    params: &DeParams,
    mutation: &GaParams,
    bounds: &Bounds,
    rng: &mut RngStream,
) -> Result<Population> {
    params.validate()?;
    if targets.len() != n {
        return Err(Error::InvalidParameter(format!(
            "DE needs |P_e| = N, got |P_e| = {} and N = {n}",
            targets.len()
        )));
    }
    if donors.len() < POOL_SIZE + 1 {
        return Err(Error::NotEnoughIndividuals {
            needed: POOL_SIZE + 1,
            available: donors.len(),
        });
    }
    let best = targets.get(best_index(targets)?).x();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let target = targets.get(i).x();
        // sample from all donors except index i
        let pool: Vec<&[f64]> = index::sample(rng, donors.len() - 1, POOL_SIZE)
            .into_iter()
            .map(|k| donors[if k >= i { k + 1 } else { k }].as_slice())
            .collect();
        let mutant = de_mutant(params.variant, target, best, &pool, params.f)?;
        let trial = de_crossover(target, &mutant, params.cr, rng)?;
        let repaired = boundary_repair(&trial, bounds);
        out.push(polynomial_mutation(&repaired, mutation, bounds, rng)?);
    }
    Ok(Population::offspring(out))
}

/// Classic DE on `P_e`: targets and donors both from `P_e`.
pub fn de_plain(
    evaluated: &Population,
    n: usize,
    params: &DeParams,
    mutation: &GaParams,
    bounds: &Bounds,
    rng: &mut RngStream,
) -> Result<Population> {
    let donors: Vec<&DecisionVector> = evaluated.iter().map(|m| m.x()).collect();
    de_generate(evaluated, &donors, n, params, mutation, bounds, rng)
}

/// DE with un-evaluated donors: targets and the best vector come from
/// `P_e`, the random pool from `P_e ∪ P_u`.
pub fn de_reproduce(
    evaluated: &Population,
    unevaluated: &Population,
    n: usize,
    params: &DeParams,
    mutation: &GaParams,
    bounds: &Bounds,
    rng: &mut RngStream,
) -> Result<Population> {
    let donors: Vec<&DecisionVector> = evaluated
        .iter()
        .chain(unevaluated.iter())
        .map(|m| m.x())
        .collect();
    de_generate(evaluated, &donors, n, params, mutation, bounds, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Individual, Role};

    fn dv(v: &[f64]) -> DecisionVector {
        DecisionVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn best2_symmetric_cancellation() {
        let pool: [&[f64]; 4] = [&[2.0, 0.0], &[0.0, 2.0], &[1.0, 3.0], &[3.0, 1.0]];
        let v = de_mutant(DeVariant::Best2, &[9.0, 9.0], &[1.0, 1.0], &pool, 0.5).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn rand1_zero_difference() {
        let pool: [&[f64]; 3] = [&[4.0, -1.0], &[0.5, 0.5], &[0.5, 0.5]];
        let v = de_mutant(DeVariant::Rand1, &[0.0, 0.0], &[0.0, 0.0], &pool, 0.8).unwrap();
        assert_eq!(v.as_slice(), &[4.0, -1.0]);
    }

    #[test]
    fn current_to_best_vanishes() {
        let x = [1.5, -2.5];
        let pool: [&[f64]; 2] = [&[3.0, 3.0], &[3.0, 3.0]];
        let v = de_mutant(DeVariant::CurrentToBest1, &x, &x, &pool, 0.5).unwrap();
        assert_eq!(v.as_slice(), &x);
    }

    #[test]
    fn pool_arity_enforced() {
        let pool: [&[f64]; 4] = [&[0.0], &[0.0], &[0.0], &[0.0]];
        assert!(matches!(
            de_mutant(DeVariant::Rand2, &[0.0], &[0.0], &pool, 0.5),
            Err(Error::NotEnoughIndividuals { needed: 5, available: 4 })
        ));
        assert!(de_mutant(DeVariant::Best2, &[0.0], &[0.0], &pool, 0.5).is_ok());
    }

    #[test]
    fn crossover_extremes() {
        let x = dv(&[0.0; 6]);
        let v = dv(&[1.0; 6]);
        let mut rng = RngStream::new(3);
        assert_eq!(de_crossover(&x, &v, 1.0, &mut rng).unwrap(), v);
        for _ in 0..50 {
            let u = de_crossover(&x, &v, 0.0, &mut rng).unwrap();
            assert_eq!(u.iter().filter(|&&c| c == 1.0).count(), 1);
        }
        assert_eq!(de_crossover(&x, &x, 0.3, &mut rng).unwrap(), x);
    }

    #[test]
    fn repair_clamps() {
        let b = Bounds::uniform(3, -1.0, 1.0).unwrap();
        assert_eq!(boundary_repair(&[0.5, -0.5, 1.0], &b).as_slice(), &[0.5, -0.5, 1.0]);
        assert_eq!(boundary_repair(&[-3.0, 0.0, 7.0], &b).as_slice(), &[-1.0, 0.0, 1.0]);
    }

    fn line_population(n: usize) -> Population {
        Population::new(
            Role::Evaluated,
            (0..n)
                .map(|i| Individual::evaluated(dv(&[i as f64, -(i as f64)]), i as f64).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn size_preconditions() {
        let b = Bounds::uniform(2, -10.0, 10.0).unwrap();
        let pe = line_population(8);
        let empty = Population::empty(Role::Unevaluated);
        let (de, pm) = (DeParams::default(), GaParams::default());
        assert!(de_reproduce(&pe, &empty, 6, &de, &pm, &b, &mut RngStream::new(0)).is_err());
        let small = line_population(5);
        assert!(matches!(
            de_reproduce(&small, &empty, 5, &de, &pm, &b, &mut RngStream::new(0)),
            Err(Error::NotEnoughIndividuals { .. })
        ));
        let out = de_reproduce(&pe, &empty, 8, &de, &pm, &b, &mut RngStream::new(0)).unwrap();
        assert_eq!(out.len(), 8);
        assert!(out.iter().all(|m| b.contains(m.x())));
    }

    #[test]
    fn reproducible_and_plain_equivalent() {
        let b = Bounds::uniform(2, -10.0, 10.0).unwrap();
        let pe = line_population(10);
        let empty = Population::empty(Role::Unevaluated);
        let (de, pm) = (DeParams::default(), GaParams::default());
        let a = de_reproduce(&pe, &empty, 10, &de, &pm, &b, &mut RngStream::new(21)).unwrap();
        let c = de_reproduce(&pe, &empty, 10, &de, &pm, &b, &mut RngStream::new(21)).unwrap();
        let p = de_plain(&pe, 10, &de, &pm, &b, &mut RngStream::new(21)).unwrap();
        assert_eq!(a, c);
        assert_eq!(a, p);
    }

    #[test]
    fn variant_names_round_trip() {
        for v in DeVariant::ALL {
            assert_eq!(v.name().parse::<DeVariant>().unwrap(), v);
        }
        assert!("rand/3".parse::<DeVariant>().is_err());
    }
}
