use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{Bounds, DecisionVector, Individual, Population};

/// Genetic operator settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    /// Mixing probability: chance a pair uses un-evaluated parents at all.
    pub beta1: f64,
    /// Selection probability: within the mixing branch, chance both parents
    /// are un-evaluated (otherwise exactly one is).
    pub beta2: f64,
    /// SBX distribution index.
    pub eta_c: f64,
    /// PM distribution index.
    pub eta_m: f64,
    /// Per-variable mutation probability; `None` means `1/n`.
    pub p_m: Option<f64>,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            beta1: 1.0,
            beta2: 0.8,
            eta_c: 20.0,
            eta_m: 20.0,
            p_m: None,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {v} not in [0, 1]")))
            }
        };
        prob("beta1", self.beta1)?;
        prob("beta2", self.beta2)?;
        if let Some(p) = self.p_m {
            prob("p_m", p)?;
        }
        if !(self.eta_c > 0.0 && self.eta_m > 0.0) {
            return Err(Error::InvalidParameter(
                "distribution indices must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn mutation_rate(&self, dim: usize) -> f64 {
        self.p_m.unwrap_or(1.0 / dim.max(1) as f64)
    }
}

fn check_ranked(pop: &Population) -> Result<()> {
    if pop.is_empty() {
        return Err(Error::NotEnoughIndividuals {
            needed: 1,
            available: 0,
        });
    }
    pop.fitness_values().map(|_| ())
}

// Smallest fitness among the drawn members; the first drawn wins ties.
fn tournament_winner(pop: &Population, draws: &[usize]) -> usize {
    let value = |i: usize| pop.get(i).fitness().value().unwrap_or(f64::INFINITY);
    let mut best = draws[0];
    for &d in &draws[1..] {
        if value(d) < value(best) {
            best = d;
        }
    }
    best
}

fn tournament_index(pop: &Population, k: usize, rng: &mut RngStream) -> usize {
    let draws: Vec<usize> = (0..k.max(1)).map(|_| rng.index(pop.len())).collect();
    tournament_winner(pop, &draws)
}

/// k-way tournament with replacement; lower fitness (evaluated or
/// predicted) wins.
pub fn tournament_select<'a>(
    pop: &'a Population,
    k: usize,
    rng: &mut RngStream,
) -> Result<&'a Individual> {
    check_ranked(pop)?;
    Ok(pop.get(tournament_index(pop, k, rng)))
}

/// SBX spread factor for a uniform draw `u`.
fn sbx_spread(u: f64, eta: f64) -> f64 {
    if u <= 0.5 {
        (2.0 * u).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta + 1.0))
    }
}

fn sbx_blend(a: f64, b: f64, spread: f64) -> (f64, f64) {
    (
        0.5 * ((1.0 + spread) * a + (1.0 - spread) * b),
        0.5 * ((1.0 - spread) * a + (1.0 + spread) * b),
    )
}

fn check_dims(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// Simulated binary crossover. Each variable is crossed with probability
/// 0.5; children are clipped to the bounds.
pub fn sbx_crossover(
    p1: &DecisionVector,
    p2: &DecisionVector,
    params: &GaParams,
    bounds: &Bounds,
    rng: &mut RngStream,
) -> Result<(DecisionVector, DecisionVector)> {
    check_dims(bounds.dim(), p1.dim())?;
    check_dims(bounds.dim(), p2.dim())?;
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for j in 0..c1.len() {
        if rng.uniform() >= 0.5 || (p1[j] - p2[j]).abs() < 1e-14 {
            continue;
        }
        let spread = sbx_spread(rng.uniform(), params.eta_c);
        let (a, b) = sbx_blend(p1[j], p2[j], spread);
        let (lo, hi) = (bounds.lower()[j], bounds.upper()[j]);
        c1[j] = a.clamp(lo, hi);
        c2[j] = b.clamp(lo, hi);
    }
    Ok((DecisionVector::from_finite(c1), DecisionVector::from_finite(c2)))
}

/// Polynomial perturbation δ for a uniform draw `u`.
fn pm_delta(u: f64, eta: f64) -> f64 {
    if u < 0.5 {
        (2.0 * u).powf(1.0 / (eta + 1.0)) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - u)).powf(1.0 / (eta + 1.0))
    }
}

fn pm_shift(value: f64, delta: f64, lo: f64, hi: f64) -> f64 {
    (value + delta * (hi - lo)).clamp(lo, hi)
}

/// Polynomial mutation with per-variable probability `p_m`.
pub fn polynomial_mutation(
    x: &DecisionVector,
    params: &GaParams,
    bounds: &Bounds,
    rng: &mut RngStream,
) -> Result<DecisionVector> {
    check_dims(bounds.dim(), x.dim())?;
    let rate = params.mutation_rate(x.dim());
    let mut y = x.to_vec();
    for (j, v) in y.iter_mut().enumerate() {
        if rng.uniform() < rate {
            let delta = pm_delta(rng.uniform(), params.eta_m);
            *v = pm_shift(*v, delta, bounds.lower()[j], bounds.upper()[j]);
        }
    }
    Ok(DecisionVector::from_finite(y))
}

fn breed(
    p1: &DecisionVector,
    p2: &DecisionVector,
    params: &GaParams,
    bounds: &Bounds,
    rng: &mut RngStream,
    out: &mut Vec<DecisionVector>,
) -> Result<()> {
    let (c1, c2) = sbx_crossover(p1, p2, params, bounds, rng)?;
    out.push(polynomial_mutation(&c1, params, bounds, rng)?);
    out.push(polynomial_mutation(&c2, params, bounds, rng)?);
    Ok(())
}

fn check_even(n: usize) -> Result<()> {
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "GA offspring count must be even, got {n}"
        )));
    }
    Ok(())
}

/// Classic GA: binary tournaments on `P_e`, SBX, then PM.
pub fn ga_plain(
    evaluated: &Population,
    n: usize,
    params: &GaParams,
    bounds: &Bounds,
    rng: &mut RngStream,
) -> Result<Population> {
    check_even(n)?;
    check_ranked(evaluated)?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n / 2 {
        let a = tournament_index(evaluated, 2, rng);
        let b = tournament_index(evaluated, 2, rng);
        breed(evaluated.get(a).x(), evaluated.get(b).x(), params, bounds, rng, &mut out)?;
    }
    Ok(Population::offspring(out))
}

/// GA with un-evaluated parents mixed in by `beta1`/`beta2`.
///
/// Falls back to [`ga_plain`] behaviour when `P_u` is empty (first
/// generation).
pub fn ga_reproduce(
    evaluated: &Population,
    unevaluated: &Population,
    n: usize,
    params: &GaParams,
    bounds: &Bounds,
    rng: &mut RngStream,
) -> Result<Population> {
    check_even(n)?;
    check_ranked(evaluated)?;
    let mixing = !unevaluated.is_empty();
    if mixing {
        check_ranked(unevaluated)?;
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n / 2 {
        let se1 = evaluated.get(tournament_index(evaluated, 2, rng)).x();
        let se2 = evaluated.get(tournament_index(evaluated, 2, rng)).x();
        let (p1, p2) = if mixing {
            let su1 = unevaluated.get(tournament_index(unevaluated, 2, rng)).x();
            let su2 = unevaluated.get(tournament_index(unevaluated, 2, rng)).x();
            if rng.uniform() < params.beta1 {
                if rng.uniform() < params.beta2 {
                    (su1, su2)
                } else if rng.uniform() < 0.5 {
                    (se1, su2)
                } else {
                    (su1, se2)
                }
            } else {
                (se1, se2)
            }
        } else {
            (se1, se2)
        };
        breed(p1, p2, params, bounds, rng, &mut out)?;
    }
    Ok(Population::offspring(out))
}
