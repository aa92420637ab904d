//! The main optimization loop and its ablation and baseline variants.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::Operator;
use crate::problems::{Benchmark, Problem};
use crate::rng::RngStream;
use crate::sampling::lhs_init;
use crate::surrogate::{
    fit, rank_by_prediction, select_training_data, SurrogateKind, SurrogateModel,
    SurrogateSettings,
};
use crate::types::{population_update, Archive, DecisionVector, Individual, Population, Role};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Evaluate `O*`, feed the next `N/2` predicted offspring back as `P_u`.
    Usea,
    /// Evaluate the top `N/2` predicted offspring; no un-evaluated parents.
    #[serde(rename = "al")]
    UseaAl,
    /// Evaluate `O*` only and drop `P_u` before reproduction.
    #[serde(rename = "ns")]
    UseaNs,
    /// No surrogate: evaluate every offspring.
    Baseline,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Usea, Variant::UseaAl, Variant::UseaNs, Variant::Baseline];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Usea => "USEA",
            Variant::UseaAl => "USEA-AL",
            Variant::UseaNs => "USEA-NS",
            Variant::Baseline => "Baseline",
        }
    }

    pub fn uses_surrogate(&self) -> bool {
        *self != Variant::Baseline
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "usea" => Ok(Variant::Usea),
            "al" | "usea-al" => Ok(Variant::UseaAl),
            "ns" | "usea-ns" => Ok(Variant::UseaNs),
            "baseline" | "eda-ls-lite" => Ok(Variant::Baseline),
            other => Err(Error::InvalidParameter(format!("unknown variant `{other}`"))),
        }
    }
}

fn default_settings() -> SurrogateSettings {
    SurrogateSettings::default()
}

/// Everything that determines a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UseaConfig {
    pub problem: Benchmark,
    pub dim: usize,
    pub pop_size: usize,
    pub fes: usize,
    pub operator: Operator,
    pub surrogate: SurrogateKind,
    /// Training-set size; `None` means `2 * pop_size`.
    #[serde(default)]
    pub tau: Option<usize>,
    pub variant: Variant,
    pub seed: u64,
    #[serde(default = "default_settings")]
    pub surrogate_settings: SurrogateSettings,
}

impl UseaConfig {
    /// USEA-EDA with a random forest, `N = 50`, 500 evaluations.
    pub fn new(problem: Benchmark, dim: usize) -> Self {
        Self {
            problem,
            dim,
            pop_size: 50,
            fes: 500,
            operator: Operator::eda(),
            surrogate: SurrogateKind::Rf,
            tau: None,
            variant: Variant::Usea,
            seed: 0,
            surrogate_settings: SurrogateSettings::default(),
        }
    }

    pub fn with_operator(mut self, operator: Operator) -> Self {
        self.operator = operator;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_surrogate(mut self, surrogate: SurrogateKind) -> Self {
        self.surrogate = surrogate;
        self
    }

    pub fn with_budget(mut self, pop_size: usize, fes: usize) -> Self {
        self.pop_size = pop_size;
        self.fes = fes;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn tau(&self) -> usize {
        self.tau.unwrap_or(2 * self.pop_size)
    }

    /// Display label such as `USEA-EDA` or `USEA-NS-DE`.
    pub fn label(&self) -> String {
        match self.variant {
            Variant::Usea => format!("USEA-{}", self.operator.short_name()),
            Variant::Baseline if matches!(self.operator, Operator::Eda(_)) => "EDA-LS-lite".into(),
            Variant::Baseline => format!("{}-plain", self.operator.short_name()),
            v => format!("{}-{}", v.name(), self.operator.short_name()),
        }
    }

    pub fn build_problem(&self) -> Result<Problem> {
        Problem::new(self.problem, self.dim)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.pop_size;
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "population size must be even and at least 2, got {n}"
            )));
        }
        if self.fes < n {
            return Err(Error::InvalidParameter(format!(
                "budget {} is smaller than the population size {n}",
                self.fes
            )));
        }
        if n < self.operator.min_parents() {
            return Err(Error::NotEnoughIndividuals {
                needed: self.operator.min_parents(),
                available: n,
            });
        }
        if self.tau() < 2 {
            return Err(Error::InvalidParameter("tau must be at least 2".into()));
        }
        self.operator.validate()
    }
}

/// What happened in one generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Real evaluations spent in this generation.
    pub evaluated: usize,
    /// True objective value of the first evaluated offspring (`O*`).
    pub best_offspring_value: f64,
    /// Its surrogate prediction, when a surrogate was used.
    pub best_offspring_prediction: Option<f64>,
    pub unevaluated_count: usize,
    pub unevaluated_prediction_mean: Option<f64>,
    pub unevaluated_prediction_min: Option<f64>,
    pub unevaluated_prediction_max: Option<f64>,
    /// Surrogate that produced the predictions.
    pub surrogate: Option<SurrogateKind>,
    /// The requested GP failed and a forest was used instead.
    pub fallback: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestSolution {
    pub x: Vec<f64>,
    pub f: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub config: UseaConfig,
    /// Best-so-far objective after each real evaluation.
    pub best_curve: Vec<f64>,
    pub final_best: BestSolution,
    pub generations: Vec<GenerationRecord>,
    pub evaluations: usize,
    pub wall_clock: f64,
}

impl RunTrace {
    pub fn fallback_count(&self) -> usize {
        self.generations.iter().filter(|g| g.fallback).count()
    }
}

struct Evaluator<'a> {
    problem: &'a Problem,
    archive: Archive,
    curve: Vec<f64>,
    budget: usize,
    noise: RngStream,
    /// Calls into the objective, counted independently of the archive.
    calls: usize,
}

impl Evaluator<'_> {
    fn remaining(&self) -> usize {
        self.budget - self.archive.fes()
    }

    fn evaluate(&mut self, x: &DecisionVector) -> Result<f64> {
        debug_assert!(self.remaining() > 0);
        self.calls += 1;
        let y = self.problem.evaluate(x, &mut self.noise)?;
        self.archive.insert(x.clone(), y)?;
        let best = self.curve.last().map_or(y, |b| b.min(y));
        self.curve.push(best);
        Ok(y)
    }
}

/// Run the configured algorithm. Dispatches on `config.variant`.
pub fn usea_run(config: &UseaConfig) -> Result<RunTrace> {
    run_loop(config, false)
}

/// Run an ablation or baseline variant; rejects plain USEA.
pub fn run_variant(config: &UseaConfig) -> Result<RunTrace> {
    if config.variant == Variant::Usea {
        return Err(Error::InvalidParameter(
            "run_variant expects USEA-AL, USEA-NS or the baseline".into(),
        ));
    }
    run_loop(config, false)
}

/// USEA with every `P_u` emptied before reproduction. Used to check that
/// USEA-NS is exactly this.
#[doc(hidden)]
pub fn usea_run_without_unevaluated(config: &UseaConfig) -> Result<RunTrace> {
    run_loop(config, true)
}

fn train(
    config: &UseaConfig,
    archive: &Archive,
    rng: &RngStream,
    generation: usize,
) -> Result<(SurrogateModel, bool)> {
    let data = select_training_data(archive, config.tau())?;
    let fit_rng = rng.derive_indexed("fit", generation as u64);
    match fit(config.surrogate, &data, &config.surrogate_settings, &fit_rng) {
        Ok(model) => Ok((model, false)),
        Err(err) if config.surrogate == SurrogateKind::Gp => {
            log::warn!("generation {generation}: GP fit failed ({err}); using a random forest");
            let model = fit(SurrogateKind::Rf, &data, &config.surrogate_settings, &fit_rng)?;
            Ok((model, true))
        }
        Err(err) => Err(err),
    }
}

fn summarize(preds: &[f64]) -> (Option<f64>, Option<f64>, Option<f64>) {
    if preds.is_empty() {
        return (None, None, None);
    }
    let mean = preds.iter().sum::<f64>() / preds.len() as f64;
    let min = preds.iter().copied().fold(f64::INFINITY, f64::min);
    let max = preds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (Some(mean), Some(min), Some(max))
}

fn run_loop(config: &UseaConfig, force_empty_pu: bool) -> Result<RunTrace> {
    config.validate()?;
    let started = Instant::now();
    let problem = config.build_problem()?;
    let bounds = problem.bounds().clone();
    let n = config.pop_size;

    let root = RngStream::new(config.seed);
    let mut lhs_rng = root.derive("lhs");
    let mut rep_rng = root.derive("reproduce");
    let surrogate_rng = root.derive("surrogate");

    let mut eval = Evaluator {
        problem: &problem,
        archive: Archive::new(),
        curve: Vec::with_capacity(config.fes),
        budget: config.fes,
        noise: root.derive("noise"),
        calls: 0,
    };

    let design = lhs_init(n, &bounds, &mut lhs_rng)?;
    let init = design.len().min(eval.remaining());
    for ind in design.iter().take(init) {
        eval.evaluate(ind.x())?;
    }
    let mut pe = population_update(&eval.archive, n)?;
    let mut pu = Population::empty(Role::Unevaluated);
    let mut generations = Vec::new();

    while eval.remaining() > 0 {
        let gen = generations.len();
        if force_empty_pu || config.variant == Variant::UseaNs {
            pu = Population::empty(Role::Unevaluated);
        }
        let offspring = if config.variant == Variant::Baseline {
            config.operator.reproduce_plain(&pe, n, &bounds, &mut rep_rng)?
        } else {
            config.operator.reproduce(&pe, &pu, n, &bounds, &mut rep_rng)?
        };
        let xs = offspring.xs();

        let record = if config.variant == Variant::Baseline {
            let count = xs.len().min(eval.remaining());
            let mut first = f64::NAN;
            for (i, x) in xs.iter().take(count).enumerate() {
                let y = eval.evaluate(x)?;
                if i == 0 {
                    first = y;
                }
            }
            GenerationRecord {
                generation: gen,
                evaluated: count,
                best_offspring_value: first,
                best_offspring_prediction: None,
                unevaluated_count: 0,
                unevaluated_prediction_mean: None,
                unevaluated_prediction_min: None,
                unevaluated_prediction_max: None,
                surrogate: None,
                fallback: false,
            }
        } else {
            let (model, fallback) = train(config, &eval.archive, &surrogate_rng, gen)?;
            let predictions = model.predict(&xs)?;
            let order = rank_by_prediction(&predictions);
            let to_evaluate = match config.variant {
                Variant::UseaAl => (n / 2).min(eval.remaining()),
                _ => 1,
            };
            let mut first = f64::NAN;
            for (k, &i) in order.iter().take(to_evaluate).enumerate() {
                let y = eval.evaluate(&xs[i])?;
                if k == 0 {
                    first = y;
                }
            }
            pu = if config.variant == Variant::UseaAl {
                Population::empty(Role::Unevaluated)
            } else {
                let members = order[1..=n / 2]
                    .iter()
                    .map(|&i| Individual::predicted(xs[i].clone(), predictions[i]))
                    .collect();
                Population::new(Role::Unevaluated, members)?
            };
            let pu_preds: Vec<f64> = order[1..=n / 2].iter().map(|&i| predictions[i]).collect();
            let (mean, min, max) = if pu.is_empty() {
                (None, None, None)
            } else {
                summarize(&pu_preds)
            };
            GenerationRecord {
                generation: gen,
                evaluated: to_evaluate,
                best_offspring_value: first,
                best_offspring_prediction: Some(predictions[order[0]]),
                unevaluated_count: pu.len(),
                unevaluated_prediction_mean: mean,
                unevaluated_prediction_min: min,
                unevaluated_prediction_max: max,
                surrogate: Some(model.kind()),
                fallback,
            }
        };
        generations.push(record);
        pe = population_update(&eval.archive, n)?;
    }

    let best = eval.archive.best().ok_or(Error::EmptyArchive)?;
    Ok(RunTrace {
        config: config.clone(),
        final_best: BestSolution {
            x: best.x.to_vec(),
            f: best.y,
        },
        evaluations: eval.calls,
        best_curve: eval.curve,
        generations,
        wall_clock: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(b: Benchmark, variant: Variant) -> UseaConfig {
        let mut c = UseaConfig::new(b, 5).with_variant(variant).with_budget(10, 60).with_seed(9);
        c.surrogate_settings.forest.n_trees = 10;
        c
    }

    #[test]
    fn budget_is_exact_for_every_variant() {
        for v in Variant::ALL {
            for op in [Operator::ga(), Operator::de(), Operator::eda()] {
                let t = usea_run(&small(Benchmark::Ackley, v).with_operator(op)).unwrap();
                assert_eq!(t.evaluations, 60, "{v}");
                assert_eq!(t.best_curve.len(), 60);
            }
        }
    }

    #[test]
    fn iteration_counts() {
        let t = usea_run(&small(Benchmark::Ellipsoid, Variant::Usea)).unwrap();
        assert_eq!(t.generations.len(), 50);
        let t = usea_run(&small(Benchmark::Ellipsoid, Variant::Baseline)).unwrap();
        assert_eq!(t.generations.len(), 5);
        let t = usea_run(&small(Benchmark::Ellipsoid, Variant::UseaAl)).unwrap();
        assert_eq!(t.generations.len(), 10);
        assert!(t.generations.iter().all(|g| g.unevaluated_count == 0));
    }

    #[test]
    fn curve_non_increasing_and_matches_final() {
        let t = usea_run(&small(Benchmark::Rosenbrock, Variant::Usea)).unwrap();
        assert!(t.best_curve.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*t.best_curve.last().unwrap(), t.final_best.f);
    }

    #[test]
    fn seeded_runs_repeat() {
        let c = small(Benchmark::Griewank, Variant::Usea);
        let (a, b) = (usea_run(&c).unwrap(), usea_run(&c).unwrap());
        assert_eq!(a.best_curve, b.best_curve);
        assert_eq!(a.generations, b.generations);
    }

    #[test]
    fn ns_is_usea_without_unevaluated() {
        let ns = usea_run(&small(Benchmark::Ackley, Variant::UseaNs)).unwrap();
        let forced = usea_run_without_unevaluated(&small(Benchmark::Ackley, Variant::Usea)).unwrap();
        assert_eq!(ns.best_curve, forced.best_curve);
        let usea = usea_run(&small(Benchmark::Ackley, Variant::Usea)).unwrap();
        assert_ne!(ns.best_curve, usea.best_curve);
    }

    #[test]
    fn unevaluated_has_half_population() {
        let t = usea_run(&small(Benchmark::Ellipsoid, Variant::Usea)).unwrap();
        assert!(t.generations.iter().all(|g| g.unevaluated_count == 5));
    }

    #[test]
    fn gp_surrogate_runs() {
        let c = small(Benchmark::Ellipsoid, Variant::Usea).with_surrogate(SurrogateKind::Gp);
        let t = usea_run(&c).unwrap();
        assert_eq!(t.evaluations, 60);
        assert!(t.generations.iter().all(|g| g.surrogate.is_some()));
    }

    #[test]
    fn invalid_configs_rejected() {
        let c = small(Benchmark::Ellipsoid, Variant::Usea);
        assert!(usea_run(&c.clone().with_budget(9, 60)).is_err());
        assert!(usea_run(&c.clone().with_budget(10, 8)).is_err());
        assert!(usea_run(&c.clone().with_budget(4, 60).with_operator(Operator::de())).is_err());
        assert!(run_variant(&c).is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let c = small(Benchmark::Griewank, Variant::UseaAl).with_operator(Operator::de());
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<UseaConfig>(&s).unwrap(), c);
    }
}
