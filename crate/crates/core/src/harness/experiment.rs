//! Multi-run, multi-problem sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{mean, mean_rank, median, std_dev, wilcoxon_rank_sum, Mark};
use crate::engine::{usea_run, RunTrace, UseaConfig, Variant};
use crate::error::{Error, Result};
use crate::operators::Operator;
use crate::problems::Benchmark;
use crate::surrogate::{SurrogateKind, SurrogateSettings};

pub const SCHEMA_VERSION: u32 = 1;

/// Significance level for the pairwise marks.
pub const ALPHA: f64 = 0.05;

fn default_pop() -> usize {
    50
}

fn default_fes() -> usize {
    500
}

fn default_operator() -> Operator {
    Operator::eda()
}

fn default_surrogate() -> SurrogateKind {
    SurrogateKind::Rf
}

fn default_variant() -> Variant {
    Variant::Usea
}

/// An algorithm column: every setting of a run except problem, dimension
/// and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    /// Column name; defaults to the configuration label (e.g. `USEA-EDA`).
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default = "default_operator")]
    pub operator: Operator,
    #[serde(default = "default_surrogate")]
    pub surrogate: SurrogateKind,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default = "default_pop")]
    pub pop_size: usize,
    #[serde(default = "default_fes")]
    pub fes: usize,
    #[serde(default)]
    pub tau: Option<usize>,
    #[serde(default)]
    pub surrogate_settings: SurrogateSettings,
}

impl AlgorithmSpec {
    pub fn new(operator: Operator, variant: Variant) -> Self {
        Self {
            label: None,
            operator,
            surrogate: SurrogateKind::Rf,
            variant,
            pop_size: 50,
            fes: 500,
            tau: None,
            surrogate_settings: SurrogateSettings::default(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn config(&self, problem: Benchmark, dim: usize, seed: u64) -> UseaConfig {
        UseaConfig {
            problem,
            dim,
            pop_size: self.pop_size,
            fes: self.fes,
            operator: self.operator.clone(),
            surrogate: self.surrogate,
            tau: self.tau,
            variant: self.variant,
            seed,
            surrogate_settings: self.surrogate_settings.clone(),
        }
    }

    pub fn name(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| self.config(Benchmark::Ellipsoid, 1, 0).label())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputPaths {
    #[serde(default)]
    pub summary_csv: Option<String>,
    #[serde(default)]
    pub raw_json: Option<String>,
}

/// A grid of problems × dimensions × algorithms, each cell run `runs`
/// times.
///
/// Cells are numbered problem-major, then dimension, then algorithm. Run
/// `r` of cell `c` uses seed `base_seed + c * runs + r`, so every run has
/// a distinct seed and any cell can be re-run on its own.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub algorithms: Vec<AlgorithmSpec>,
    pub problems: Vec<Benchmark>,
    pub dims: Vec<usize>,
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Column the others are compared against; defaults to the first.
    #[serde(default)]
    pub reference: Option<String>,
    /// Worker threads; `None` uses every available core.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub output: OutputPaths,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub problem: Benchmark,
    pub dim: usize,
    pub algorithm: usize,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidParameter("runs per cell must be at least 1".into()));
        }
        if self.algorithms.is_empty() || self.problems.is_empty() || self.dims.is_empty() {
            return Err(Error::InvalidParameter(
                "an experiment needs algorithms, problems and dimensions".into(),
            ));
        }
        let names = self.algorithm_names();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidParameter(format!("duplicate algorithm label `{n}`")));
            }
        }
        if let Some(r) = &self.reference {
            if !names.contains(r) {
                return Err(Error::InvalidParameter(format!("unknown reference `{r}`")));
            }
        }
        for cell in self.cells() {
            self.algorithms[cell.algorithm]
                .config(cell.problem, cell.dim, 0)
                .validate()?;
        }
        Ok(())
    }

    pub fn algorithm_names(&self) -> Vec<String> {
        self.algorithms.iter().map(AlgorithmSpec::name).collect()
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &problem in &self.problems {
            for &dim in &self.dims {
                for algorithm in 0..self.algorithms.len() {
                    cells.push(Cell {
                        index: cells.len(),
                        problem,
                        dim,
                        algorithm,
                    });
                }
            }
        }
        cells
    }

    pub fn seed(&self, cell: usize, run: usize) -> u64 {
        self.base_seed
            .wrapping_add((cell * self.runs) as u64)
            .wrapping_add(run as u64)
    }

    pub fn config(&self, cell: &Cell, run: usize) -> UseaConfig {
        self.algorithms[cell.algorithm].config(cell.problem, cell.dim, self.seed(cell.index, run))
    }
}

/// One executed run, successful or not.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub cell: usize,
    pub run: usize,
    pub seed: u64,
    pub algorithm: String,
    pub problem: Benchmark,
    pub dim: usize,
    pub config: UseaConfig,
    #[serde(default)]
    pub trace: Option<RunTrace>,
    #[serde(default)]
    pub error: Option<String>,
}

impl RunRecord {
    pub fn final_best(&self) -> Option<f64> {
        self.trace.as_ref().map(|t| t.final_best.f)
    }
}

/// Statistics for one (problem, dimension, algorithm) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub schema_version: u32,
    pub problem: String,
    pub dim: usize,
    pub algorithm: String,
    pub runs: usize,
    pub completed: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub median: Option<f64>,
    /// Rank of the mean among the algorithms on this problem and dimension.
    pub rank: Option<f64>,
    /// Against the reference column; empty for the reference itself.
    pub mark: Option<Mark>,
    pub p_value: Option<f64>,
}

impl CellSummary {
    pub fn is_complete(&self) -> bool {
        self.completed == self.runs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanRank {
    pub dim: usize,
    pub algorithm: String,
    pub mean_rank: f64,
    /// Problems that entered the average.
    pub problems: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub schema_version: u32,
    pub reference: String,
    pub cells: Vec<CellSummary>,
    pub mean_ranks: Vec<MeanRank>,
}

impl StatsSummary {
    pub fn cell(&self, problem: &str, dim: usize, algorithm: &str) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.problem == problem && c.dim == dim && c.algorithm == algorithm)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub records: Vec<RunRecord>,
    pub summary: StatsSummary,
}

impl ExperimentResult {
    pub fn finals(&self, problem: Benchmark, dim: usize, algorithm: &str) -> Vec<f64> {
        finals_of(&self.records, problem, dim, algorithm)
    }
}

fn finals_of(records: &[RunRecord], problem: Benchmark, dim: usize, algorithm: &str) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.problem == problem && r.dim == dim && r.algorithm == algorithm)
        .filter_map(RunRecord::final_best)
        .collect()
}

/// Run every cell of `spec` and summarize. Failed runs are kept as records
/// with an error and leave their cell incomplete.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let names = spec.algorithm_names();
    let jobs: Vec<(Cell, usize)> = spec
        .cells()
        .into_iter()
        .flat_map(|c| (0..spec.runs).map(move |r| (c.clone(), r)))
        .collect();
    let execute = |(cell, run): &(Cell, usize)| {
        let config = spec.config(cell, *run);
        let outcome = usea_run(&config);
        if let Err(e) = &outcome {
            log::error!("cell {} run {run} failed: {e}", cell.index);
        }
        RunRecord {
            cell: cell.index,
            run: *run,
            seed: config.seed,
            algorithm: names[cell.algorithm].clone(),
            problem: cell.problem,
            dim: cell.dim,
            trace: outcome.as_ref().ok().cloned(),
            error: outcome.err().map(|e| e.to_string()),
            config,
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    // collect keeps job order, so scheduling cannot change the output
    let records: Vec<RunRecord> = pool.install(|| jobs.par_iter().map(execute).collect());
    let reference = spec.reference.clone().unwrap_or_else(|| names[0].clone());
    let summary = summarize(&records, &reference)?;
    Ok(ExperimentResult { records, summary })
}

/// Recompute the summary from run records (for instance after reloading raw
/// results). Cells appear in first-seen record order.
pub fn summarize(records: &[RunRecord], reference: &str) -> Result<StatsSummary> {
    let mut keys: Vec<(Benchmark, usize, String)> = Vec::new();
    let mut runs: Vec<usize> = Vec::new();
    for r in records {
        let key = (r.problem, r.dim, r.algorithm.clone());
        let pos = match keys.iter().position(|k| *k == key) {
            Some(p) => p,
            None => {
                keys.push(key);
                runs.push(0);
                keys.len() - 1
            }
        };
        runs[pos] += 1;
    }
    if !keys.iter().any(|k| k.2 == reference) {
        return Err(Error::InvalidParameter(format!("reference `{reference}` has no runs")));
    }

    let mut cells: Vec<CellSummary> = keys
        .iter()
        .enumerate()
        .map(|(pos, (problem, dim, algorithm))| {
            let finals = finals_of(records, *problem, *dim, algorithm);
            let (mark, p_value) = if algorithm == reference {
                (None, None)
            } else {
                let base = finals_of(records, *problem, *dim, reference);
                match wilcoxon_rank_sum(&finals, &base, ALPHA) {
                    Ok(t) => (Some(t.mark), Some(t.p_value)),
                    Err(_) => (None, None),
                }
            };
            CellSummary {
                schema_version: SCHEMA_VERSION,
                problem: problem.name().to_string(),
                dim: *dim,
                algorithm: algorithm.clone(),
                runs: runs[pos],
                completed: finals.len(),
                mean: mean(&finals),
                std: std_dev(&finals),
                median: median(&finals),
                rank: None,
                mark,
                p_value,
            }
        })
        .collect();

    // per (problem, dim) ranks of the means, then per-dim averages
    let mut algorithms: Vec<String> = Vec::new();
    for k in &keys {
        if !algorithms.contains(&k.2) {
            algorithms.push(k.2.clone());
        }
    }
    let mut dims: Vec<usize> = keys.iter().map(|k| k.1).collect();
    dims.sort_unstable();
    dims.dedup();
    let mut mean_ranks = Vec::new();
    for dim in dims {
        let mut problems: Vec<String> = Vec::new();
        for c in cells.iter().filter(|c| c.dim == dim) {
            if !problems.contains(&c.problem) {
                problems.push(c.problem.clone());
            }
        }
        let mut table = Vec::new();
        for p in &problems {
            let row: Option<Vec<(usize, f64)>> = algorithms
                .iter()
                .map(|a| {
                    cells
                        .iter()
                        .position(|c| c.dim == dim && &c.problem == p && &c.algorithm == a)
                        .and_then(|i| cells[i].mean.map(|m| (i, m)))
                })
                .collect();
            let Some(row) = row else { continue };
            let values: Vec<f64> = row.iter().map(|&(_, m)| m).collect();
            for (&(i, _), r) in row.iter().zip(super::stats::average_ranks(&values)) {
                cells[i].rank = Some(r);
            }
            table.push(values);
        }
        if table.is_empty() {
            continue;
        }
        for (a, r) in algorithms.iter().zip(mean_rank(&table)?) {
            mean_ranks.push(MeanRank {
                dim,
                algorithm: a.clone(),
                mean_rank: r,
                problems: table.len(),
            });
        }
    }

    Ok(StatsSummary {
        schema_version: SCHEMA_VERSION,
        reference: reference.to_string(),
        cells,
        mean_ranks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_spec() -> ExperimentSpec {
        let mut usea = AlgorithmSpec::new(Operator::eda(), Variant::Usea);
        usea.pop_size = 10;
        usea.fes = 30;
        usea.surrogate_settings.forest.n_trees = 5;
        let mut base = AlgorithmSpec::new(Operator::eda(), Variant::Baseline);
        base.pop_size = 10;
        base.fes = 30;
        ExperimentSpec {
            algorithms: vec![usea, base],
            problems: vec![Benchmark::Ellipsoid, Benchmark::Ackley],
            dims: vec![3],
            runs: 3,
            base_seed: 100,
            reference: None,
            workers: Some(2),
            output: OutputPaths::default(),
        }
    }

    #[test]
    fn seeds_follow_documented_formula() {
        let spec = tiny_spec();
        assert_eq!(spec.seed(0, 0), 100);
        assert_eq!(spec.seed(2, 1), 107);
        let res = run_experiment(&spec).unwrap();
        for r in &res.records {
            assert_eq!(r.seed, 100 + (r.cell * 3 + r.run) as u64);
        }
        let mut seeds: Vec<u64> = res.records.iter().map(|r| r.seed).collect();
        seeds.dedup();
        assert_eq!(seeds.len(), 12);
    }

    #[test]
    fn summary_mean_is_arithmetic_mean() {
        let mut spec = tiny_spec();
        spec.algorithms.truncate(1);
        spec.problems.truncate(1);
        let res = run_experiment(&spec).unwrap();
        assert_eq!(res.records.len(), 3);
        let finals: Vec<f64> = res.records.iter().map(|r| r.final_best().unwrap()).collect();
        let c = &res.summary.cells[0];
        assert_eq!(c.mean.unwrap(), finals.iter().sum::<f64>() / 3.0);
        assert!(c.is_complete());
    }

    #[test]
    fn rerun_and_worker_count_do_not_change_results() {
        let spec = tiny_spec();
        let a = run_experiment(&spec).unwrap();
        let mut serial = spec.clone();
        serial.workers = Some(1);
        let b = run_experiment(&serial).unwrap();
        assert_eq!(a.summary, b.summary);
        let fa: Vec<_> = a.records.iter().map(RunRecord::final_best).collect();
        let fb: Vec<_> = b.records.iter().map(RunRecord::final_best).collect();
        assert_eq!(fa, fb);
    }

    #[test]
    fn ranks_and_marks_filled() {
        let res = run_experiment(&tiny_spec()).unwrap();
        let s = &res.summary;
        assert_eq!(s.cells.len(), 4);
        assert!(s.cells.iter().all(|c| c.rank.is_some()));
        let reference = s.cell("Ellipsoid", 3, "USEA-EDA").unwrap();
        assert!(reference.mark.is_none());
        assert!(s.cell("Ellipsoid", 3, "EDA-LS-lite").unwrap().mark.is_some());
        let total: f64 = s.mean_ranks.iter().map(|m| m.mean_rank).sum();
        assert!((total - 3.0).abs() < 1e-12);
    }

    #[test]
    fn failed_runs_are_recorded() {
        let records = run_experiment(&tiny_spec()).unwrap().records;
        let mut broken = records.clone();
        broken[0].trace = None;
        broken[0].error = Some("evaluation fault".into());
        let s = summarize(&broken, "USEA-EDA").unwrap();
        let c = s.cell("Ellipsoid", 3, "USEA-EDA").unwrap();
        assert_eq!((c.runs, c.completed), (3, 2));
        assert!(!c.is_complete());
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = tiny_spec();
        spec.runs = 0;
        assert!(spec.validate().is_err());
        let mut spec = tiny_spec();
        spec.reference = Some("nope".into());
        assert!(spec.validate().is_err());
        let mut spec = tiny_spec();
        spec.algorithms[1].label = Some("USEA-EDA".into());
        assert!(spec.validate().is_err());
    }

    #[test]
    fn spec_json_defaults() {
        let json = r#"{"algorithms":[{"variant":"baseline"}],"problems":["Griewank"],"dims":[20],"runs":30}"#;
        let spec: ExperimentSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.algorithms[0].pop_size, 50);
        assert_eq!(spec.algorithms[0].fes, 500);
        assert_eq!(spec.algorithm_names(), vec!["EDA-LS-lite".to_string()]);
    }
}
