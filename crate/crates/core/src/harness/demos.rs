//! One-dimensional demonstrations on the case-study function
//! `f(x) = -x sin x` over `[0, 12]` (global minimum near 7.98).

use std::io::Write;
use std::path::Path;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{DeParams, DeVariant, GaParams, Operator};
use crate::problems::{Benchmark, Problem};
use crate::rng::RngStream;
use crate::sampling::lhs_init;
use crate::surrogate::{
    expected_improvement, fit, rank_by_prediction, SurrogateKind, SurrogateSettings, TrainingSet,
};
use crate::types::{Bounds, DecisionVector, Individual, Population, Role};

/// Settings of the offspring-distribution demo.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftSetup {
    pub pop_size: usize,
    pub parent_mean: f64,
    pub parent_std: f64,
    pub offspring_mean: f64,
    pub offspring_std: f64,
    pub samples: usize,
    /// Region whose offspring share is reported.
    pub region: (f64, f64),
    pub bins: usize,
}

impl Default for ShiftSetup {
    fn default() -> Self {
        Self {
            pop_size: 30,
            parent_mean: 2.0,
            parent_std: 0.6,
            offspring_mean: 8.0,
            offspring_std: 0.8,
            samples: 10_000,
            region: (6.0, 10.0),
            bins: 24,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub lower: f64,
    pub upper: f64,
    pub with_unevaluated: usize,
    pub without_unevaluated: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub operator: String,
    pub setup: ShiftSetup,
    pub evaluated: Vec<f64>,
    pub unevaluated: Vec<f64>,
    pub fraction_with: f64,
    pub fraction_without: f64,
    pub histogram: Vec<HistogramRow>,
}

/// The operator settings used in the demo. DE uses `rand/1`: in one
/// dimension `best/2` anchors every mutant on the single best point, which
/// sits in the target region in both conditions and hides the effect.
pub fn demo_operators() -> Vec<Operator> {
    vec![
        Operator::Ga(GaParams::default()),
        Operator::De {
            de: DeParams {
                variant: DeVariant::Rand1,
                ..DeParams::default()
            },
            mutation: GaParams::default(),
        },
        Operator::eda(),
    ]
}

fn truncated_normal(mean: f64, std: f64, lo: f64, hi: f64, rng: &mut RngStream) -> Result<f64> {
    let normal = Normal::new(mean, std).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    loop {
        let v = normal.sample(rng);
        if (lo..=hi).contains(&v) {
            return Ok(v);
        }
    }
}

/// Evaluated and un-evaluated populations of the demo: parents clustered
/// around `parent_mean` with their worst member replaced by the best of an
/// offspring cluster around `offspring_mean`, and the best half of that
/// cluster as `P_u`.
pub fn shift_populations(setup: &ShiftSetup, rng: &mut RngStream) -> Result<(Population, Population)> {
    let problem = Problem::new(Benchmark::CaseStudy1D, 1)?;
    let (lo, hi) = (problem.bounds().lower()[0], problem.bounds().upper()[0]);
    let n = setup.pop_size;
    let eval = |x: f64, rng: &mut RngStream| problem.evaluate(&[x], rng).map(|f| (x, f));
    let mut parents = Vec::with_capacity(n);
    for _ in 0..n {
        let x = truncated_normal(setup.parent_mean, setup.parent_std, lo, hi, rng)?;
        parents.push(eval(x, rng)?);
    }
    let mut offspring = Vec::with_capacity(n);
    for _ in 0..n {
        let x = truncated_normal(setup.offspring_mean, setup.offspring_std, lo, hi, rng)?;
        offspring.push(eval(x, rng)?);
    }
    offspring.sort_by(|a, b| a.1.total_cmp(&b.1));
    let worst = (0..n)
        .max_by(|&a, &b| parents[a].1.total_cmp(&parents[b].1))
        .ok_or(Error::EmptyArchive)?;
    parents[worst] = offspring[0];

    let pe = parents
        .iter()
        .map(|&(x, f)| Individual::evaluated(DecisionVector::new(vec![x])?, f))
        .collect::<Result<Vec<_>>>()?;
    let pu = offspring[..n / 2]
        .iter()
        .map(|&(x, f)| Ok(Individual::predicted(DecisionVector::new(vec![x])?, f)))
        .collect::<Result<Vec<_>>>()?;
    Ok((Population::new(Role::Evaluated, pe)?, Population::new(Role::Unevaluated, pu)?))
}

fn generate(
    operator: &Operator,
    pe: &Population,
    pu: &Population,
    setup: &ShiftSetup,
    bounds: &Bounds,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(setup.samples + setup.pop_size);
    while out.len() < setup.samples {
        let o = operator.reproduce(pe, pu, setup.pop_size, bounds, rng)?;
        out.extend(o.iter().map(|i| i.x()[0]));
    }
    out.truncate(setup.samples);
    Ok(out)
}

/// Generate `samples` offspring from `P_e ∪ P_u` and from `P_e` alone and
/// compare how many land in the target region.
pub fn offspring_distribution_demo(
    operator: &Operator,
    setup: &ShiftSetup,
    rng: &RngStream,
) -> Result<ShiftReport> {
    let pu_empty = Population::empty(Role::Unevaluated);
    let (pe, pu) = shift_populations(setup, &mut rng.derive("populations"))?;
    shift_report(operator, setup, &pe, &pu, &pu_empty, rng)
}

/// As [`offspring_distribution_demo`] but with caller-chosen populations for
/// both conditions.
pub fn shift_report(
    operator: &Operator,
    setup: &ShiftSetup,
    pe: &Population,
    pu_with: &Population,
    pu_without: &Population,
    rng: &RngStream,
) -> Result<ShiftReport> {
    let bounds = Problem::new(Benchmark::CaseStudy1D, 1)?.bounds().clone();
    // both conditions replay the same stream
    let with = generate(operator, pe, pu_with, setup, &bounds, &mut rng.derive("offspring"))?;
    let without = generate(operator, pe, pu_without, setup, &bounds, &mut rng.derive("offspring"))?;

    let (a, b) = setup.region;
    let share = |xs: &[f64]| xs.iter().filter(|&&x| x >= a && x <= b).count() as f64 / xs.len() as f64;
    let (lo, hi) = (bounds.lower()[0], bounds.upper()[0]);
    let width = (hi - lo) / setup.bins as f64;
    let bin_of = |x: f64| (((x - lo) / width) as usize).min(setup.bins - 1);
    let mut histogram: Vec<HistogramRow> = (0..setup.bins)
        .map(|k| HistogramRow {
            lower: lo + k as f64 * width,
            upper: lo + (k + 1) as f64 * width,
            with_unevaluated: 0,
            without_unevaluated: 0,
        })
        .collect();
    for &x in &with {
        histogram[bin_of(x)].with_unevaluated += 1;
    }
    for &x in &without {
        histogram[bin_of(x)].without_unevaluated += 1;
    }
    Ok(ShiftReport {
        operator: operator.short_name().to_string(),
        setup: setup.clone(),
        evaluated: pe.iter().map(|i| i.x()[0]).collect(),
        unevaluated: pu_with.iter().map(|i| i.x()[0]).collect(),
        fraction_with: share(&with),
        fraction_without: share(&without),
        histogram,
    })
}

impl ShiftReport {
    /// Plot-ready histogram CSV with a commented header describing the
    /// cluster parameters.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let s = &self.setup;
        writeln!(
            out,
            "# operator={} N={} parents~N({}, {}) offspring~N({}, {}) truncated to [0, 12]; share in [{}, {}]: with={} without={}",
            self.operator,
            s.pop_size,
            s.parent_mean,
            s.parent_std,
            s.offspring_mean,
            s.offspring_std,
            s.region.0,
            s.region.1,
            self.fraction_with,
            self.fraction_without
        )?;
        let mut w = csv::Writer::from_writer(out);
        for row in &self.histogram {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Settings of the surrogate snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotSetup {
    pub training_points: usize,
    pub grid: usize,
    pub offspring: usize,
    pub forest: crate::surrogate::ForestParams,
}

impl Default for SnapshotSetup {
    fn default() -> Self {
        Self {
            training_points: 8,
            grid: 241,
            offspring: 30,
            forest: crate::surrogate::ForestParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub x: f64,
    pub f: f64,
    pub mean: f64,
    pub std: f64,
    pub ei: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRole {
    /// Chosen for real evaluation.
    Evaluate,
    /// Kept as an un-evaluated parent.
    Unevaluated,
    Discarded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OffspringRow {
    pub x: f64,
    pub prediction: f64,
    /// 1 = best predicted.
    pub rank: usize,
    pub role: SelectionRole,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotReport {
    pub setup: SnapshotSetup,
    pub training: Vec<(f64, f64)>,
    pub grid: Vec<GridRow>,
    /// Grid point maximizing expected improvement.
    pub ei_argmax: GridRow,
    pub offspring: Vec<OffspringRow>,
}

/// Train a forest on a few evaluated points and tabulate its mean, spread
/// and expected improvement over a grid, next to the rank-based selection
/// the optimizer would make on a cloud of offspring.
pub fn case_study_1d(setup: &SnapshotSetup, rng: &RngStream) -> Result<SnapshotReport> {
    if setup.grid < 2 || setup.training_points < 2 || setup.offspring < 2 {
        return Err(Error::InvalidParameter("snapshot needs at least two points of each kind".into()));
    }
    let problem = Problem::new(Benchmark::CaseStudy1D, 1)?;
    let bounds = problem.bounds().clone();
    let mut noise = rng.derive("noise");
    let design = lhs_init(setup.training_points, &bounds, &mut rng.derive("design"))?;
    let mut members = Vec::new();
    for ind in design.iter() {
        let f = problem.evaluate(ind.x(), &mut noise)?;
        members.push(Individual::evaluated(ind.x().clone(), f)?);
    }
    let pe = Population::new(Role::Evaluated, members)?;
    let data = TrainingSet::new(pe.xs(), pe.fitness_values()?)?;
    let settings = SurrogateSettings {
        forest: setup.forest.clone(),
        ..SurrogateSettings::default()
    };
    let model = fit(SurrogateKind::Rf, &data, &settings, &rng.derive("forest"))?;
    let incumbent = data.targets.iter().copied().fold(f64::INFINITY, f64::min);

    let (lo, hi) = (bounds.lower()[0], bounds.upper()[0]);
    let xs: Vec<DecisionVector> = (0..setup.grid)
        .map(|k| DecisionVector::new(vec![(lo + (hi - lo) * k as f64 / (setup.grid - 1) as f64).min(hi)]))
        .collect::<Result<_>>()?;
    let (means, stds) = model.predict_with_uncertainty(&xs)?;
    let grid: Vec<GridRow> = xs
        .iter()
        .zip(means.iter().zip(&stds))
        .map(|(x, (&mean, &std))| {
            Ok(GridRow {
                x: x[0],
                f: problem.evaluate(x, &mut noise)?,
                mean,
                std,
                ei: expected_improvement(mean, std, incumbent),
            })
        })
        .collect::<Result<_>>()?;
    let ei_argmax = grid
        .iter()
        .fold(None::<&GridRow>, |best, r| match best {
            Some(b) if b.ei >= r.ei => Some(b),
            _ => Some(r),
        })
        .cloned()
        .ok_or(Error::EmptyArchive)?;

    let n = setup.offspring + setup.offspring % 2;
    let cloud = Operator::eda().reproduce(
        &pe,
        &Population::empty(Role::Unevaluated),
        n,
        &bounds,
        &mut rng.derive("offspring"),
    )?;
    let cloud_xs = cloud.xs();
    let preds = model.predict(&cloud_xs)?;
    let order = rank_by_prediction(&preds);
    let mut offspring: Vec<OffspringRow> = vec![];
    for (r, &i) in order.iter().enumerate() {
        let role = match r {
            0 => SelectionRole::Evaluate,
            r if r <= n / 2 => SelectionRole::Unevaluated,
            _ => SelectionRole::Discarded,
        };
        offspring.push(OffspringRow {
            x: cloud_xs[i][0],
            prediction: preds[i],
            rank: r + 1,
            role,
        });
    }
    Ok(SnapshotReport {
        setup: setup.clone(),
        training: data.inputs.iter().zip(&data.targets).map(|(x, &y)| (x[0], y)).collect(),
        grid,
        ei_argmax,
        offspring,
    })
}

impl SnapshotReport {
    /// Writes `grid.csv`, `offspring.csv`, `training.csv` and
    /// `snapshot.json` into `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("grid.csv"))?;
        for r in &self.grid {
            w.serialize(r)?;
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(dir.join("offspring.csv"))?;
        for r in &self.offspring {
            w.serialize(r)?;
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(dir.join("training.csv"))?;
        w.write_record(["x", "f"])?;
        for (x, f) in &self.training {
            w.write_record([x.to_string(), f.to_string()])?;
        }
        w.flush()?;
        super::export::save_json(self, dir.join("snapshot.json"))
    }
}
