//! Surrogate regressors, training-set selection and model-assisted
//! selection of the solution to evaluate (`O*`) and the un-evaluated
//! parents (`P_u`).

mod forest;
mod gp;

pub use forest::{ForestParams, RandomForest, RegressionTree};
pub use gp::{GaussianProcess, GpParams};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{Archive, DecisionVector, Individual, Population, Role};

/// Inputs and targets handed to a regressor. `tau()` is the count used.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet {
    pub inputs: Vec<DecisionVector>,
    pub targets: Vec<f64>,
}

impl TrainingSet {
    pub fn new(inputs: Vec<DecisionVector>, targets: Vec<f64>) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                actual: targets.len(),
            });
        }
        if let Some(first) = inputs.first() {
            if let Some(bad) = inputs.iter().find(|x| x.dim() != first.dim()) {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    actual: bad.dim(),
                });
            }
        }
        Ok(Self { inputs, targets })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn tau(&self) -> usize {
        self.len()
    }

    pub fn dim(&self) -> usize {
        self.inputs.first().map_or(0, |x| x.dim())
    }
}

/// The `min(tau, |archive|)` best records, kept in archive order.
pub fn select_training_data(archive: &Archive, tau: usize) -> Result<TrainingSet> {
    if tau == 0 {
        return Err(Error::InvalidParameter("tau must be positive".into()));
    }
    if archive.is_empty() {
        return Err(Error::EmptyArchive);
    }
    let mut chosen = archive.best_indices(tau);
    chosen.sort_unstable();
    let records = archive.records();
    TrainingSet::new(
        chosen.iter().map(|&i| records[i].x.clone()).collect(),
        chosen.iter().map(|&i| records[i].y).collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurrogateKind {
    Rf,
    Gp,
}

impl fmt::Display for SurrogateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurrogateKind::Rf => "RF",
            SurrogateKind::Gp => "GP",
        })
    }
}

impl FromStr for SurrogateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rf" => Ok(SurrogateKind::Rf),
            "gp" => Ok(SurrogateKind::Gp),
            other => Err(Error::InvalidParameter(format!("unknown surrogate `{other}`"))),
        }
    }
}

/// Hyperparameters for both regressor families.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SurrogateSettings {
    pub forest: ForestParams,
    pub gp: GpParams,
}

/// A trained regressor.
#[derive(Debug)]
pub enum SurrogateModel {
    Forest(RandomForest),
    Gp(GaussianProcess),
}

impl SurrogateModel {
    pub fn kind(&self) -> SurrogateKind {
        match self {
            SurrogateModel::Forest(_) => SurrogateKind::Rf,
            SurrogateModel::Gp(_) => SurrogateKind::Gp,
        }
    }

    /// One prediction per input: forest mean or GP posterior mean.
    pub fn predict(&self, xs: &[DecisionVector]) -> Result<Vec<f64>> {
        xs.iter()
            .map(|x| match self {
                SurrogateModel::Forest(m) => m.predict_one(x),
                SurrogateModel::Gp(m) => m.predict_one(x),
            })
            .collect()
    }

    /// Means and standard deviations (across trees for the forest,
    /// posterior for the GP).
    pub fn predict_with_uncertainty(&self, xs: &[DecisionVector]) -> Result<(Vec<f64>, Vec<f64>)> {
        let pairs = xs
            .iter()
            .map(|x| match self {
                SurrogateModel::Forest(m) => m.predict_one_with_std(x),
                SurrogateModel::Gp(m) => m.predict_one_with_std(x),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(pairs.into_iter().unzip())
    }
}

/// Train a surrogate of the requested kind. GP factorization failures are
/// returned as errors; the caller decides on a fallback.
pub fn fit(
    kind: SurrogateKind,
    data: &TrainingSet,
    settings: &SurrogateSettings,
    rng: &RngStream,
) -> Result<SurrogateModel> {
    if data.len() < 2 {
        return Err(Error::NotEnoughIndividuals {
            needed: 2,
            available: data.len(),
        });
    }
    match kind {
        SurrogateKind::Rf => {
            let mut rf = RandomForest::new(settings.forest.clone());
            rf.fit(data, rng)?;
            Ok(SurrogateModel::Forest(rf))
        }
        SurrogateKind::Gp => {
            let mut gp = GaussianProcess::new(settings.gp.clone());
            gp.fit(data)?;
            Ok(SurrogateModel::Gp(gp))
        }
    }
}

/// Offspring indices sorted by prediction, lowest first; ties keep index order.
pub fn rank_by_prediction(predictions: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..predictions.len()).collect();
    order.sort_by(|&a, &b| predictions[a].total_cmp(&predictions[b]));
    order
}

/// Outcome of model-assisted selection.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    /// Offspring index of `O*`.
    pub best_index: usize,
    /// `O*`, tagged with its prediction.
    pub best: Individual,
    /// Offspring indices forming `P_u`, in rank order.
    pub unevaluated_indices: Vec<usize>,
    pub unevaluated: Population,
    pub predictions: Vec<f64>,
}

/// `O*` is the top-ranked offspring; `P_u` the next `N/2` by prediction.
pub fn select_by_predictions(predictions: &[f64]) -> Result<(usize, Vec<usize>)> {
    let n = predictions.len();
    if n < 2 {
        return Err(Error::NotEnoughIndividuals {
            needed: 2,
            available: n,
        });
    }
    let order = rank_by_prediction(predictions);
    Ok((order[0], order[1..=n / 2].to_vec()))
}

/// Predict every offspring, take the best as `O*` and ranks `2..=N/2+1`
/// as the un-evaluated population.
pub fn model_assisted_select(offspring: &Population, model: &SurrogateModel) -> Result<Selection> {
    let xs = offspring.xs();
    let predictions = model.predict(&xs)?;
    let (best_index, unevaluated_indices) = select_by_predictions(&predictions)?;
    let best = Individual::predicted(xs[best_index].clone(), predictions[best_index]);
    let members = unevaluated_indices
        .iter()
        .map(|&i| Individual::predicted(xs[i].clone(), predictions[i]))
        .collect();
    Ok(Selection {
        best_index,
        best,
        unevaluated_indices,
        unevaluated: Population::new(Role::Unevaluated, members)?,
        predictions,
    })
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub(crate) fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Expected improvement below `best` for a Gaussian prediction
/// (minimization).
pub fn expected_improvement(mean: f64, stddev: f64, best: f64) -> f64 {
    let gain = best - mean;
    if stddev <= 0.0 {
        return gain.max(0.0);
    }
    let z = gain / stddev;
    (gain * std_normal_cdf(z) + stddev * std_normal_pdf(z)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dv(v: &[f64]) -> DecisionVector {
        DecisionVector::new(v.to_vec()).unwrap()
    }

    fn archive_of(values: &[f64]) -> Archive {
        let mut a = Archive::new();
        for (i, &y) in values.iter().enumerate() {
            a.insert(dv(&[i as f64]), y).unwrap();
        }
        a
    }

    #[test]
    fn training_set_smaller_archive() {
        let ts = select_training_data(&archive_of(&[3.0, 1.0, 2.0]), 10).unwrap();
        assert_eq!(ts.tau(), 3);
    }

    #[test]
    fn training_set_rank_selection() {
        let ts = select_training_data(&archive_of(&[9.0, 2.0, 5.0]), 2).unwrap();
        assert_eq!(ts.targets, vec![2.0, 5.0]);
    }

    #[test]
    fn training_set_cutoff_ties() {
        let ts = select_training_data(&archive_of(&[4.0, 1.0, 4.0, 4.0]), 2).unwrap();
        assert_eq!(ts.targets, vec![4.0, 1.0]);
        assert_eq!(ts.inputs[0].as_slice(), &[0.0]);
    }

    #[test]
    fn training_set_errors() {
        assert!(select_training_data(&archive_of(&[1.0]), 0).is_err());
        assert_eq!(select_training_data(&Archive::new(), 3), Err(Error::EmptyArchive));
    }

    #[test]
    fn selection_rank_rule() {
        let (best, pu) = select_by_predictions(&[3.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(best, 1);
        assert_eq!(pu, vec![2, 0]);
    }

    #[test]
    fn selection_ties() {
        let (best, pu) = select_by_predictions(&[5.0; 6]).unwrap();
        assert_eq!(best, 0);
        assert_eq!(pu, vec![1, 2, 3]);
    }

    #[test]
    fn ei_closed_form() {
        assert_eq!(expected_improvement(2.0, 0.0, 1.0), 0.0);
        assert_eq!(expected_improvement(0.0, 0.0, 1.0), 1.0);
        let at_zero = expected_improvement(1.0, 1.0, 1.0);
        assert!((at_zero - 0.398_942_280_401_432_7).abs() < 1e-12);
    }

    #[test]
    fn forest_model_through_enum() {
        let ts = TrainingSet::new(vec![dv(&[0.0]), dv(&[1.0]), dv(&[2.0])], vec![1.0, 5.0, 3.0]).unwrap();
        let settings = SurrogateSettings {
            forest: ForestParams::single_exact_tree(),
            ..SurrogateSettings::default()
        };
        let m = fit(SurrogateKind::Rf, &ts, &settings, &RngStream::new(0)).unwrap();
        assert_eq!(m.predict(&ts.inputs).unwrap(), ts.targets);
        let (_, sd) = m.predict_with_uncertainty(&ts.inputs).unwrap();
        assert!(sd.iter().all(|&s| s == 0.0));
        let sel = model_assisted_select(&Population::offspring(ts.inputs.clone()), &m).unwrap();
        assert_eq!(sel.best_index, 0);
        assert_eq!(sel.unevaluated_indices, vec![2]);
        assert_eq!(sel.unevaluated.role(), Role::Unevaluated);
    }

    #[test]
    fn permuted_inputs_permute_predictions() {
        let ts = TrainingSet::new(
            (0..20).map(|i| dv(&[i as f64 * 0.3, (i % 7) as f64])).collect(),
            (0..20).map(|i| (i as f64 * 0.7).cos()).collect(),
        )
        .unwrap();
        for kind in [SurrogateKind::Rf, SurrogateKind::Gp] {
            let m = fit(kind, &ts, &SurrogateSettings::default(), &RngStream::new(3)).unwrap();
            let xs: Vec<DecisionVector> = (0..5).map(|i| dv(&[i as f64, 1.0])).collect();
            let mut rev = xs.clone();
            rev.reverse();
            let mut a = m.predict(&xs).unwrap();
            a.reverse();
            assert_eq!(a, m.predict(&rev).unwrap());
        }
    }

    proptest! {
        #[test]
        fn ei_nonnegative(mean in -10.0f64..10.0, sd in 0.0f64..5.0, best in -10.0f64..10.0) {
            prop_assert!(expected_improvement(mean, sd, best) >= 0.0);
        }

        #[test]
        fn selection_rank_invariant(
            preds in prop::collection::vec(-100.0f64..100.0, 1..40),
            scale in 0.01f64..10.0,
            shift in -50.0f64..50.0,
        ) {
            let n = preds.len() * 2;
            let mut full = preds.clone();
            full.extend(preds.iter().map(|p| p * 0.5 + 3.0));
            let (b1, u1) = select_by_predictions(&full).unwrap();
            let monotone: Vec<f64> = full.iter().map(|p| scale * p + shift).collect();
            let (b2, u2) = select_by_predictions(&monotone).unwrap();
            prop_assert_eq!(b1, b2);
            prop_assert_eq!(&u1, &u2);
            prop_assert_eq!(u1.len(), n / 2);
            prop_assert!(!u1.contains(&b1));
        }
    }
}
