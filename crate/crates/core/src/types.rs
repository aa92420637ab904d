//! Foundational data types: decision vectors, bounds, individuals,
//! populations and the evaluation archive.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the decision space. All components are finite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DecisionVector(Vec<f64>);

impl DecisionVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteComponent { index });
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    // Callers guarantee finiteness (outputs of clamped arithmetic on finite inputs).
    pub(crate) fn from_finite(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self(values)
    }
}

impl Deref for DecisionVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for DecisionVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<DecisionVector> for Vec<f64> {
    fn from(x: DecisionVector) -> Vec<f64> {
        x.0
    }
}

/// Axis-aligned box `[lower_i, upper_i]` with `lower_i < upper_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        for (index, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidBounds {
                    index,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval in every one of `dim` coordinates.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// Returns an error naming the first violated coordinate.
    pub fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        for (index, &value) in x.iter().enumerate() {
            let (lower, upper) = (self.lower[index], self.upper[index]);
            if !(value >= lower && value <= upper) {
                return Err(Error::OutOfBounds {
                    index,
                    value,
                    lower,
                    upper,
                });
            }
        }
        Ok(())
    }
}

/// Fitness record of an individual. The tag keeps true evaluations and
/// surrogate predictions apart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Fitness {
    Evaluated(f64),
    Predicted(f64),
    Absent,
}

impl Fitness {
    /// The numeric value used for ranking, regardless of its origin.
    pub fn value(&self) -> Option<f64> {
        match *self {
            Fitness::Evaluated(v) | Fitness::Predicted(v) => Some(v),
            Fitness::Absent => None,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Fitness::Evaluated(_) => "evaluated",
            Fitness::Predicted(_) => "predicted",
            Fitness::Absent => "absent",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    x: DecisionVector,
    fitness: Fitness,
}

impl Individual {
    pub fn new(x: DecisionVector) -> Self {
        Self {
            x,
            fitness: Fitness::Absent,
        }
    }

    pub fn evaluated(x: DecisionVector, value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFiniteObjective(value));
        }
        Ok(Self {
            x,
            fitness: Fitness::Evaluated(value),
        })
    }

    pub fn predicted(x: DecisionVector, value: f64) -> Self {
        Self {
            x,
            fitness: Fitness::Predicted(value),
        }
    }

    pub fn x(&self) -> &DecisionVector {
        &self.x
    }

    pub fn fitness(&self) -> Fitness {
        self.fitness
    }

    pub fn into_x(self) -> DecisionVector {
        self.x
    }

    /// Attach a surrogate prediction. Evaluated fitness cannot be overwritten.
    pub fn set_prediction(&mut self, value: f64) -> Result<()> {
        if matches!(self.fitness, Fitness::Evaluated(_)) {
            return Err(Error::ImmutableFitness);
        }
        self.fitness = Fitness::Predicted(value);
        Ok(())
    }
}

/// What a population represents inside the main loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    /// `P_e`: truly evaluated parents.
    Evaluated,
    /// `P_u`: surrogate-screened, never evaluated.
    Unevaluated,
    /// `O`: freshly generated offspring.
    Offspring,
}

impl Role {
    fn name(&self) -> &'static str {
        match self {
            Role::Evaluated => "evaluated",
            Role::Unevaluated => "unevaluated",
            Role::Offspring => "offspring",
        }
    }

    fn admits(&self, fitness: &Fitness) -> bool {
        match self {
            Role::Evaluated => matches!(fitness, Fitness::Evaluated(_)),
            Role::Unevaluated => matches!(fitness, Fitness::Predicted(_)),
            Role::Offspring => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Population {
    role: Role,
    members: Vec<Individual>,
}

impl Population {
    pub fn new(role: Role, members: Vec<Individual>) -> Result<Self> {
        for m in &members {
            if !role.admits(&m.fitness) {
                return Err(Error::RoleMismatch {
                    role: role.name(),
                    fitness: m.fitness.kind(),
                });
            }
        }
        Ok(Self { role, members })
    }

    pub fn empty(role: Role) -> Self {
        Self {
            role,
            members: Vec::new(),
        }
    }

    /// Offspring population with absent fitness.
    pub fn offspring(xs: Vec<DecisionVector>) -> Self {
        Self {
            role: Role::Offspring,
            members: xs.into_iter().map(Individual::new).collect(),
        }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, i: usize) -> &Individual {
        &self.members[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Individual> {
        self.members.iter()
    }

    pub fn xs(&self) -> Vec<DecisionVector> {
        self.members.iter().map(|m| m.x.clone()).collect()
    }

    pub fn into_members(self) -> Vec<Individual> {
        self.members
    }

    /// Fitness values for ranking; fails on the first member without one.
    pub fn fitness_values(&self) -> Result<Vec<f64>> {
        self.members
            .iter()
            .enumerate()
            .map(|(index, m)| m.fitness.value().ok_or(Error::MissingFitness { index }))
            .collect()
    }
}

/// One truly evaluated point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub x: DecisionVector,
    pub y: f64,
}

/// Append-only log of every real evaluation. `fes()` is the record count.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Archive {
    records: Vec<Record>,
}

impl Archive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, x: DecisionVector, y: f64) -> Result<()> {
        if !y.is_finite() {
            return Err(Error::NonFiniteObjective(y));
        }
        self.records.push(Record { x, y });
        Ok(())
    }

    /// Number of evaluations performed so far.
    pub fn fes(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn best(&self) -> Option<&Record> {
        // first minimum wins on ties
        self.records
            .iter()
            .fold(None, |best: Option<&Record>, r| match best {
                Some(b) if b.y <= r.y => Some(b),
                _ => Some(r),
            })
    }

    /// Indices of the `k` smallest records, ascending by value, earlier
    /// insertion first on ties.
    pub fn best_indices(&self, k: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.records.len()).collect();
        // stable sort keeps insertion order among equal values
        idx.sort_by(|&a, &b| self.records[a].y.total_cmp(&self.records[b].y));
        idx.truncate(k);
        idx
    }
}

/// The `n` best archive records as an evaluated population, ascending by
/// objective. Returns all records when the archive holds fewer than `n`.
pub fn population_update(archive: &Archive, n: usize) -> Result<Population> {
    if n == 0 {
        return Err(Error::InvalidParameter("population size must be positive".into()));
    }
    if archive.is_empty() {
        return Err(Error::EmptyArchive);
    }
    let members = archive
        .best_indices(n)
        .into_iter()
        .map(|i| {
            let r = &archive.records()[i];
            Individual {
                x: r.x.clone(),
                fitness: Fitness::Evaluated(r.y),
            }
        })
        .collect();
    Ok(Population {
        role: Role::Evaluated,
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn decision_vector_rejects_nan() {
        assert_eq!(
            DecisionVector::new(vec![0.0, f64::NAN]),
            Err(Error::NonFiniteComponent { index: 1 })
        );
        assert!(DecisionVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn bounds_invariants() {
        assert!(Bounds::new(vec![0.0], vec![0.0]).is_err());
        assert!(Bounds::new(vec![1.0], vec![0.0]).is_err());
        assert!(Bounds::new(vec![0.0, 0.0], vec![1.0]).is_err());
        let b = Bounds::uniform(2, -1.0, 1.0).unwrap();
        assert!(b.contains(&[1.0, -1.0]));
        assert!(!b.contains(&[1.5, 0.0]));
        assert!(matches!(b.check(&[0.0, 2.0]), Err(Error::OutOfBounds { index: 1, .. })));
    }

    #[test]
    fn archive_insert_counts() {
        let mut a = Archive::new();
        a.insert(dv(&[0.0]), 3.0).unwrap();
        assert_eq!(a.fes(), 1);
        assert_eq!(a.records().len(), 1);
        for k in 0..5 {
            a.insert(dv(&[k as f64]), 1.0).unwrap();
        }
        assert_eq!(a.fes(), 6);
    }

    #[test]
    fn archive_rejects_non_finite() {
        let mut a = Archive::new();
        let err = a.insert(dv(&[0.0]), f64::NAN).unwrap_err();
        assert!(err.to_string().contains("non-finite objective"));
        assert!(matches!(a.insert(dv(&[0.0]), f64::INFINITY), Err(Error::NonFiniteObjective(_))));
        assert_eq!(a.fes(), 0);
    }

    #[test]
    fn update_selects_best_ascending() {
        let pop = population_update(&archive_of(&[5.0, 1.0, 3.0]), 2).unwrap();
        assert_eq!(pop.fitness_values().unwrap(), vec![1.0, 3.0]);
        assert_eq!(pop.role(), Role::Evaluated);
    }

    #[test]
    fn update_ties_by_insertion_order() {
        let pop = population_update(&archive_of(&[1.0, 1.0, 1.0]), 2).unwrap();
        assert_eq!(pop.get(0).x().as_slice(), &[0.0]);
        assert_eq!(pop.get(1).x().as_slice(), &[1.0]);
    }

    #[test]
    fn update_truncates_to_archive_size() {
        let pop = population_update(&archive_of(&[2.0, 1.0, 3.0]), 10).unwrap();
        assert_eq!(pop.len(), 3);
    }

    #[test]
    fn update_errors() {
        assert!(population_update(&archive_of(&[1.0]), 0).is_err());
        assert_eq!(population_update(&Archive::new(), 3), Err(Error::EmptyArchive));
    }

    #[test]
    fn role_invariants() {
        let ev = Individual::evaluated(dv(&[0.0]), 1.0).unwrap();
        let pr = Individual::predicted(dv(&[0.0]), 1.0);
        assert!(Population::new(Role::Evaluated, vec![pr.clone()]).is_err());
        assert!(Population::new(Role::Unevaluated, vec![ev.clone()]).is_err());
        assert!(Population::new(Role::Offspring, vec![ev, pr]).is_ok());
    }

    #[test]
    fn evaluated_fitness_is_immutable() {
        let mut ev = Individual::evaluated(dv(&[0.0]), 1.0).unwrap();
        assert_eq!(ev.set_prediction(0.5), Err(Error::ImmutableFitness));
        let mut fresh = Individual::new(dv(&[0.0]));
        fresh.set_prediction(0.5).unwrap();
        assert_eq!(fresh.fitness(), Fitness::Predicted(0.5));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn archive_min_is_non_increasing(values in prop::collection::vec(-1e6f64..1e6, 1..60)) {
                let mut a = Archive::new();
                let mut last = f64::INFINITY;
                for (i, y) in values.into_iter().enumerate() {
                    a.insert(dv(&[i as f64]), y).unwrap();
                    let best = a.best().unwrap().y;
                    prop_assert!(best <= last);
                    last = best;
                }
            }

            #[test]
            fn update_is_idempotent(values in prop::collection::vec(-10f64..10.0, 1..40), n in 1usize..50) {
                let a = archive_of(&values);
                let p1 = population_update(&a, n).unwrap();
                let p2 = population_update(&a, n).unwrap();
                prop_assert_eq!(&p1, &p2);
                let vals = p1.fitness_values().unwrap();
                prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
                prop_assert_eq!(p1.len(), n.min(values.len()));
            }
        }
    }
}
