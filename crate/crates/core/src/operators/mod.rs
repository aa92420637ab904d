//! Reproduction operators.
//!
//! Each family (GA, DE, EDA) comes in two forms: a plain operator over the
//! evaluated parents only, and an un-evaluated-aware operator
//! `Rep(P_e, P_u, N)` that mixes surrogate-screened solutions into the
//! parent pool. With `P_u` empty the two forms consume randomness
//! identically and return the same offspring.

mod de;
mod eda;
mod ga;

pub use de::{
    boundary_repair, de_crossover, de_mutant, de_plain, de_reproduce, DeParams, DeVariant,
};
pub use eda::{eda_plain, eda_reproduce, vwh_build, vwh_sample, EdaParams, Histogram, VwhModel};
pub use ga::{
    ga_plain, ga_reproduce, polynomial_mutation, sbx_crossover, tournament_select, GaParams,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::RngStream;
use crate::types::{Bounds, Population};

/// A configured reproduction operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Operator {
    Ga(GaParams),
    /// DE followed by polynomial mutation with `mutation`'s PM settings.
    De {
        de: DeParams,
        mutation: GaParams,
    },
    Eda(EdaParams),
}

impl std::str::FromStr for Operator {
    type Err = crate::error::Error;

    /// `ga`, `de` or `eda` with default parameters.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ga" => Ok(Operator::ga()),
            "de" => Ok(Operator::de()),
            "eda" => Ok(Operator::eda()),
            other => Err(crate::error::Error::InvalidParameter(format!("unknown operator `{other}`"))),
        }
    }
}

impl Operator {
    pub fn ga() -> Self {
        Operator::Ga(GaParams::default())
    }

    pub fn de() -> Self {
        Operator::De {
            de: DeParams::default(),
            mutation: GaParams::default(),
        }
    }

    pub fn eda() -> Self {
        Operator::Eda(EdaParams::default())
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            Operator::Ga(_) => "GA",
            Operator::De { .. } => "DE",
            Operator::Eda(_) => "EDA",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Operator::Ga(p) => p.validate(),
            Operator::De { de, mutation } => {
                de.validate()?;
                mutation.validate()
            }
            Operator::Eda(p) => p.validate(),
        }
    }

    /// Smallest `|P_e|` the operator can work with.
    pub fn min_parents(&self) -> usize {
        match self {
            Operator::Ga(_) => 1,
            Operator::De { .. } => 6,
            Operator::Eda(_) => 2,
        }
    }

    /// `Rep(P_e, P_u, N)`.
    pub fn reproduce(
        &self,
        evaluated: &Population,
        unevaluated: &Population,
        n: usize,
        bounds: &Bounds,
        rng: &mut RngStream,
    ) -> Result<Population> {
        match self {
            Operator::Ga(p) => ga_reproduce(evaluated, unevaluated, n, p, bounds, rng),
            Operator::De { de, mutation } => {
                de_reproduce(evaluated, unevaluated, n, de, mutation, bounds, rng)
            }
            Operator::Eda(p) => eda_reproduce(evaluated, unevaluated, n, p, bounds, rng),
        }
    }

    /// The classic operator on `P_e` alone.
    pub fn reproduce_plain(
        &self,
        evaluated: &Population,
        n: usize,
        bounds: &Bounds,
        rng: &mut RngStream,
    ) -> Result<Population> {
        match self {
            Operator::Ga(p) => ga_plain(evaluated, n, p, bounds, rng),
            Operator::De { de, mutation } => de_plain(evaluated, n, de, mutation, bounds, rng),
            Operator::Eda(p) => eda_plain(evaluated, n, p, bounds, rng),
        }
    }
}
