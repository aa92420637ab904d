use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite objective value {0} (evaluation fault)")]
    NonFiniteObjective(f64),

    #[error("non-finite component at index {index}")]
    NonFiniteComponent { index: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid bounds at dimension {index}: lower {lower} must be < upper {upper}")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },

    #[error("component {index} = {value} lies outside [{lower}, {upper}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("problem `{0}` is excluded by suite definition")]
    ExcludedProblem(String),

    #[error("empty archive")]
    EmptyArchive,

    #[error("population member {index} has no fitness")]
    MissingFitness { index: usize },

    #[error("population role {role} cannot hold a member with {fitness} fitness")]
    RoleMismatch {
        role: &'static str,
        fitness: &'static str,
    },

    #[error("evaluated fitness is immutable")]
    ImmutableFitness,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not enough individuals: need {needed}, have {available}")]
    NotEnoughIndividuals { needed: usize, available: usize },

    #[error("model has not been trained")]
    Untrained,

    #[error("kernel matrix factorization failed at jitter {jitter:e}")]
    Factorization { jitter: f64 },

    #[error("io error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Format(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Format(err.to_string())
    }
}
