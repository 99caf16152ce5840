use thiserror::Error;

use crate::fock::{NamedLabel, Statistics};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state {label} does not exist for {statistics}")]
    InvalidForStatistics {
        label: NamedLabel,
        statistics: Statistics,
    },

    #[error("two fermions cannot occupy the same mode")]
    PauliViolation,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("missing parameter `{parameter}` for element {kind}")]
    MissingParameter {
        kind: &'static str,
        parameter: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("not a valid density operator: {0}")]
    NotDensityOperator(String),

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("state has support outside the one-particle-per-mode subspace (deviation {0:e})")]
    SupportOutsideLR(f64),

    #[error("labeled state is not in the expected symmetry sector (deviation {0:e})")]
    WrongSymmetrySector(f64),

    #[error("invalid protocol scheme: {0}")]
    InvalidScheme(String),

    #[error("cannot parse {what} from `{input}`")]
    Parse { what: &'static str, input: String },
}

pub type Result<T> = std::result::Result<T, Error>;
