use thiserror::Error;

/// Errors raised by the state, measure and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystems(String),

    #[error("rank {rank} out of range for dimension {dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("decomposition size {size} is below the state rank {rank}")]
    DecompositionTooSmall { size: usize, rank: usize },

    #[error("decomposition does not reconstruct the state (residual {0:e})")]
    ReconstructionMismatch(f64),

    #[error("mixing weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),

    #[error("Kraus operators violate completeness (largest eigenvalue of sum M^dag M is {0})")]
    KrausCompleteness(f64),

    #[error("POVM elements do not sum to identity (deviation {0:e})")]
    PovmCompleteness(f64),

    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dims_mismatch(expected: impl Into<String>, actual: &[usize]) -> Error {
    Error::DimensionMismatch {
        expected: expected.into(),
        actual: format!("{actual:?}"),
    }
}
