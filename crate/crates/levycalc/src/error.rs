use thiserror::Error;

/// Errors raised by measure validation, quadrature, operator application and
/// simulation.
#[derive(Debug, Clone, Error)]
pub enum LevyError {
    #[error("Levy measure is not integrable: {0}")]
    NonIntegrableMeasure(String),

    #[error("quadrature failed to reach tolerance: {0}")]
    QuadratureFailure(String),

    #[error("operator domain violation: {0}")]
    DomainViolation(String),

    #[error("measure is not selfdecomposable: {0}")]
    NotSelfdecomposable(String),

    #[error("measure is not in the operator range: {0}")]
    NotInRange(String),

    #[error("unsupported measure representation: {0}")]
    UnsupportedRepresentation(String),

    #[error("class tests disagree: {0}")]
    ClassificationConflict(String),

    #[error("scale factor must be nonnegative, got {0}")]
    NegativeScale(f64),

    #[error("jump intensity above the cutoff is not finite: {0}")]
    InfiniteIntensity(String),

    #[error("path horizon does not cover the requested interval: {0}")]
    CoverageError(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at column {column}: {message}")]
    ParseError { column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, LevyError>;
