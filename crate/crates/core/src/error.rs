use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Error)]
pub enum PxError {
    #[error("exponent out of range: p = {value} at node {location} (require 1 < p < inf)")]
    ExponentOutOfRange { value: f64, location: String },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("expression error: {0}")]
    Expr(String),

    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("scale parameter must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("exponent must exceed 1, got {0}")]
    ExponentTooSmall(f64),

    #[error("function is identically zero")]
    ZeroFunction,

    #[error("gradient is identically zero")]
    ZeroGradient,

    #[error("theorem bounds unavailable: {0}")]
    BoundsUnavailable(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("empty test basis")]
    EmptyBasis,

    #[error("{0}")]
    Precondition(String),

    #[error("shooting failed to bracket eigenvalue {j} (resolution too coarse)")]
    ShootingBracket { j: usize },

    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),
}

pub type Result<T> = std::result::Result<T, PxError>;
