use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by the numerical routines.
///
/// Every variant has a stable short name (see [`Error::name`]) which the CLI
/// prints so scripts can match on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("circle map is not a diffeomorphism (min derivative {min_derivative:.3e})")]
    NotADiffeomorphism { min_derivative: f64 },

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("invalid regularity index {0} (must be >= 0)")]
    InvalidRegularity(f64),

    #[error("truncation orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },

    #[error("Fourier mode counts differ ({left} vs {right})")]
    ModeMismatch { left: usize, right: usize },

    #[error("operation requires winding 0 operands")]
    WindingMismatch,

    #[error("frame DW is singular: min |det| = {min_det:.3e}")]
    SingularFrame { min_det: f64 },

    #[error("model evaluation left its domain: {0}")]
    DomainError(String),

    #[error("twisted cohomological equation is not contracting (norm {norm:.6})")]
    NotContracting { norm: f64 },

    #[error("small divisor |1 - exp(2 pi i k omega)| = {divisor:.3e} at mode {mode}")]
    SmallDivisorOverflow { mode: usize, divisor: f64 },

    #[error("lambda must be positive on the grid (min {min:.3e})")]
    NonPositiveLambda { min: f64 },

    #[error("no convergence after {iters} iterations (residual {residual:.3e})")]
    MaxItersExceeded { iters: usize, residual: f64 },

    #[error("no attracting circle found: {0}")]
    NoAttractorFound(String),

    #[error("stable bundle iteration stalled after {iters} iterations (change {change:.3e})")]
    BundleIterationStalled { iters: usize, change: f64 },

    #[error("continuation step {step:.3e} fell below the floor at parameter {at}")]
    StepTooSmall { step: f64, at: f64 },

    #[error("unknown model '{0}'")]
    UnknownModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotADiffeomorphism { .. } => "NotADiffeomorphism",
            Error::NoConvergence(_) => "NoConvergence",
            Error::InvalidRegularity(_) => "InvalidRegularity",
            Error::OrderMismatch { .. } => "OrderMismatch",
            Error::ModeMismatch { .. } => "ModeMismatch",
            Error::WindingMismatch => "WindingMismatch",
            Error::SingularFrame { .. } => "SingularFrame",
            Error::DomainError(_) => "DomainError",
            Error::NotContracting { .. } => "NotContracting",
            Error::SmallDivisorOverflow { .. } => "SmallDivisorOverflow",
            Error::NonPositiveLambda { .. } => "NonPositiveLambda",
            Error::MaxItersExceeded { .. } => "MaxItersExceeded",
            Error::NoAttractorFound(_) => "NoAttractorFound",
            Error::BundleIterationStalled { .. } => "BundleIterationStalled",
            Error::StepTooSmall { .. } => "StepTooSmall",
            Error::UnknownModel(_) => "UnknownModel",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
