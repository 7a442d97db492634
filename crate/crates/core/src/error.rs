use thiserror::Error;

/// Errors raised by the numerical kernels, solvers and checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain the operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// The result does not fit in an `f64`.
    #[error("overflow: {0}")]
    Overflow(String),

    /// An interval was given with its endpoints reversed.
    #[error("ordering error: t_hi = {hi} < t_lo = {lo}")]
    Ordering { lo: f64, hi: f64 },

    /// An index is outside the admissible range.
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    /// Coefficients violate ellipticity, sign or shape requirements.
    #[error("invalid coefficients: {0}")]
    Coefficients(String),

    /// Two fields or signals live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A linear system could not be solved.
    #[error("singular system at step {step}: {detail}")]
    Singular { step: usize, detail: String },

    /// The eigensolver did not converge.
    #[error("eigensolver failed: {0}")]
    Eigen(String),

    /// Picard sweeps stopped contracting or ran out of budget.
    #[error("fixed-point iteration failed after {} sweeps: {reason}", history.len())]
    NonContraction { reason: String, history: Vec<f64> },

    /// A hypothesis required by a check does not hold on the instance.
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
