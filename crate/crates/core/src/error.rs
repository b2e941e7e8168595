use thiserror::Error;

/// Failures reported by the lattice, solvers, estimators and certificates.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("kernel is not resolvable on the grid: {0}")]
    UnresolvableKernel(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("time series does not cover [0, {required}] (ends at {available})")]
    Coverage { required: f64, available: f64 },

    #[error(
        "estimator overflow at grid point {point}: path stream {stream_index} has exponent {exponent} over horizon {horizon}"
    )]
    EstimatorOverflow {
        point: usize,
        stream_index: u64,
        exponent: f64,
        horizon: f64,
    },

    #[error("fixed-point iteration did not converge after {} iterations (last change {:e})", history.len(), history.last().copied().unwrap_or(f64::NAN))]
    ConvergenceFailure { history: Vec<f64> },

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("step size too large: {0}")]
    StepSize(String),

    #[error("numerical instability at t = {t}: sup norm {sup_norm} exceeds {limit}")]
    Instability { t: f64, sup_norm: f64, limit: f64 },

    #[error("positivity violated at t = {t}: min value {min}")]
    PositivityViolation { t: f64, min: f64 },

    #[error("rate function is not monotone along the envelope at block {block}: p = {previous} then {next}")]
    InvalidRateFunction {
        block: usize,
        previous: f64,
        next: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
