use thiserror::Error;

/// Errors produced by the model, solvers and experiment runners.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid `{param}`: {reason}")]
    Domain { param: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("kernel rejected: {0}")]
    InvalidKernel(String),

    #[error("no convergence after {iterations} iterations (last residual {residual:.3e})")]
    Convergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("grid too short: {0}")]
    Truncation(String),

    #[error("stability bound violated: dt = {dt:.3e} exceeds {bound:.3e}")]
    Stability { dt: f64, bound: f64 },

    #[error("negative density {value:.3e} at type {type_index}, node {node}, t = {time}")]
    NegativeDensity {
        type_index: usize,
        node: usize,
        time: f64,
        value: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("check `{name}` failed: {detail}")]
    CheckFailed { name: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(param: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        param,
        reason: reason.into(),
    }
}
