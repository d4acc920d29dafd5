//! Error types shared across the crate.

use thiserror::Error;

use crate::vallee_poussin::BreakpointSequence;

/// Invalid parameters for a law, family, or grid.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("empirical law needs at least one sample")]
    EmptySamples,
    #[error("survival table: {0}")]
    BadTable(String),
    #[error("index window [{min}, {max}] is invalid: {reason}")]
    BadWindow {
        min: u64,
        max: u64,
        reason: &'static str,
    },
    #[error("grid: {0}")]
    BadGrid(String),
}

/// Adaptive quadrature failed to reach the requested tolerance.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("quadrature on [{lower}, {upper}] did not converge: value {value}, error estimate {error} after {intervals} intervals")]
pub struct QuadratureError {
    pub lower: f64,
    pub upper: f64,
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// Failures of the truncated-moment functionals.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TruncationError {
    #[error("closed form for `{functional}` is not available for {variant} laws")]
    Unsupported {
        functional: &'static str,
        variant: &'static str,
    },
    #[error("invalid argument `{name}` = {value}: {reason}")]
    InvalidArgument {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Failures of the Vallée-Poussin construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error("breakpoint search exhausted its budget of {budget} at block {block} (partial sequence {partial:?}, stalled block sum {stalled_sum})")]
    BudgetExhausted {
        budget: u64,
        block: usize,
        partial: BreakpointSequence,
        block_sums: Vec<f64>,
        stalled_sum: f64,
    },
    #[error("invalid breakpoints: {0}")]
    BadBreakpoints(String),
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },
}

/// Crate-level error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Truncation(#[from] TruncationError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error("io: {0}")]
    Io(String),
}

impl From<QuadratureError> for Error {
    fn from(e: QuadratureError) -> Self {
        Error::Truncation(TruncationError::Quadrature(e))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
