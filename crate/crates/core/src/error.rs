use thiserror::Error;

use crate::quadrature::QuadResult;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "quadrature budget exhausted after {} evaluations (best value {} +/- {})",
        .0.evaluations, .0.value, .0.err_bound
    )]
    QuadratureBudget(QuadResult),

    #[error("simulation budget exceeded: {0}")]
    SimulationBudget(String),

    #[error("limit characteristic function does not exist: {0}")]
    Divergence(String),

    #[error("operation requires a stationary measure: {0}")]
    NotStationary(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
