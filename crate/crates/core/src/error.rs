//! Crate-wide error type.

use crate::hilbert::Subsystem;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("subsystem {0:?} is not declared in this space")]
    MissingSubsystem(Subsystem),

    #[error("no cavity factor declared in this space")]
    NoCavity,

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("degenerate Liouvillian kernel ({dim} stationary directions)")]
    DegenerateKernel { dim: usize },

    #[error("undefined observable: {0}")]
    Undefined(String),

    #[error("regime violated: {0}")]
    RegimeViolated(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("linear algebra error: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
