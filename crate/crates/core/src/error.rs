use thiserror::Error;

use crate::conic::SolveStatus;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// The SINR targets cannot be met within the power budget.
    #[error("scenario infeasible: {0}")]
    Infeasible(String),

    /// A cone program inside an optimization step did not reach optimality.
    #[error("{step} failed: solver status {status:?} (pres {pres:.2e}, dres {dres:.2e}, gap {gap:.2e})")]
    StepFailed {
        step: String,
        status: SolveStatus,
        pres: f64,
        dres: f64,
        gap: f64,
    },

    #[error("oracle refused: {0}")]
    OracleRefused(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
