use thiserror::Error;

/// Errors raised by the solvers, the prior and the ensemble iteration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("regularization failure after {tried} trials (last acceptance ratio {last_ratio:.6e})")]
    RegularizationFailure { tried: usize, last_ratio: f64 },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("forward evaluation failed for particle {particle}: {message}")]
    ForwardFailure { particle: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfiguration(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::NumericalFailure(msg.into())
    }
}
