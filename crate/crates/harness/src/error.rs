use thiserror::Error;

/// Harness failure, tagged with the pipeline stage that raised it.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{stage}: {message}")]
    Validation { stage: String, message: String },

    #[error("{stage}: {message}")]
    Numerical { stage: String, message: String },

    #[error("{stage}: {message}")]
    NotConverged { stage: String, message: String },

    #[error("{stage}: {message}")]
    Io { stage: String, message: String },

    #[error("verification failed: {0}")]
    Verification(String),
}

impl HarnessError {
    pub fn validation(stage: &str, message: impl Into<String>) -> Self {
        HarnessError::Validation { stage: stage.into(), message: message.into() }
    }

    pub fn io(stage: &str, err: impl std::fmt::Display) -> Self {
        HarnessError::Io { stage: stage.into(), message: err.to_string() }
    }

    /// Process exit status: 2 validation, 3 numerical, 4 not converged.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation { .. } => 2,
            HarnessError::Numerical { .. } | HarnessError::Verification(_) | HarnessError::Io { .. } => 3,
            HarnessError::NotConverged { .. } => 4,
        }
    }
}

pub type HarnessResult<T> = Result<T, HarnessError>;

pub trait Staged<T> {
    fn stage(self, stage: &str) -> HarnessResult<T>;
}

impl<T> Staged<T> for subdiff::Result<T> {
    fn stage(self, stage: &str) -> HarnessResult<T> {
        use subdiff::Error as E;
        self.map_err(|e| {
            let message = e.to_string();
            let stage = stage.to_string();
            match e {
                E::InvalidParameter(_) | E::InvalidInput(_) | E::InvalidConfiguration(_) | E::DegenerateConfiguration(_) => {
                    HarnessError::Validation { stage, message }
                }
                E::NumericalFailure(_)
                | E::RegularizationFailure { .. }
                | E::UndefinedMetric(_)
                | E::ForwardFailure { .. } => HarnessError::Numerical { stage, message },
            }
        })
    }
}
