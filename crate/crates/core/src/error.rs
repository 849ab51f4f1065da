use alloc::string::String;

/// Errors raised by estimators, generators and the pipeline.
///
/// Conditions under which an estimator merely fails to produce an
/// interpretable number are usually reported as an [`crate::IdEstimate`]
/// with `valid == false` instead; [`IdError::InvalidEstimate`] is used where
/// an operation needs a valid estimate to continue.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IdError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("degenerate spectrum: eigenvalues sum to zero")]
    DegenerateSpectrum,
    #[error("invalid estimate: {0}")]
    InvalidEstimate(String),
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
}

pub type Result<T> = core::result::Result<T, IdError>;

pub(crate) fn param_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(IdError::Parameter(msg.into()))
}
