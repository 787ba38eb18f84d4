use thiserror::Error;

/// Errors produced by the ratio pipeline, the estimators and the oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TvError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid ratio: {0}")]
    InvalidRatio(String),

    #[error("size limit exceeded: {what} needs {needed}, cap is {cap}")]
    Size {
        what: &'static str,
        needed: u128,
        cap: u128,
    },
}

pub type Result<T> = std::result::Result<T, TvError>;

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(TvError::Dimension { expected, actual })
    }
}
