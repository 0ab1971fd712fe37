use thiserror::Error;

use crate::formats::{ParseError, SidecarError};

/// Errors produced by the gmkit library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("metadata mismatch: {0}")]
    MetadataMismatch(String),
    #[error("value outside function domain: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Sidecar(#[from] SidecarError),
}

impl Error {
    /// True for errors caused by mismatched inputs (shape or metadata), as
    /// opposed to malformed arguments or files.
    pub fn is_contract_violation(&self) -> bool {
        matches!(self, Error::DimensionMismatch { .. } | Error::MetadataMismatch(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dims(expected: (usize, usize), found: (usize, usize)) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
