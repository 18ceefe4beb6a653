use std::io;

use thiserror::Error;

/// Errors raised by the operator builders, the spectral routines and the estimators.
#[derive(Debug, Error)]
pub enum Error {
    /// A requested matrix dimension exceeds the configured cap.
    #[error("dimension {required} exceeds the cap of {cap}")]
    Size { required: usize, cap: usize },

    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An operator handed to a routine does not satisfy its contract
    /// (for example a non-Hermitian matrix passed to the eigensolver).
    #[error("contract violated: {0}")]
    Contract(String),

    /// Exact integer arithmetic overflowed.
    #[error("integer overflow: {0}")]
    Range(String),

    #[error("malformed operator dump: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
