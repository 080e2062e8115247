//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The request exceeds a hard size limit (e.g. too many players for an
    /// exact lattice or factorial enumeration).
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Input data failed validation (malformed game file, incomplete
    /// coalition table, non-finite value, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A numeric procedure failed (singular system after ridge fallback,
    /// non-positive residual sum of squares, ...).
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
