use thiserror::Error;

/// Errors raised by the gain computations and their drivers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller violated an operation contract (e.g. a forcing shape that
    /// is not smooth over a requested step).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A computed result broke one of its own invariants. This is a bug.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
