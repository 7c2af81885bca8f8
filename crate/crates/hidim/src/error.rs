use thiserror::Error;

/// Errors surfaced by the library and the harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs was violated (dimension mismatch,
    /// out-of-range parameter, non-finite data, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A randomized construction exhausted its attempt budget without
    /// producing a certified object. Retry with a different seed.
    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    /// An internal invariant was violated; indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),

    /// File IO failed while reading a config or writing results.
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
