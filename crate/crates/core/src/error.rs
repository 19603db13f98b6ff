use thiserror::Error;

/// Errors raised by signal construction, sampling, metrics and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The input is valid but the operation is not defined for it
    /// (for example integrating a quadratic segment).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An O(n^2) or worse routine refused an oversized input.
    #[error("size guard: {what} has {len} elements, limit is {limit}")]
    SizeGuard {
        what: &'static str,
        len: usize,
        limit: usize,
    },

    /// Normalized similarity with a zero-energy operand.
    #[error("undefined similarity: {0}")]
    UndefinedSimilarity(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
