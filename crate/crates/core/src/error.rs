use thiserror::Error;

/// Errors raised by the workbench. The CLI maps these onto exit codes,
/// the server onto HTTP statuses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),

    /// Work estimate exceeded the caller's budget. `estimate` carries the
    /// `(m, n)` exponents of `|A|^m k^n` when known.
    #[error("budget exceeded: {what}")]
    Resource {
        what: String,
        estimate: Option<(u64, u64)>,
    },

    #[error("geometry violation: {0}")]
    GeometryViolation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A family and a geometry disagree about how many symbols fit a corner.
    #[error("inconsistent family/geometry: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
