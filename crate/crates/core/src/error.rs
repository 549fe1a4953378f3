use thiserror::Error;

/// Errors raised by the library. Precondition failures of the closed-form
/// bounds are not errors; see [`crate::bounds::Bound`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An arithmetic operation outside its domain, e.g. inverting zero.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller-side precondition was violated.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A configured resource cap would be exceeded.
    #[error("resource cap `{cap}` exceeded: need {requested}, limit {limit}")]
    ResourceCap {
        cap: &'static str,
        limit: u64,
        requested: u64,
    },

    /// Malformed textual input (polynomial strings, ranges, lists).
    #[error("parse error: {0}")]
    Parse(String),

    /// An internal consistency check failed. Indicates a bug.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn cap(cap: &'static str, limit: u64, requested: u64) -> Self {
        Error::ResourceCap {
            cap,
            limit,
            requested,
        }
    }
}
