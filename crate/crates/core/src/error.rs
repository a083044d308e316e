use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument outside the domain of the operation (n = 0, missing table entry, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation whose size would exceed the configured cap.
    #[error("resource limit exceeded: {what} = {value} exceeds cap {cap}")]
    ResourceLimit {
        what: String,
        value: String,
        cap: u64,
    },

    /// Bad configuration, such as an unknown identity id.
    #[error("usage error: {0}")]
    Usage(String),

    /// An exact computation produced a value that cannot be right (e.g. a
    /// power sum that is not an integer). Always a bug.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn over_cap(what: impl Into<String>, value: impl ToString, cap: u64) -> Self {
        Error::ResourceLimit {
            what: what.into(),
            value: value.to_string(),
            cap,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
