use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operation tables have the wrong shape or reference elements out of range.
    #[error("malformed table: {0}")]
    Malformed(String),

    #[error("cap exceeded: {what} needs {required}, limit is {limit}")]
    CapExceeded {
        what: &'static str,
        required: u128,
        limit: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("signature mismatch: {0}")]
    Signature(String),

    #[error("catalog version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("catalog entry {name:?} is invalid: {reason}")]
    InvalidEntry { name: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    /// A construction that the underlying theorem guarantees did not succeed.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn cap(what: &'static str, required: u128, limit: u128) -> Self {
        Error::CapExceeded {
            what,
            required,
            limit,
        }
    }
}
