use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library.
///
/// The variants are coarse on purpose: callers such as the CLI map them to
/// exit codes, so only the category and a readable message are needed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A precondition on the input values failed (mismatched ground sets,
    /// incomparable partitions, out-of-range marks, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested size exceeds the configured guard.
    #[error("size guard: {what} is limited to n <= {max}, got n = {n}")]
    SizeGuard {
        what: &'static str,
        n: usize,
        max: usize,
    },

    /// A structure failed validation.
    #[error("invalid {kind}: {message}")]
    Invalid { kind: &'static str, message: String },

    /// A chart point does not lie in the requested chart overlap.
    #[error("outside chart overlap: {0}")]
    OutsideOverlap(String),

    /// Malformed JSON input.
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },

    /// An internal invariant broke. Always a bug.
    #[error("internal defect: {0}")]
    Defect(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(kind: &'static str, msg: impl Into<String>) -> Self {
        Error::Invalid {
            kind,
            message: msg.into(),
        }
    }

    pub(crate) fn schema(pointer: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Schema {
            pointer: pointer.into(),
            message: msg.into(),
        }
    }
}
