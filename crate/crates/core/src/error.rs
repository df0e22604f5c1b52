use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input data does not have the required shape (non-square matrix, bad index, ...).
    #[error("malformed input: {0}")]
    Malformed(String),
    /// The input violates an invariant of the type being built (not a preorder, not a metric, ...).
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },
    /// An operation's precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The requested rule or combination is outside the decidable families.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A quantity with no defined value was requested, e.g. d(∅; ∅).
    #[error("undefined: {0}")]
    Undefined(String),
    /// Enumeration or grid request above the supported bound.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    /// A point does not belong to the ground space.
    #[error("point {0} is not a member of the space")]
    NotMember(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Error {
    Error::Invalid {
        what,
        reason: reason.into(),
    }
}
