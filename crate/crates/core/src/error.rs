use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid color sequence: {0}")]
    InvalidSequence(String),

    /// A computation would exceed the configured resource budget.
    #[error("resource budget exceeded: {what} (limit {limit}, requested {requested})")]
    BudgetExceeded {
        what: &'static str,
        limit: u64,
        requested: u64,
    },

    /// The kernel violates an internal invariant (for example a zero
    /// run-length probability on an enumerated state).
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    /// A sweep could not evaluate one of its points.
    #[error("sweep point {param}: {reason}")]
    AtSweepPoint { param: usize, reason: Box<Error> },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// `true` for refusals driven by [`crate::Budget`].
    pub fn is_budget(&self) -> bool {
        match self {
            Error::BudgetExceeded { .. } => true,
            Error::AtSweepPoint { reason, .. } => reason.is_budget(),
            _ => false,
        }
    }
}
