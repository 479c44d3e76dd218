use thiserror::Error;

use crate::model::Violation;

/// A caller broke an operation's precondition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractViolation {
    #[error("machine count {k} outside 1..={m}")]
    MachineCount { k: usize, m: usize },
    #[error("{what} is {value}, limit is {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("{0}")]
    Precondition(&'static str),
}

/// An internal guarantee of the shelf pipeline failed for an accepted guess.
/// Carries a dump of the intermediate shelf schedule for diagnosis.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("internal invariant violated: {message}")]
pub struct InvariantViolation {
    pub message: String,
    pub dump: String,
}

impl InvariantViolation {
    pub fn new(message: impl Into<String>, dump: impl Into<String>) -> Self {
        InvariantViolation {
            message: message.into(),
            dump: dump.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("invalid instance: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidInstance(Vec<Violation>),
    #[error(transparent)]
    Contract(#[from] ContractViolation),
    #[error(transparent)]
    Invariant(#[from] InvariantViolation),
}
