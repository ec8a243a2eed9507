use thiserror::Error;

use crate::lr::LrConflict;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed configuration: {0}")]
    InvalidConfig(String),
    #[error("derivations do not glue at index {0}")]
    GlueMismatch(usize),
    #[error("subclass violation: {0}")]
    Subclass(String),
    #[error("the marked language is empty, no solution exists")]
    EmptyLanguage,
    #[error("grammar is not LR(1): {} conflict(s), first: {}", .0.len(), .0.first().map(|c| c.to_string()).unwrap_or_default())]
    NotLr(Vec<LrConflict>),
    #[error("grammar is not end-marker augmented")]
    NotAugmented,
    #[error("end-of-output marker `{0}` is already a symbol of the grammar")]
    MarkerCollision(String),
    #[error("determinism risk: {0}")]
    DeterminismRisk(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
