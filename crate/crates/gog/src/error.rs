//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GogError {
    #[error("invalid generator symbol `{0}` (want [a-z][a-z0-9_]*)")]
    BadSymbol(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("parse error at line {line}: {msg}")]
    ParseAt { line: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid graph of groups: {0}")]
    Validation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("move precondition violated: {0}")]
    MovePrecondition(String),
    #[error("word problem backend abstained: {0}")]
    Abstained(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl GogError {
    pub fn validation(msg: impl Into<String>) -> Self {
        GogError::Validation(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        GogError::Domain(msg.into())
    }
}
