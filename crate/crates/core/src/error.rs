use thiserror::Error;

use crate::group::SignedPauli2;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {what} encoding {code}")]
    InvalidEncoding { what: &'static str, code: u32 },

    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{what} of size {size} exceeds limit {limit}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("no valid index: {0}")]
    NoValidIndex(String),

    #[error("oracle answer outside support: {0}")]
    ContractViolation(String),

    #[error("budget of {budget} draws exhausted with {} distinct non-stabilizers", partial.len())]
    BudgetExhausted { budget: usize, partial: Vec<SignedPauli2> },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("promise violated: {0}")]
    PromiseViolation(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
