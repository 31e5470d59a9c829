use thiserror::Error;

/// Crate-wide error type. CLI exit codes map onto these variants:
/// parse/validation failures exit 1, budget overflows exit 2, and a
/// disagreement between a theorem-backed computation and its brute-force
/// counterpart exits 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("validation failed: {0}")]
    Violation(String),

    #[error("enumeration budget exceeded: need {needed} items, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("theorem mismatch: {0}")]
    TheoremMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Malformed(_) | Error::Violation(_) | Error::Unsupported(_) => 1,
            Error::BudgetExceeded { .. } => 2,
            Error::TheoremMismatch(_) => 3,
        }
    }
}
