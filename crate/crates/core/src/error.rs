use thiserror::Error;

/// Errors produced by the survivor-set library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("word has length {got}, expected {expected}")]
    WrongWordLength { expected: usize, got: usize },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("position {0} cannot be classified (positions start at 1)")]
    PositionZero(usize),

    #[error("operation requires a single-hole schedule")]
    MultiHole,

    #[error("prefix is not a survivor word: {0}")]
    PrefixNotSurvivor(String),

    #[error("N-vector step requires a PO or TD position, got Neither")]
    NeitherClass,

    #[error("N-vector leaves the growth cone: {0}")]
    ConeViolation(String),

    #[error("polynomial has no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("{what} did not converge after {iterations} iterations (last estimate {last})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        last: f64,
    },

    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("matrix is not primitive (support never all-positive up to power {cap})")]
    NotPrimitive { cap: usize },

    #[error("matrix has a negative entry")]
    NegativeEntry,

    #[error("search needs {needed} products, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("periodic extension of the block is not progressively overlapping at position {0}")]
    NotProgressivelyOverlapping(usize),

    #[error("survivor count is zero from k = {0} on")]
    Extinction(usize),

    #[error("no dimension prediction for this schedule: {0}")]
    NoPrediction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
