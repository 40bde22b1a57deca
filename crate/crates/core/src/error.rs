use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid level p={p}, f={f}: {reason}")]
    InvalidLevel { p: u64, f: u32, reason: String },

    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u64, u64),

    #[error("point ({r}, {s}) does not have order {ell}")]
    NotFullOrder { r: i64, s: i64, ell: u64 },

    #[error("epsilon is undefined for n={n} divisible by the level {ell}")]
    EpsilonUndefined { n: u64, ell: u64 },

    #[error("argument must be a positive integer")]
    ZeroArgument,

    #[error("division by zero")]
    DivisionByZero,

    #[error("series constant term is not invertible")]
    ZeroConstantTerm,

    #[error("lookup precondition violated: {0}")]
    Lookup(String),

    #[error("exponent vector is empty")]
    EmptyVector,

    #[error("exponent vector fails the unit congruences")]
    InvalidVector,

    #[error("integer overflow while merging exponent entries")]
    Overflow,

    #[error("search too large: {0}")]
    SearchTooLarge(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
