use thiserror::Error;

/// Errors produced by the ramification toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("element is not integral (negative pi-valuation)")]
    NotIntegral,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("incompatible operands: {0}")]
    Incompatible(String),
    #[error("adjunction cap of {0} pi-roots exceeded")]
    AdjunctionCapExceeded(u32),
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("filtration is not a decreasing chain: {0}")]
    NotAChain(String),
    #[error("unsupported jump: {0}")]
    UnsupportedJump(String),
    #[error("fierce step requires a pair jump")]
    MissingJump,
    #[error("tower fold disagrees with the composed Herbrand function: {0}")]
    InconsistentFold(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("operation requires kind {expected}, got {actual}")]
    WrongKind { expected: String, actual: String },
    #[error("resultant vanishes to available precision")]
    ZeroResultant,
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
