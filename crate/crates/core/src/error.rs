use thiserror::Error;

/// Errors raised by the rotor-walk library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed sequence `{text}`: {reason}")]
    Malformed { text: String, reason: String },

    #[error("symbol {symbol} out of range for degree {degree}")]
    SymbolOutOfRange { symbol: u32, degree: u32 },

    #[error("rotor sequence needs a nonempty period")]
    EmptyPeriod,

    #[error("direction {index} out of range (degree {degree})")]
    DirectionOutOfRange { index: u64, degree: u32 },

    #[error("sequence {0} is degenerate")]
    Degenerate(String),

    #[error("sequence {0} is not purely periodic")]
    NotPurelyPeriodic(String),

    #[error("sequence {0} is not balanced")]
    Unbalanced(String),

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: u32, found: u32 },

    #[error("degree {found} not supported here: {context}")]
    WrongDegree { found: u32, context: &'static str },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("type {value} produced by type {from} under atom {atom} in direction {direction} exceeds {bound} types")]
    TypeEscape { atom: usize, from: u64, direction: u32, value: u64, bound: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("period {period} is not divisible by {modulus}")]
    PeriodNotDivisible { period: usize, modulus: u32 },

    #[error("local times are undetermined: {0}")]
    Undetermined(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
