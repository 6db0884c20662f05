use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid base {0}: radix must be at least 2")]
    InvalidBase(u64),

    #[error("digit {digit} out of range for base {base}")]
    DigitOutOfRange { digit: u64, base: u32 },

    #[error("digit vector must contain at least one digit")]
    EmptyDigits,

    #[error("no operands")]
    NoOperands,

    #[error("base mismatch: expected base {expected}, found base {found}")]
    BaseMismatch { expected: u32, found: u32 },

    #[error("arity mismatch: rule takes {expected} operand(s), got {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("invalid rule table: {0}")]
    InvalidRule(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("leaf count {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),

    #[error("register width must be at least 1")]
    InvalidWidth,

    #[error("input #{index} = {value} does not fit in {width} bit(s)")]
    InputOutOfRange {
        index: usize,
        value: String,
        width: usize,
    },

    #[error("expected {expected} inputs, got {found}")]
    InputCount { expected: usize, found: usize },

    #[error("register overflow: nonzero digit beyond width {width}")]
    RegisterOverflow { width: usize },

    #[error("CAM unit is not running")]
    NotRunning,

    #[error("invalid trial configuration: {0}")]
    InvalidConfig(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}
