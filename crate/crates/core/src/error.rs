use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("base {0} is not supported (expected 2..=255)")]
    InvalidBase(u32),
    #[error("digit {digit} is out of range for base {base}")]
    DigitOutOfRange { digit: u32, base: u8 },
    #[error("base mismatch: {left} vs {right}")]
    BaseMismatch { left: u8, right: u8 },
    #[error("density is undefined on an empty word")]
    EmptyInput,
    #[error("pattern of length {pattern} is longer than the word of length {text}")]
    PatternTooLong { pattern: usize, text: usize },
    #[error("{what} needs {requested} digits, over the resource cap of {cap}")]
    ResourceCap {
        what: String,
        requested: u128,
        cap: usize,
    },
    #[error("search cap exceeded while {what} (failing condition: {condition})")]
    SearchCap { what: String, condition: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("family arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: u8, found: u8 },
    #[error("membership is indeterminate: {0}")]
    Indeterminate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
