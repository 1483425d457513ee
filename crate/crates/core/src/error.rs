use thiserror::Error;

/// Errors raised by the algebra engine and the model loader.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("chart mismatch")]
    ChartMismatch,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("identity failed: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
