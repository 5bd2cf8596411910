use thiserror::Error;

/// Errors raised by model construction, inference and certification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("observation at position {index} does not belong to the model's observation space: {reason}")]
    ObservationSpace { index: usize, reason: String },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    /// All forward mass vanished at the given absolute time index.
    #[error("zero-likelihood window: all forward mass vanishes at time {time}")]
    ZeroLikelihood { time: usize },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("chain is not irreducible: {0}")]
    NotIrreducible(String),

    #[error("model has no representable stationary law: {0}")]
    NotStationary(String),

    #[error("block length m = {m} exceeds the configured cap {cap}")]
    BlockTooLong { m: usize, cap: usize },

    #[error("condition not satisfied: {0}")]
    Condition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
