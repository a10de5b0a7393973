use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("value {value} outside the domain of the {space} space")]
    Domain { value: String, space: &'static str },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A spanning cover could not reach this target at the given resolution.
    #[error("target {index} ({state}) is not covered by any candidate")]
    Uncovered { index: usize, state: String },

    /// An iteration guard tripped. Indicates a bug, not a property of the input.
    #[error("iteration cap of {cap} exceeded while {context}")]
    IterationCap { cap: usize, context: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
