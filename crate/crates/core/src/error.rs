use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid gate: {0}")]
    Gate(String),

    #[error("synthesis failed: {0}")]
    Synthesis(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("marked set is empty")]
    EmptyMarkedSet,
}

impl Error {
    /// Short stable tag used in machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension { .. } => "dimension",
            Error::Capacity(_) => "capacity",
            Error::Partition(_) => "partition",
            Error::Parse { .. } => "parse",
            Error::InvalidModel(_) => "model",
            Error::Gate(_) => "gate",
            Error::Synthesis(_) => "synthesis",
            Error::Config(_) => "config",
            Error::EmptyMarkedSet => "marked-set",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
