use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("point {0} is not in {1}")]
    PointOutsideDomain(String, String),
    #[error("invalid transformation: {0}")]
    InvalidTransform(String),
    #[error("arity mismatch: expected {expected}, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("not monotone: {0}")]
    NotMonotone(String),
    #[error("constant set function not allowed here: {0}")]
    ConstantNotAllowed(String),
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("chain mismatch: {0}")]
    ChainMismatch(String),
    #[error("not representable on a finite chain: {0}")]
    NotRepresentable(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown function: {0}")]
    UnknownFunction(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
