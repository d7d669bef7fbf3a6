use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("query {0} has no relevant documents")]
    DegenerateQuery(usize),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("critical-n scan failed at its starting size n={n} (d={d}); lower n_start")]
    Scan { d: usize, n: usize },

    #[error("polynomial fit failed: {0}")]
    Fit(String),

    #[error("attribute vocabulary exhausted: {0}")]
    Vocab(String),

    #[error("query is empty after tokenization")]
    EmptyQuery,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vector '{0}' is zero after truncation")]
    ZeroVector(String),

    #[error("query '{0}' is missing")]
    MissingQuery(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}
