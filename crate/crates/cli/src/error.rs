use thiserror::Error;

use crate::literal::ParseError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Core(#[from] idealforge::Error),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed JSON input: {0}")]
    Json(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "ParseError",
            CliError::Core(e) => e.code(),
            CliError::Io { .. } => "Io",
            CliError::Json(_) => "MalformedJson",
            CliError::Usage(_) => "Usage",
        }
    }

    /// Exhaustion is an outcome, not an input error.
    pub fn is_exhaustion(&self) -> bool {
        matches!(self, CliError::Core(idealforge::Error::SearchExhausted { .. }))
    }
}
