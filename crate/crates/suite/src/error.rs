use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: schema error: {msg}")]
    Schema { path: String, msg: String },
    #[error("input error: {0}")]
    Input(String),
}

impl SuiteError {
    pub fn io(path: &Path, source: std::io::Error) -> SuiteError {
        SuiteError::Io { path: path.display().to_string(), source }
    }

    pub fn schema(path: &Path, msg: impl Into<String>) -> SuiteError {
        SuiteError::Schema { path: path.display().to_string(), msg: msg.into() }
    }
}

pub type SuiteResult<T> = std::result::Result<T, SuiteError>;
