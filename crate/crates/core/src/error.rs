use thiserror::Error;

/// Errors raised by the tomography library.
#[derive(Debug, Error)]
pub enum QptError {
    #[error("size error: {0}")]
    Size(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("validity error: {0}")]
    Validity(String),
    #[error("input state is not faithful: {0}")]
    Faithfulness(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("out of scope: {0}")]
    Scope(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, QptError>;
