use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of a formula or constructor.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity error: {items} items requested but the menu holds at most {limit}")]
    Capacity { items: usize, limit: usize },

    /// Out-of-order or otherwise malformed sample/event stream.
    #[error("stream error: {0}")]
    Stream(String),

    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
