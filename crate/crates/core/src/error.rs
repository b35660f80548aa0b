use thiserror::Error;

/// Errors raised anywhere in the framework.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown name: {0}")]
    Name(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("invalid plan: {0}")]
    Plan(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                other => Error::Format(format!("{other:?}")),
            }
        } else {
            Error::Format(e.to_string())
        }
    }
}
