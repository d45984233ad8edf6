use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error at {path}: {msg}")]
    Validation { path: String, msg: String },
    #[error("resource guard: {0}")]
    Resource(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn validation(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            msg: msg.into(),
        }
    }

    /// Process exit code used by the command line frontend.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Validation { .. } | Error::Precondition(_) => 2,
            Error::Resource(_) => 3,
            Error::Invariant(_) => 4,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
