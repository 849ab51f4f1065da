use std::path::PathBuf;

use idim_core::IdError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// A CSV cell or record that cannot be read. `line` is 1-based and
    /// counts the header.
    #[error("{}: line {line}, column '{column}': {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        column: String,
        message: String,
    },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Id(#[from] IdError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
    #[error("no valid results: {0}")]
    NoValidResults(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 when nothing valid was produced, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoValidResults(_) => 2,
            _ => 1,
        }
    }
}
