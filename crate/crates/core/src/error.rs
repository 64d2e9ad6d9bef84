use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point outside the open unit ball (norm {norm})")]
    OutOfDomain { norm: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("ill-conditioned system: {0}")]
    IllConditioned(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("undefined class {0}: no samples carry this label")]
    UndefinedClass(usize),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: entry ({row}, {col}) is {value}, expected 0 or 1", path.display())]
    NonBinary {
        path: PathBuf,
        row: usize,
        col: usize,
        value: String,
    },

    #[error("synthetic generation failed: {0}")]
    Generation(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line tool: 2 for data
    /// problems, 3 for numeric or degenerate failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::OutOfDomain { .. }
            | Error::Degenerate(_)
            | Error::IllConditioned(_)
            | Error::Topology(_)
            | Error::Generation(_) => 3,
            _ => 2,
        }
    }
}
