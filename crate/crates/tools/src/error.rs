use std::path::PathBuf;

use thiserror::Error;

pub type ToolResult<T> = Result<T, ToolError>;

#[derive(Debug, Error)]
pub enum ToolError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },
    #[error("{}:{line}: timestamp does not increase", path.display())]
    NonMonotoneTime { path: PathBuf, line: u64 },
    #[error("{}: {msg}", path.display())]
    Config { path: PathBuf, msg: String },
    #[error("track and CAN data do not overlap in time")]
    NoOverlap,
    #[error(transparent)]
    Model(#[from] c2model::Error),
}

impl ToolError {
    /// Process exit status: 1 usage, 2 unreadable or malformed input,
    /// 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            ToolError::Usage(_) => 1,
            ToolError::Io { .. }
            | ToolError::Parse { .. }
            | ToolError::NonMonotoneTime { .. }
            | ToolError::Config { .. } => 2,
            ToolError::NoOverlap | ToolError::Model(_) => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ToolError::Io {
            path: path.into(),
            source,
        }
    }
}
