use std::path::PathBuf;

/// Errors surfaced by the tools. Exit code 2 covers bad parameters and
/// failed preconditions, 3 covers I/O.
#[derive(Debug, thiserror::Error)]
pub enum ToolError {
    #[error(transparent)]
    Core(#[from] prc_core::Error),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl ToolError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ToolError::Core(_) | ToolError::Config(_) | ToolError::Json { .. } => 2,
            ToolError::Io { .. } | ToolError::Csv(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ToolError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        ToolError::Json {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = ToolError> = std::result::Result<T, E>;
