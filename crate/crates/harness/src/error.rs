use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error("config error on line {line}: {message}")]
    ConfigAt { line: usize, message: String },

    #[error("{label}: {source}")]
    Divergence {
        label: String,
        #[source]
        source: fistashift::Error,
    },

    #[error("{0}")]
    Numerical(#[from] fistashift::Error),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    /// 0 success, 1 config, 2 divergence, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::ConfigAt { .. } | HarnessError::Numerical(_) => 1,
            HarnessError::Divergence { .. } => 2,
            HarnessError::Io { .. } => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
