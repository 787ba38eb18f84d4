use std::path::PathBuf;

use thiserror::Error;
use tvd_core::TvError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Parse(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] TvError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Short category name printed before the message.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Io { .. } => "io",
            Self::Parse(_) => "parse",
            Self::Usage(_) => "usage",
            Self::Core(TvError::Parameter(_)) => "parameter",
            Self::Core(TvError::Size { .. }) => "size",
            Self::Core(TvError::Dimension { .. } | TvError::InvalidDistribution(_)) => "parse",
            Self::Core(TvError::InvalidRatio(_)) => "numeric",
        }
    }

    /// `error: <kind>: <message>` on a single line.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("error: {}: {}", self.kind(), msg.trim())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
