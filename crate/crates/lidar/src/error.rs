use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = LidarError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LidarError {
    #[error("tile has {count} points, need at least {min}")]
    TooFewPoints { count: usize, min: usize },

    #[error("tile contains no points")]
    EmptyTile,

    #[error("no row structure: best periodicity score {score:.3} is below {threshold}")]
    NoPeriodicity { score: f64, threshold: f64 },

    #[error("no ground returns: the gap fraction at the ground is zero")]
    NoGroundReturns,

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Model(#[from] soilscan_core::Error),
}

impl LidarError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        LidarError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for malformed or missing input, false for data that parsed but
    /// cannot be processed.
    pub fn is_input_error(&self) -> bool {
        match self {
            LidarError::InvalidParameter { .. } | LidarError::Parse { .. } | LidarError::Io { .. } => true,
            LidarError::Model(e) => e.is_input_error(),
            _ => false,
        }
    }

    pub(crate) fn at_path(self, path: &std::path::Path) -> Self {
        match self {
            LidarError::Parse { line, message, .. } => LidarError::Parse {
                path: path.display().to_string(),
                line,
                message,
            },
            other => other,
        }
    }
}
