use std::path::Path;

use soilscan_lidar::LidarError;

/// Exit status for malformed or missing inputs.
pub const EXIT_INPUT: i32 = 1;
/// Exit status for inputs that parsed but failed a numerical or validity check.
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Numerical,
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Input,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Numerical,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Input => EXIT_INPUT,
            ErrorKind::Numerical => EXIT_NUMERICAL,
        }
    }

    /// Prefixes the message with the file it concerns, unless it already
    /// names it.
    pub fn at(self, path: &Path) -> Self {
        let shown = path.display().to_string();
        if self.message.contains(&shown) {
            self
        } else {
            CliError {
                message: format!("{shown}: {}", self.message),
                ..self
            }
        }
    }
}

impl From<soilscan_core::Error> for CliError {
    fn from(e: soilscan_core::Error) -> Self {
        if e.is_input_error() {
            CliError::input(e.to_string())
        } else {
            CliError::numerical(e.to_string())
        }
    }
}

impl From<LidarError> for CliError {
    fn from(e: LidarError) -> Self {
        if e.is_input_error() {
            CliError::input(e.to_string())
        } else {
            CliError::numerical(e.to_string())
        }
    }
}

/// Wraps an I/O failure on `path` as an input error.
pub fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::input(format!("{}: {e}", path.display()))
}
