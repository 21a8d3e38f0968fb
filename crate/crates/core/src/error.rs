use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{model} approximation out of range: {quantity} = {value:.4} exceeds {limit}")]
    ApproximationOutOfRange {
        model: &'static str,
        quantity: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("no permittivity reproduces vwc {vwc} (polynomial range tops out at {max:.4})")]
    NoSolution { vwc: f64, max: f64 },

    #[error("incidence angle {degrees:.2} deg is at or beyond the 80 deg grazing limit")]
    GrazingIncidence { degrees: f64 },

    #[error("echo delay {delay:e} s lies outside the trace duration {duration:e} s")]
    DelayOutOfRange { delay: f64, duration: f64 },

    #[error("no ground peak found: envelope maximum {peak:e} is below 3x noise floor {floor:e}")]
    NoPeakFound { peak: f64, floor: f64 },

    #[error("gate [{start}, {end}) does not fit inside a trace of {len} samples")]
    GateOutOfBounds { start: i64, end: i64, len: usize },

    #[error("frequency {frequency:e} Hz is outside the calibrated band [{low:e}, {high:e}] Hz")]
    OutOfCalibratedBand { frequency: f64, low: f64, high: f64 },

    #[error("frequency grids do not match: {0}")]
    GridMismatch(String),

    #[error("sub-band [{low:e}, {high:e}] Hz selects no frequencies")]
    EmptySubBand { low: f64, high: f64 },

    #[error("measured spectrum is identically zero")]
    ZeroSpectrum,

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
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by malformed or missing inputs rather than
    /// numerical validity limits.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::Parse { .. }
                | Error::Io { .. }
                | Error::GridMismatch(_)
        )
    }
}
