use std::f64::consts::PI;

use super::ascan::AScan;
use super::gate::{isolate_ground_return, GateConfig};
use super::response::{channel_response, ChannelResponse};
use crate::em::{wavelength, FrequencyGrid};
use crate::error::{Error, Result};
use crate::ground::RcsSpectrum;

/// Fraction of the peak plate response below which the calibration is not
/// trusted.
pub const VALID_BAND_THRESHOLD: f64 = 0.05;

/// Broadside RCS of a square conducting plate of side `side`, `4π l⁴/λ²`.
pub fn plate_rcs(side: f64, frequency_hz: f64) -> f64 {
    let lambda = wavelength(frequency_hz);
    4.0 * PI * side.powi(4) / (lambda * lambda)
}

/// A plate scan and the known antenna-to-plate range.
#[derive(Debug, Clone)]
pub struct PlateMeasurement {
    pub scan: AScan,
    /// m.
    pub range: f64,
}

/// Hardware transfer factor `C(f)` tying the measured spectrum to RCS.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationFactor {
    pub grid: FrequencyGrid,
    pub values: Vec<f64>,
    /// Frequencies inside which the factor may be used, Hz.
    pub valid_band: (f64, f64),
    /// m.
    pub plate_side: f64,
    /// m.
    pub reference_ranges: Vec<f64>,
    pub scan_count: usize,
}

impl CalibrationFactor {
    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} calibration values for {} frequencies",
                self.values.len(),
                self.grid.len()
            )));
        }
        let (lo, hi) = self.valid_band;
        if !(lo <= hi) {
            return Err(Error::invalid("valid band", format!("[{lo}, {hi}] is empty")));
        }
        for (f, &c) in self.grid.iter().zip(&self.values) {
            if f >= lo && f <= hi && !(c > 0.0 && c.is_finite()) {
                return Err(Error::invalid(
                    "calibration factor",
                    format!("value {c} at {f} Hz inside the valid band must be > 0"),
                ));
            }
        }
        Ok(())
    }

    /// Factor at `f`, exact on grid points and linearly interpolated
    /// between them.
    pub fn value_at(&self, frequency_hz: f64) -> Result<f64> {
        let (lo, hi) = self.valid_band;
        if !(frequency_hz >= lo && frequency_hz <= hi) {
            return Err(Error::OutOfCalibratedBand {
                frequency: frequency_hz,
                low: lo,
                high: hi,
            });
        }
        let freqs = self.grid.frequencies();
        let i = freqs.partition_point(|&f| f < frequency_hz);
        if i < freqs.len() && freqs[i] == frequency_hz {
            return Ok(self.values[i]);
        }
        // the valid band is spanned by grid points, so both neighbours exist
        let (f0, f1) = (freqs[i - 1], freqs[i]);
        let w = (frequency_hz - f0) / (f1 - f0);
        Ok(self.values[i - 1] * (1.0 - w) + self.values[i] * w)
    }
}

/// Per-scan `C(f) = f² r⁴ |G_r(f)|² / σ_r(f)`, averaged over scans.
///
/// The valid band is the contiguous run of grid points around the response
/// peak where the scan-averaged normalized `|G_r|` stays at or above
/// [`VALID_BAND_THRESHOLD`].
pub fn derive_calibration(
    measurements: &[PlateMeasurement],
    plate_side: f64,
    grid: &FrequencyGrid,
    gate: &GateConfig,
) -> Result<CalibrationFactor> {
    if measurements.is_empty() {
        return Err(Error::invalid("plate scans", "need at least one scan"));
    }
    if !(plate_side > 0.0) {
        return Err(Error::invalid("plate side", "must be > 0"));
    }
    let m = grid.len();
    let mut sum = vec![0.0; m];
    let mut shape = vec![0.0; m];
    for meas in measurements {
        if !(meas.range > 0.0) {
            return Err(Error::invalid("reference range", "must be > 0"));
        }
        let segment = isolate_ground_return(&meas.scan, gate)?;
        let resp = channel_response(&segment, grid)?;
        let mags = resp.magnitudes();
        let peak = mags.iter().copied().fold(0.0, f64::max);
        if !(peak > 0.0) {
            return Err(Error::ZeroSpectrum);
        }
        let r4 = meas.range.powi(4);
        for (j, f) in grid.iter().enumerate() {
            sum[j] += f * f * r4 * mags[j] * mags[j] / plate_rcs(plate_side, f);
            shape[j] += mags[j] / peak;
        }
    }
    let count = measurements.len() as f64;
    let values: Vec<f64> = sum.iter().map(|s| s / count).collect();
    let shape: Vec<f64> = shape.iter().map(|s| s / count).collect();

    let peak_idx = shape
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut lo = peak_idx;
    while lo > 0 && shape[lo - 1] >= VALID_BAND_THRESHOLD {
        lo -= 1;
    }
    let mut hi = peak_idx;
    while hi + 1 < m && shape[hi + 1] >= VALID_BAND_THRESHOLD {
        hi += 1;
    }
    let freqs = grid.frequencies();
    let cal = CalibrationFactor {
        grid: grid.clone(),
        values,
        valid_band: (freqs[lo], freqs[hi]),
        plate_side,
        reference_ranges: measurements.iter().map(|m| m.range).collect(),
        scan_count: measurements.len(),
    };
    cal.validate()?;
    Ok(cal)
}

/// `σ_m(f) = f² R⁴ |G(f)|² / C(f)` on the response grid.
pub fn measured_rcs(
    response: &ChannelResponse,
    range: f64,
    cal: &CalibrationFactor,
) -> Result<RcsSpectrum> {
    if !(range > 0.0) {
        return Err(Error::invalid("range", "must be > 0"));
    }
    let r4 = range.powi(4);
    let values = response
        .grid
        .iter()
        .zip(&response.values)
        .map(|(f, g)| Ok(f * f * r4 * g.norm_sqr() / cal.value_at(f)?))
        .collect::<Result<Vec<_>>>()?;
    RcsSpectrum::new(response.grid.clone(), values)
}
