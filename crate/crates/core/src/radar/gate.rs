use std::f64::consts::PI;

use super::ascan::{envelope, AScan};
use super::ricker::DEFAULT_CENTER_FREQUENCY;
use crate::em::SPEED_OF_LIGHT;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateConfig {
    /// Ricker center frequency, Hz; sets the window length.
    pub center_frequency: f64,
    /// Half-width of the range search interval around the altitude, m.
    pub search_half_width: f64,
    /// Window length in units of the pulse duration `1.5/f_c`.
    pub window_pulse_widths: f64,
    /// Fraction of the window covered by the raised-cosine edges; zero
    /// disables the taper.
    pub taper_fraction: f64,
}

impl Default for GateConfig {
    fn default() -> Self {
        GateConfig {
            center_frequency: DEFAULT_CENTER_FREQUENCY,
            search_half_width: 0.5,
            window_pulse_widths: 2.0,
            taper_fraction: 0.1,
        }
    }
}

impl GateConfig {
    pub fn untapered(mut self) -> Self {
        self.taper_fraction = 0.0;
        self
    }

    pub fn window_length(&self) -> f64 {
        self.window_pulse_widths * 1.5 / self.center_frequency
    }
}

/// Window of a trace around the dominant echo.
#[derive(Debug, Clone, PartialEq)]
pub struct GatedSegment {
    /// Tapered samples.
    pub samples: Vec<f64>,
    pub sample_rate: f64,
    /// Index of the first gated sample in the parent trace.
    pub start_index: usize,
    /// s.
    pub gate_start: f64,
    /// s.
    pub gate_length: f64,
    /// Envelope peak time in the parent trace, s.
    pub peak_time: f64,
}

/// Finds the strongest envelope peak within `±search_half_width` of the
/// two-way delay `2R/c` and cuts a window of `2 × 1.5/f_c` centered on it.
///
/// The peak must exceed three times the trace noise floor, taken as the
/// median of the envelope over the whole trace.
pub fn isolate_ground_return(scan: &AScan, cfg: &GateConfig) -> Result<GatedSegment> {
    scan.validate()?;
    let fs = scan.sample_rate;
    let n = scan.len();
    let r = scan.altitude_est;
    let t_lo = 2.0 * (r - cfg.search_half_width) / SPEED_OF_LIGHT;
    let t_hi = 2.0 * (r + cfg.search_half_width) / SPEED_OF_LIGHT;
    let i_lo = (t_lo * fs).floor().max(0.0) as usize;
    let i_hi = ((t_hi * fs).ceil().max(0.0) as usize).min(n - 1);
    if i_lo > i_hi {
        return Err(Error::invalid(
            "altitude estimate",
            format!("search interval around {r} m lies outside the trace"),
        ));
    }

    let env = envelope(&scan.samples);
    let (peak_idx, peak) = env[i_lo..=i_hi]
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
            if v > best.1 {
                (i, v)
            } else {
                best
            }
        });
    let peak_idx = peak_idx + i_lo;
    let floor = median(&env);
    if !(peak > 0.0) || peak < 3.0 * floor {
        return Err(Error::NoPeakFound { peak, floor });
    }

    let half = (0.5 * cfg.window_length() * fs).round() as i64;
    let start = peak_idx as i64 - half;
    let end = peak_idx as i64 + half + 1;
    if start < 0 || end > n as i64 {
        return Err(Error::GateOutOfBounds { start, end, len: n });
    }
    let start = start as usize;
    let mut samples = scan.samples[start..end as usize].to_vec();
    apply_taper(&mut samples, cfg.taper_fraction);
    Ok(GatedSegment {
        gate_length: samples.len() as f64 / fs,
        samples,
        sample_rate: fs,
        start_index: start,
        gate_start: start as f64 / fs,
        peak_time: peak_idx as f64 / fs,
    })
}

/// Tukey window: raised-cosine edges over `fraction` of the length.
fn apply_taper(samples: &mut [f64], fraction: f64) {
    let n = samples.len();
    if fraction <= 0.0 || n < 3 {
        return;
    }
    let width = fraction.min(1.0) * (n - 1) as f64 / 2.0;
    if width < 1.0 {
        return;
    }
    for (i, s) in samples.iter_mut().enumerate() {
        let from_edge = (i as f64).min((n - 1 - i) as f64);
        if from_edge < width {
            *s *= 0.5 * (1.0 - (PI * from_edge / width).cos());
        }
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    let mid = v.len() / 2;
    let (_, m, _) = v.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    *m
}
