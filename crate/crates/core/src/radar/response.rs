use std::f64::consts::PI;

use num_complex::Complex64;

use super::gate::GatedSegment;
use crate::em::FrequencyGrid;
use crate::error::{Error, Result};

/// Complex amplitude spectrum of a gated echo on the analysis grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelResponse {
    pub grid: FrequencyGrid,
    pub values: Vec<Complex64>,
}

impl ChannelResponse {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn scaled(&self, gain: f64) -> Self {
        ChannelResponse {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * gain).collect(),
        }
    }
}

/// Spectrum of the segment, `(1/f_s) Σ g[n] exp(-i2πf n/f_s)`, evaluated
/// directly at each grid frequency. Phase is referenced to the gate start.
///
/// Evaluating the transform at arbitrary frequencies is the same as sampling
/// the transform of an infinitely zero-padded segment.
pub fn channel_response(segment: &GatedSegment, grid: &FrequencyGrid) -> Result<ChannelResponse> {
    let fs = segment.sample_rate;
    let (_, high) = grid.band();
    if !(high < fs / 2.0) {
        return Err(Error::invalid(
            "frequency grid",
            format!("{high} Hz is beyond the Nyquist limit {} Hz", fs / 2.0),
        ));
    }
    let values = grid
        .iter()
        .map(|f| {
            let step = Complex64::from_polar(1.0, -2.0 * PI * f / fs);
            let mut phasor = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, &g) in segment.samples.iter().enumerate() {
                // re-anchor periodically to keep rounding error from accumulating
                if n % 64 == 0 {
                    phasor = Complex64::from_polar(1.0, -2.0 * PI * f * n as f64 / fs);
                }
                acc += g * phasor;
                phasor *= step;
            }
            acc / fs
        })
        .collect();
    Ok(ChannelResponse {
        grid: grid.clone(),
        values,
    })
}
