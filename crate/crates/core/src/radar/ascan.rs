use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rustfft::FftPlanner;

use super::ricker::ricker_spectrum;
use crate::error::{Error, Result};

/// Twice the top of the 200-900 MHz band.
pub const MIN_SAMPLE_RATE: f64 = 1.8e9;

/// One time-domain radar trace.
#[derive(Debug, Clone, PartialEq)]
pub struct AScan {
    pub samples: Vec<f64>,
    /// Hz.
    pub sample_rate: f64,
    /// Rough platform altitude (or target range) used to center the echo
    /// search, m. A ±0.1 m error is tolerated by the gate.
    pub altitude_est: f64,
    pub location: String,
}

impl AScan {
    pub fn new(
        samples: Vec<f64>,
        sample_rate: f64,
        altitude_est: f64,
        location: impl Into<String>,
    ) -> Result<Self> {
        let scan = AScan {
            samples,
            sample_rate,
            altitude_est,
            location: location.into(),
        };
        scan.validate()?;
        Ok(scan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::invalid("a-scan", "no samples"));
        }
        if !(self.sample_rate > MIN_SAMPLE_RATE) {
            return Err(Error::invalid(
                "sample rate",
                format!("{} Hz does not exceed {MIN_SAMPLE_RATE} Hz", self.sample_rate),
            ));
        }
        if !self.altitude_est.is_finite() {
            return Err(Error::invalid("altitude estimate", "must be finite"));
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Complex spectral weighting applied to a pulse, given for `f > 0`.
pub type Shaping = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A delayed, scaled and optionally spectrally shaped Ricker pulse.
#[derive(Clone)]
pub struct Echo {
    /// Two-way travel time, s.
    pub delay: f64,
    pub gain: f64,
    pub shaping: Option<Shaping>,
}

impl Echo {
    pub fn new(delay: f64, gain: f64) -> Self {
        Echo {
            delay,
            gain,
            shaping: None,
        }
    }

    pub fn shaped(delay: f64, gain: f64, shaping: Shaping) -> Self {
        Echo {
            delay,
            gain,
            shaping: Some(shaping),
        }
    }
}

impl std::fmt::Debug for Echo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Echo")
            .field("delay", &self.delay)
            .field("gain", &self.gain)
            .field("shaped", &self.shaping.is_some())
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisConfig {
    pub sample_rate: f64,
    /// Trace length, s.
    pub duration: f64,
    pub center_frequency: f64,
    pub altitude_est: f64,
    pub location: String,
}

/// Superposes echoes in the frequency domain and adds white Gaussian noise
/// of RMS `noise_rms`.
///
/// Each echo contributes `gain · P(f) · shaping(f) · exp(-i2πfτ)` where `P`
/// is the Ricker spectrum; the trace is the inverse transform, so an
/// unshaped echo is exactly a sampled, delayed Ricker pulse.
pub fn synthesize_ascan<R: Rng + ?Sized>(
    echoes: &[Echo],
    noise_rms: f64,
    cfg: &SynthesisConfig,
    rng: &mut R,
) -> Result<AScan> {
    if !(cfg.duration > 0.0) || !(cfg.sample_rate > 0.0) {
        return Err(Error::invalid("synthesis", "duration and sample rate must be > 0"));
    }
    if !(noise_rms >= 0.0) {
        return Err(Error::invalid("noise level", "must be >= 0"));
    }
    for e in echoes {
        if !(e.delay >= 0.0 && e.delay < cfg.duration) {
            return Err(Error::DelayOutOfRange {
                delay: e.delay,
                duration: cfg.duration,
            });
        }
    }
    let n = (cfg.duration * cfg.sample_rate).round() as usize;
    let nfft = (2 * n).next_power_of_two();
    let df = cfg.sample_rate / nfft as f64;
    let fc = cfg.center_frequency;
    let p_peak = ricker_spectrum(fc, fc);

    let mut spectrum = vec![Complex64::new(0.0, 0.0); nfft];
    for k in 1..=nfft / 2 {
        let f = k as f64 * df;
        let p = ricker_spectrum(fc, f);
        if p < 1e-14 * p_peak {
            continue;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for e in echoes {
            let shape = e.shaping.as_ref().map_or(Complex64::new(1.0, 0.0), |s| s(f));
            acc += e.gain * shape * Complex64::from_polar(1.0, -2.0 * PI * f * e.delay);
        }
        spectrum[k] = acc * p * cfg.sample_rate;
    }
    // Hermitian completion; the Nyquist bin must be real
    spectrum[nfft / 2].im = 0.0;
    for k in 1..nfft / 2 {
        spectrum[nfft - k] = spectrum[k].conj();
    }
    FftPlanner::new().plan_fft_inverse(nfft).process(&mut spectrum);

    let mut samples: Vec<f64> = spectrum[..n].iter().map(|c| c.re / nfft as f64).collect();
    if noise_rms > 0.0 {
        let normal = Normal::new(0.0, noise_rms).expect("finite noise level");
        for s in &mut samples {
            *s += normal.sample(rng);
        }
    }
    AScan::new(samples, cfg.sample_rate, cfg.altitude_est, cfg.location.clone())
}

/// Magnitude of the analytic signal.
pub fn envelope(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    if n == 0 {
        return Vec::new();
    }
    let nfft = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex64> = samples
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(nfft)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(nfft).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        if k == 0 || k == nfft / 2 {
            continue;
        }
        if k < nfft / 2 {
            *c *= 2.0;
        } else {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(nfft).process(&mut buf);
    buf[..n].iter().map(|c| c.norm() / nfft as f64).collect()
}
