//! Synthetic radar scenes: plate and ground A-scans seen through a known
//! hardware response, used as oracles for the processing chain.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::canopy::{transmissivity, CanopyDescriptor};
use crate::em::SPEED_OF_LIGHT;
use crate::error::{Error, Result};
use crate::ground::{coherent_rcs, effective_area, SoilDescriptor, ViewGeometry};
use crate::radar::{plate_rcs, synthesize_ascan, AScan, Echo, SynthesisConfig, DEFAULT_CENTER_FREQUENCY};

/// Smooth transfer function of the radar front end:
/// `floor + bump · exp(-((f - center)/width)²)` with a pure delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HardwareModel {
    pub floor: f64,
    pub bump: f64,
    /// Hz.
    pub bump_center: f64,
    /// Hz.
    pub bump_width: f64,
    /// s.
    pub latency: f64,
}

impl Default for HardwareModel {
    fn default() -> Self {
        HardwareModel {
            floor: 0.6,
            bump: 0.4,
            bump_center: 700e6,
            bump_width: 600e6,
            latency: 0.2e-9,
        }
    }
}

impl HardwareModel {
    pub fn response(&self, frequency_hz: f64) -> Complex64 {
        let x = (frequency_hz - self.bump_center) / self.bump_width;
        let gain = self.floor + self.bump * (-x * x).exp();
        Complex64::from_polar(gain, -2.0 * PI * frequency_hz * self.latency)
    }
}

/// Settings of the synthetic radar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadarSimulator {
    pub hardware: HardwareModel,
    /// Hz.
    pub sample_rate: f64,
    /// Hz.
    pub center_frequency: f64,
    /// RMS of additive white noise, trace units.
    pub noise_rms: f64,
    /// Amplitude of the antenna-to-antenna coupling pulse, trace units.
    pub coupling_gain: f64,
    /// s.
    pub coupling_delay: f64,
    /// RCS of the canopy-top clutter echo, m².
    pub clutter_rcs: f64,
    /// Minimum height of the clutter echo above the ground, m.
    pub clutter_min_height: f64,
    /// Trace length, s; derived from the target range when absent.
    pub duration: Option<f64>,
}

impl Default for RadarSimulator {
    fn default() -> Self {
        RadarSimulator {
            hardware: HardwareModel::default(),
            sample_rate: 14e9,
            center_frequency: DEFAULT_CENTER_FREQUENCY,
            noise_rms: 0.0,
            coupling_gain: 0.5,
            coupling_delay: 1.5e-9,
            clutter_rcs: 0.05,
            clutter_min_height: 0.6,
            duration: None,
        }
    }
}

impl RadarSimulator {
    fn config(&self, range: f64, location: &str) -> SynthesisConfig {
        SynthesisConfig {
            sample_rate: self.sample_rate,
            duration: self
                .duration
                .unwrap_or(2.0 * (range + 3.0) / SPEED_OF_LIGHT + 10e-9),
            center_frequency: self.center_frequency,
            altitude_est: range,
            location: location.to_string(),
        }
    }

    /// Echo of a target of RCS `rcs(f)` at `range`, so that the calibrated
    /// spectrum of the isolated echo reproduces `rcs`.
    ///
    /// The amplitude goes as `√σ/f`. Its phase is picked so the two-sided
    /// spectrum stays smooth through DC and the pulse stays compact: real for
    /// `σ ∝ f²` (`flat_at_dc = false`), `-i` for `σ` finite at DC.
    fn target_echo<F>(&self, range: f64, rcs: F, flat_at_dc: bool) -> Echo
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let hw = self.hardware;
        let fc = self.center_frequency;
        let spread = 1.0 / (range * range);
        let phase = if flat_at_dc {
            Complex64::new(0.0, -1.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        let shaping = Arc::new(move |f: f64| phase * hw.response(f) * rcs(f).sqrt() * (fc / f) * spread);
        Echo::shaped(2.0 * range / SPEED_OF_LIGHT, 1.0, shaping)
    }

    fn coupling(&self) -> Option<Echo> {
        (self.coupling_gain != 0.0).then(|| {
            let hw = self.hardware;
            Echo::shaped(
                self.coupling_delay,
                self.coupling_gain,
                Arc::new(move |f: f64| hw.response(f)),
            )
        })
    }

    /// Broadside square plate of side `side` at `range`, with a weak ground
    /// return 1 m behind it.
    pub fn plate_scan<R: Rng + ?Sized>(
        &self,
        side: f64,
        range: f64,
        location: &str,
        rng: &mut R,
    ) -> Result<AScan> {
        if !(side > 0.0) || !(range > 0.0) {
            return Err(Error::invalid("plate scene", "side and range must be > 0"));
        }
        let mut echoes = vec![self.target_echo(range, move |f| plate_rcs(side, f), false)];
        echoes.push(self.target_echo(range + 1.0, |_| 0.5, true));
        echoes.extend(self.coupling());
        synthesize_ascan(&echoes, self.noise_rms, &self.config(range, location), rng)
    }

    /// Nadir scan over soil under `canopy`: the ground echo carries the
    /// forward-model RCS `Υ² σ_coh` at the effective beamwidth, and a
    /// canopy-top clutter echo sits at least `clutter_min_height` above it.
    pub fn ground_scan<R: Rng + ?Sized>(
        &self,
        canopy: &CanopyDescriptor,
        soil: &SoilDescriptor,
        view: &ViewGeometry,
        location: &str,
        rng: &mut R,
    ) -> Result<AScan> {
        canopy.validate()?;
        soil.validate()?;
        view.validate()?;
        let theta = view.effective_beamwidth;
        let area = effective_area(view);
        // checks every validity guard once before the closure swallows them
        transmissivity(canopy, self.center_frequency, theta)?;
        let (canopy_c, soil_c) = (canopy.clone(), soil.clone());
        let rcs = move |f: f64| {
            let t = transmissivity(&canopy_c, f, theta).unwrap_or(0.0);
            t * t * coherent_rcs(&soil_c, f, theta, area)
        };
        let range = view.altitude;
        let mut echoes = vec![self.target_echo(range, rcs, true)];
        if !canopy.is_empty() && self.clutter_rcs > 0.0 {
            let height = canopy.height.max(self.clutter_min_height);
            if height < range {
                let clutter = self.clutter_rcs;
                echoes.push(self.target_echo(range - height, move |_| clutter, true));
            }
        }
        echoes.extend(self.coupling());
        synthesize_ascan(&echoes, self.noise_rms, &self.config(range, location), rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::ComplexPermittivity;
    use crate::radar::{envelope, isolate_ground_return, GateConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hardware_response_is_smooth_and_positive() {
        let hw = HardwareModel::default();
        for f in [1e8, 3e8, 7e8, 1.2e9] {
            let g = hw.response(f).norm();
            assert!(g >= 0.6 && g <= 1.0);
        }
    }

    #[test]
    fn plate_scan_gates_on_the_plate() {
        let sim = RadarSimulator::default();
        let scan = sim
            .plate_scan(0.9, 7.0, "p", &mut ChaCha8Rng::seed_from_u64(1))
            .unwrap();
        let g = isolate_ground_return(&scan, &GateConfig::default()).unwrap();
        let expected = 2.0 * 7.0 / SPEED_OF_LIGHT + sim.hardware.latency;
        assert!((g.peak_time - expected).abs() < 0.1e-9);
        let env = envelope(&scan.samples);
        assert!(env[(1.5e-9 * 14e9) as usize] > 0.1);
    }

    #[test]
    fn bare_scan_has_no_clutter() {
        let sim = RadarSimulator {
            coupling_gain: 0.0,
            ..Default::default()
        };
        let soil = SoilDescriptor::new(ComplexPermittivity::with_loss_tangent(14.0, 0.15).unwrap());
        let view = ViewGeometry::new(6.0);
        let scan = sim
            .ground_scan(&CanopyDescriptor::bare(), &soil, &view, "b", &mut ChaCha8Rng::seed_from_u64(1))
            .unwrap();
        let peak = scan.samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let ground = (2.0 * 6.0 / SPEED_OF_LIGHT * 14e9) as usize;
        // clutter would sit at least 0.6 m (56 samples) earlier
        let early = &scan.samples[..ground - 50];
        assert!(early.iter().all(|e| e.abs() < 1e-3 * peak));
    }
}
