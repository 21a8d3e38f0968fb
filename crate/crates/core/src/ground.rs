//! Rough-surface ground return and the combined scene RCS.
//!
//! At nadir the specular (coherent) lobe of the soil reflection dominates.
//! It is modeled with the Kirchhoff form
//!
//! ```text
//! σ_coh = A Γ/β_c² · exp(-16π² s² f²/c²) · exp(-θ²/β_c²)
//! ```
//!
//! over the effective coherent ring `A = π (R tan(θ_e/2))²`, and the scene
//! RCS multiplies it by the two-way canopy transmissivity evaluated at θ_e.
//! A first-order small-perturbation diffuse term is provided for comparing
//! the two components against incidence angle; it is never part of the
//! inversion.

use std::f64::consts::PI;

use crate::canopy::{transmissivity, CanopyDescriptor};
use crate::em::{fresnel_reflectivity, wavenumber, ComplexPermittivity, FrequencyGrid, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// Validity limit `k s` of the small-perturbation model.
pub const SPM_KS_LIMIT: f64 = 0.3;

pub const DEFAULT_ROUGHNESS_M: f64 = 0.01;
pub const DEFAULT_SCATTERING_BEAMWIDTH_DEG: f64 = 5.0;
pub const DEFAULT_EFFECTIVE_BEAMWIDTH_DEG: f64 = 2.0;
pub const DEFAULT_HALFPOWER_BEAMWIDTH_DEG: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoilDescriptor {
    pub permittivity: ComplexPermittivity,
    /// RMS height `s`, m.
    pub roughness_height: f64,
    /// β_c, rad.
    pub scattering_beamwidth: f64,
    /// Exponential correlation length of the diffuse model, m. `None` means
    /// ten times the roughness height.
    pub correlation_length: Option<f64>,
}

impl SoilDescriptor {
    /// Soil with 1 cm roughness and β_c = 5°.
    pub fn new(permittivity: ComplexPermittivity) -> Self {
        SoilDescriptor {
            permittivity,
            roughness_height: DEFAULT_ROUGHNESS_M,
            scattering_beamwidth: DEFAULT_SCATTERING_BEAMWIDTH_DEG.to_radians(),
            correlation_length: None,
        }
    }

    pub fn with_roughness(mut self, s: f64) -> Self {
        self.roughness_height = s;
        self
    }

    pub fn with_permittivity(mut self, eps: ComplexPermittivity) -> Self {
        self.permittivity = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.roughness_height >= 0.0) {
            return Err(Error::invalid("roughness height", "must be >= 0"));
        }
        if !(self.scattering_beamwidth > 0.0) {
            return Err(Error::invalid("scattering beamwidth", "must be > 0"));
        }
        if let Some(l) = self.correlation_length {
            if !(l >= 0.0) {
                return Err(Error::invalid("correlation length", "must be >= 0"));
            }
        }
        Ok(())
    }

    pub fn correlation_length(&self) -> f64 {
        self.correlation_length
            .unwrap_or(10.0 * self.roughness_height)
    }

    /// `exp(-16π² s² f²/c²)`.
    pub fn roughness_factor(&self, frequency_hz: f64) -> f64 {
        let s = self.roughness_height;
        (-16.0 * PI * PI * s * s * frequency_hz * frequency_hz / (SPEED_OF_LIGHT * SPEED_OF_LIGHT))
            .exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewGeometry {
    /// Platform altitude R above the soil, m.
    pub altitude: f64,
    /// θ_e, rad.
    pub effective_beamwidth: f64,
    /// Antenna half-power beamwidth, rad.
    pub antenna_halfpower_beamwidth: f64,
}

impl ViewGeometry {
    /// Nadir view with θ_e = 2° and a 60° antenna beam.
    pub fn new(altitude: f64) -> Self {
        ViewGeometry {
            altitude,
            effective_beamwidth: DEFAULT_EFFECTIVE_BEAMWIDTH_DEG.to_radians(),
            antenna_halfpower_beamwidth: DEFAULT_HALFPOWER_BEAMWIDTH_DEG.to_radians(),
        }
    }

    pub fn with_effective_beamwidth(mut self, theta_e: f64) -> Self {
        self.effective_beamwidth = theta_e;
        self
    }

    pub fn with_altitude(mut self, altitude: f64) -> Self {
        self.altitude = altitude;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.altitude > 0.0) {
            return Err(Error::invalid("altitude", "must be > 0"));
        }
        if !(self.effective_beamwidth > 0.0)
            || self.effective_beamwidth > self.antenna_halfpower_beamwidth
        {
            return Err(Error::invalid(
                "effective beamwidth",
                "must lie in (0, antenna half-power beamwidth]",
            ));
        }
        Ok(())
    }
}

/// Radar cross section per frequency, m² (linear power).
#[derive(Debug, Clone, PartialEq)]
pub struct RcsSpectrum {
    grid: FrequencyGrid,
    values: Vec<f64>,
}

impl RcsSpectrum {
    pub fn new(grid: FrequencyGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} frequencies",
                values.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid(
                "rcs spectrum",
                format!("values must be finite and >= 0, found {v}"),
            ));
        }
        Ok(RcsSpectrum { grid, values })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.iter().zip(self.values.iter().copied())
    }

    pub fn to_dbsm(&self) -> Vec<f64> {
        self.values.iter().map(|&v| to_db(v)).collect()
    }

    /// Same spectrum with every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        RcsSpectrum::new(
            self.grid.clone(),
            self.values.iter().map(|v| v * factor).collect(),
        )
    }

    /// Restriction to the frequencies in `[low, high]`.
    pub fn sub_band(&self, low: f64, high: f64) -> Result<Self> {
        let idx = self.grid.indices_within(low, high);
        if idx.is_empty() {
            return Err(Error::EmptySubBand { low, high });
        }
        let freqs: Vec<f64> = idx.iter().map(|&i| self.grid.frequencies()[i]).collect();
        let (band_lo, band_hi) = self.grid.band();
        let grid = FrequencyGrid::new(freqs, low.max(band_lo), high.min(band_hi))?;
        let values = idx.iter().map(|&i| self.values[i]).collect();
        RcsSpectrum::new(grid, values)
    }
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Coherent (specular) Kirchhoff RCS over area `area` (m²).
///
/// The angular factor decays as `exp(-θ²/β_c²)`.
pub fn coherent_rcs(soil: &SoilDescriptor, frequency_hz: f64, theta_i: f64, area: f64) -> f64 {
    let beta2 = soil.scattering_beamwidth * soil.scattering_beamwidth;
    let gamma = fresnel_reflectivity(soil.permittivity);
    area * gamma / beta2 * soil.roughness_factor(frequency_hz) * (-theta_i * theta_i / beta2).exp()
}

/// Diffuse first-order small-perturbation RCS over area `area` (m²), with an
/// exponential surface correlation; mean of the HH and VV channels.
pub fn incoherent_rcs(
    soil: &SoilDescriptor,
    frequency_hz: f64,
    theta_i: f64,
    area: f64,
) -> Result<f64> {
    let k = wavenumber(frequency_hz);
    let s = soil.roughness_height;
    if k * s >= SPM_KS_LIMIT {
        return Err(Error::ApproximationOutOfRange {
            model: "small perturbation",
            quantity: "k*s",
            value: k * s,
            limit: SPM_KS_LIMIT,
        });
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let l = soil.correlation_length();
    let (sin_t, cos_t) = theta_i.sin_cos();
    let eps = soil.permittivity.to_complex();
    let root = (eps - sin_t * sin_t).sqrt();
    let alpha_hh = (cos_t - root) / (cos_t + root);
    let alpha_vv = (eps - 1.0) * (sin_t * sin_t - eps * (1.0 + sin_t * sin_t))
        / (eps * cos_t + root).powi(2);
    let spectrum = {
        let kl = 2.0 * k * sin_t * l;
        l * l / (1.0 + kl * kl).powf(1.5)
    };
    let pol = 0.5 * (alpha_hh.norm_sqr() + alpha_vv.norm_sqr());
    let sigma0 = 8.0 * k.powi(4) * s * s * cos_t.powi(4) * pol * spectrum;
    Ok(sigma0 * area)
}

/// `A = π (R tan(θ_e/2))²`.
pub fn effective_area(view: &ViewGeometry) -> f64 {
    let r = view.altitude * (0.5 * view.effective_beamwidth).tan();
    PI * r * r
}

/// Forward-model RCS spectrum `σ_s(f) = Υ²(θ_e, f) σ_coh(θ_e, f)`.
pub fn scene_rcs(
    canopy: &CanopyDescriptor,
    soil: &SoilDescriptor,
    view: &ViewGeometry,
    grid: &FrequencyGrid,
) -> Result<RcsSpectrum> {
    soil.validate()?;
    view.validate()?;
    canopy.validate()?;
    let area = effective_area(view);
    let theta = view.effective_beamwidth;
    let values = grid
        .iter()
        .map(|f| {
            let upsilon = transmissivity(canopy, f, theta)?;
            Ok(upsilon * upsilon * coherent_rcs(soil, f, theta, area))
        })
        .collect::<Result<Vec<_>>>()?;
    RcsSpectrum::new(grid.clone(), values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidenceRow {
    pub theta_i: f64,
    pub coherent: f64,
    pub incoherent: f64,
}

/// Coherent and diffuse components against incidence angle at one
/// frequency, both attenuated by the two-way canopy loss at that angle.
pub fn rcs_vs_incidence(
    soil: &SoilDescriptor,
    canopy: &CanopyDescriptor,
    view: &ViewGeometry,
    frequency_hz: f64,
    thetas: &[f64],
) -> Result<Vec<IncidenceRow>> {
    let area = effective_area(view);
    thetas
        .iter()
        .map(|&theta_i| {
            let upsilon = transmissivity(canopy, frequency_hz, theta_i)?;
            let loss = upsilon * upsilon;
            Ok(IncidenceRow {
                theta_i,
                coherent: loss * coherent_rcs(soil, frequency_hz, theta_i, area),
                incoherent: loss * incoherent_rcs(soil, frequency_hz, theta_i, area)?,
            })
        })
        .collect()
}

/// First angle at which the diffuse term exceeds the coherent one.
pub fn crossover_angle(rows: &[IncidenceRow]) -> Option<f64> {
    rows.iter()
        .find(|r| r.incoherent > r.coherent)
        .map(|r| r.theta_i)
}
