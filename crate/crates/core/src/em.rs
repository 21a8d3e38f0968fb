//! Basic electromagnetic quantities shared by every model in the crate.
//!
//! Time dependence is `exp(-iωt)`, so lossy media carry a positive imaginary
//! permittivity and the principal square root keeps `Im √ε ≥ 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Relative complex permittivity `ε' + iε''` with `ε' ≥ 1` and `ε'' ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPermittivity")]
pub struct ComplexPermittivity {
    real_part: f64,
    imag_part: f64,
}

#[derive(Deserialize)]
struct RawPermittivity {
    real_part: f64,
    #[serde(default)]
    imag_part: f64,
}

impl TryFrom<RawPermittivity> for ComplexPermittivity {
    type Error = Error;

    fn try_from(raw: RawPermittivity) -> Result<Self> {
        ComplexPermittivity::new(raw.real_part, raw.imag_part)
    }
}

impl ComplexPermittivity {
    pub const VACUUM: ComplexPermittivity = ComplexPermittivity {
        real_part: 1.0,
        imag_part: 0.0,
    };

    pub fn new(real_part: f64, imag_part: f64) -> Result<Self> {
        if !(real_part >= 1.0) || !real_part.is_finite() {
            return Err(Error::invalid(
                "permittivity",
                format!("real part must be >= 1, got {real_part}"),
            ));
        }
        if !(imag_part >= 0.0) || !imag_part.is_finite() {
            return Err(Error::invalid(
                "permittivity",
                format!("imaginary part must be >= 0, got {imag_part}"),
            ));
        }
        Ok(ComplexPermittivity {
            real_part,
            imag_part,
        })
    }

    pub fn lossless(real_part: f64) -> Result<Self> {
        Self::new(real_part, 0.0)
    }

    /// `ε' (1 + i tan δ)`.
    pub fn with_loss_tangent(real_part: f64, loss_tangent: f64) -> Result<Self> {
        Self::new(real_part, real_part * loss_tangent)
    }

    pub fn real_part(&self) -> f64 {
        self.real_part
    }

    pub fn imag_part(&self) -> f64 {
        self.imag_part
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.real_part, self.imag_part)
    }

    /// Principal square root (refractive index), `Im ≥ 0`.
    pub fn refractive_index(self) -> Complex64 {
        self.to_complex().sqrt()
    }
}

impl std::fmt::Display for ComplexPermittivity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}+{}i", self.real_part, self.imag_part)
    }
}

/// Strictly increasing list of frequencies inside a band.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    frequencies: Vec<f64>,
    band_low: f64,
    band_high: f64,
}

impl FrequencyGrid {
    pub fn new(frequencies: Vec<f64>, band_low: f64, band_high: f64) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::invalid("frequency grid", "grid is empty"));
        }
        if !(band_low > 0.0) || !(band_high >= band_low) {
            return Err(Error::invalid(
                "frequency grid",
                format!("bad band limits [{band_low}, {band_high}]"),
            ));
        }
        if frequencies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(
                "frequency grid",
                "frequencies must be strictly increasing",
            ));
        }
        if frequencies
            .iter()
            .any(|&f| !(f >= band_low && f <= band_high))
        {
            return Err(Error::invalid(
                "frequency grid",
                format!("frequencies must lie in [{band_low}, {band_high}] Hz"),
            ));
        }
        Ok(FrequencyGrid {
            frequencies,
            band_low,
            band_high,
        })
    }

    /// Grid spanning its own extent.
    pub fn from_frequencies(frequencies: Vec<f64>) -> Result<Self> {
        let (lo, hi) = match (frequencies.first(), frequencies.last()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => return Err(Error::invalid("frequency grid", "grid is empty")),
        };
        Self::new(frequencies, lo, hi)
    }

    /// `n` evenly spaced points covering `[low, high]` inclusive.
    pub fn linspace(low: f64, high: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("frequency grid", "need at least one point"));
        }
        let freqs = if n == 1 {
            vec![low]
        } else {
            let step = (high - low) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { high } else { low + step * i as f64 })
                .collect()
        };
        Self::new(freqs, low, high)
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn band(&self) -> (f64, f64) {
        (self.band_low, self.band_high)
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.frequencies.iter().copied()
    }

    /// Indices of the grid points inside `[low, high]`.
    pub fn indices_within(&self, low: f64, high: f64) -> Vec<usize> {
        self.frequencies
            .iter()
            .enumerate()
            .filter(|(_, &f)| f >= low && f <= high)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Volumetric water content as a fraction in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SoilMoisture(f64);

impl SoilMoisture {
    pub fn new(vwc: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&vwc) {
            return Err(Error::invalid(
                "soil moisture",
                format!("vwc must be within [0, 1], got {vwc}"),
            ));
        }
        Ok(SoilMoisture(vwc))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for SoilMoisture {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        SoilMoisture::new(v)
    }
}

impl From<SoilMoisture> for f64 {
    fn from(m: SoilMoisture) -> f64 {
        m.0
    }
}

/// Power reflectivity of a planar soil boundary at normal incidence,
/// `|(1 - √ε)/(1 + √ε)|²`.
pub fn fresnel_reflectivity(eps: ComplexPermittivity) -> f64 {
    let n = eps.refractive_index();
    ((1.0 - n) / (1.0 + n)).norm_sqr()
}

/// Complex amplitude reflection coefficient at normal incidence.
pub fn fresnel_amplitude(eps: ComplexPermittivity) -> Complex64 {
    let n = eps.refractive_index();
    (1.0 - n) / (1.0 + n)
}

pub fn wavenumber(frequency_hz: f64) -> f64 {
    2.0 * PI * frequency_hz / SPEED_OF_LIGHT
}

pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

/// Cubic permittivity-to-moisture relation. The defaults are the generic
/// mineral-soil fit of Topp, Davis and Annan (1980).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToppModel {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Default for ToppModel {
    fn default() -> Self {
        ToppModel {
            c0: -5.3e-2,
            c1: 2.92e-2,
            c2: -5.5e-4,
            c3: 4.3e-6,
        }
    }
}

impl ToppModel {
    /// Bracket searched by [`ToppModel::permittivity`].
    pub const INVERSION_RANGE: (f64, f64) = (1.5, 45.0);

    fn polynomial(&self, eps: f64) -> f64 {
        self.c0 + eps * (self.c1 + eps * (self.c2 + eps * self.c3))
    }

    /// Moisture for a real permittivity; the empirical fit goes negative
    /// below ε ≈ 1.8 and is floored at zero.
    pub fn vwc(&self, eps_real: f64) -> SoilMoisture {
        SoilMoisture(self.polynomial(eps_real).clamp(0.0, 1.0))
    }

    /// Inverse of [`ToppModel::vwc`] by bisection over ε ∈ [1.5, 45].
    pub fn permittivity(&self, vwc: SoilMoisture) -> Result<f64> {
        let target = vwc.value();
        if target > 0.6 {
            return Err(Error::NoSolution {
                vwc: target,
                max: self.range_max(),
            });
        }
        let (mut lo, mut hi) = Self::INVERSION_RANGE;
        let g = |e: f64| self.polynomial(e) - target;
        let (mut g_lo, g_hi) = (g(lo), g(hi));
        if g_lo > 0.0 && target > 0.0 {
            return Err(Error::invalid(
                "soil moisture",
                format!("vwc {target} is below the polynomial value at eps = {lo}"),
            ));
        }
        if g_hi < 0.0 {
            return Err(Error::NoSolution {
                vwc: target,
                max: self.range_max(),
            });
        }
        if g_lo > 0.0 {
            // vwc = 0 with a polynomial already positive at the bracket floor
            return Ok(lo);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let g_mid = g(mid);
            if g_mid.abs() < 1e-12 || hi - lo < 1e-13 {
                return Ok(mid);
            }
            if (g_mid < 0.0) == (g_lo < 0.0) {
                lo = mid;
                g_lo = g_mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Largest moisture reachable on the inversion bracket.
    pub fn range_max(&self) -> f64 {
        let (lo, hi) = Self::INVERSION_RANGE;
        (0..=1000)
            .map(|i| self.polynomial(lo + (hi - lo) * i as f64 / 1000.0))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn topp_vwc(eps_real: f64) -> SoilMoisture {
    ToppModel::default().vwc(eps_real)
}

pub fn topp_permittivity(vwc: SoilMoisture) -> Result<f64> {
    ToppModel::default().permittivity(vwc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(re: f64, im: f64) -> ComplexPermittivity {
        ComplexPermittivity::new(re, im).unwrap()
    }

    #[test]
    fn fresnel_hand_values() {
        assert_eq!(fresnel_reflectivity(eps(1.0, 0.0)), 0.0);
        assert!((fresnel_reflectivity(eps(4.0, 0.0)) - 1.0 / 9.0).abs() < 1e-12);
        assert!((fresnel_reflectivity(eps(81.0, 0.0)) - 0.64).abs() < 1e-12);
    }

    #[test]
    fn permittivity_rejects_unphysical_values() {
        assert!(ComplexPermittivity::new(0.5, 0.0).is_err());
        assert!(ComplexPermittivity::new(4.0, -0.1).is_err());
        assert!(ComplexPermittivity::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn topp_polynomial_values() {
        // -0.053 + 0.584 - 0.22 + 0.0344
        assert!((topp_vwc(20.0).value() - 0.3454).abs() < 1e-12);
        // -0.053 + 0.0292 - 0.00055 + 0.0000043 = -0.0243457 -> clamped
        assert_eq!(topp_vwc(1.0).value(), 0.0);
    }

    #[test]
    fn topp_monotone_on_3_to_40() {
        let mut prev = topp_vwc(3.0).value();
        for i in 1..=370 {
            let v = topp_vwc(3.0 + i as f64 * 0.1).value();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn topp_inverse_round_trip() {
        let eps = topp_permittivity(topp_vwc(20.0)).unwrap();
        assert!((eps - 20.0).abs() < 1e-6);
    }

    #[test]
    fn topp_inverse_matches_independent_bisection() {
        // plain bisection on the unclamped polynomial, written out separately
        let p = |e: f64| -5.3e-2 + 2.92e-2 * e - 5.5e-4 * e * e + 4.3e-6 * e * e * e;
        let (mut lo, mut hi) = (1.5_f64, 45.0_f64);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if p(mid) < 0.11 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let got = topp_permittivity(SoilMoisture::new(0.11).unwrap()).unwrap();
        assert!((got - lo).abs() < 1e-6);
        assert!((topp_vwc(got).value() - 0.11).abs() < 1e-6);
    }

    #[test]
    fn topp_inverse_out_of_range() {
        let err = topp_permittivity(SoilMoisture::new(0.99).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NoSolution { .. }));
        // polynomial tops out at ~0.539 at eps = 45
        let err = topp_permittivity(SoilMoisture::new(0.55).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NoSolution { .. }));
    }

    #[test]
    fn wavenumber_values() {
        let f = SPEED_OF_LIGHT / (2.0 * PI);
        assert!((wavenumber(f) - 1.0).abs() < 1e-12);
        assert!((wavenumber(300e6) - 6.287_535).abs() < 1e-5);
        assert_eq!(wavenumber(2.0 * 450e6), 2.0 * wavenumber(450e6));
    }

    #[test]
    fn grid_validation() {
        assert!(FrequencyGrid::new(vec![], 1.0, 2.0).is_err());
        assert!(FrequencyGrid::new(vec![3e8, 3e8], 2e8, 9e8).is_err());
        assert!(FrequencyGrid::new(vec![1e8], 2e8, 9e8).is_err());
        let g = FrequencyGrid::linspace(2e8, 9e8, 8).unwrap();
        assert_eq!(g.frequencies()[0], 2e8);
        assert_eq!(*g.frequencies().last().unwrap(), 9e8);
        assert_eq!(g.indices_within(8e8, 9e8), vec![6, 7]);
    }

    #[test]
    fn soil_moisture_bounds() {
        assert!(SoilMoisture::new(-0.01).is_err());
        assert!(SoilMoisture::new(1.01).is_err());
        assert!(SoilMoisture::new(0.3).is_ok());
    }
}
