//! Joint grid-search inversion of soil and canopy permittivity.
//!
//! Every candidate pair `(ε_s, ε_c)` on a 500 x 500 grid is pushed through
//! the forward model `Υ²(ε_c) σ_coh(ε_s)` and compared with the measured
//! spectrum; the global minimizer wins. Because the forward model factors
//! into a soil term and a canopy term, both are tabulated once per
//! frequency and each cell costs only a product and a subtraction.

mod config;
mod roughness;
mod sweep;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canopy::{CanopyDescriptor, ExtinctionKernel};
use crate::em::{topp_vwc, ComplexPermittivity, SoilMoisture};
use crate::error::{Error, Result};
use crate::ground::{coherent_rcs, effective_area, RcsSpectrum, SoilDescriptor, ViewGeometry};

pub use config::{AxisGrid, ResidualMode, SearchConfig};
pub use roughness::{calibrate_roughness, RoughnessCalibration, ROUGHNESS_MAX, ROUGHNESS_STEP};
pub use sweep::{
    sweep_altitude, sweep_bandwidth, sweep_canopy_ablation, sweep_effective_beamwidth,
    AblationRow, AltitudeRow, BandRow, BeamwidthRow,
};

/// Simulated and measured RCS at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPair {
    pub frequency_hz: f64,
    pub simulated: f64,
    pub measured: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchDiagnostics {
    pub soil_index: usize,
    pub canopy_index: usize,
    pub soil_at_boundary: bool,
    /// Never set when the canopy term is inert (no canopy or modeling off).
    pub canopy_at_boundary: bool,
    pub cells_evaluated: usize,
    pub frequencies_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievalResult {
    pub soil_permittivity: ComplexPermittivity,
    pub canopy_permittivity: ComplexPermittivity,
    pub vwc: SoilMoisture,
    /// m⁴ in linear mode, dB² in decibel mode.
    pub residual: f64,
    pub pairs: Vec<SpectrumPair>,
    pub diagnostics: SearchDiagnostics,
}

/// Forward-model tables for one canopy structure, soil template, view and
/// frequency grid; reusable across measured spectra on that grid.
#[derive(Debug, Clone)]
pub struct Retriever {
    cfg: SearchConfig,
    frequencies: Vec<f64>,
    soil_values: Vec<f64>,
    canopy_values: Vec<f64>,
    /// `[soil][freq]` coherent RCS.
    ground: Vec<Vec<f64>>,
    /// `[canopy][freq]` two-way transmissivity; a single row of ones when the
    /// canopy term is inert.
    two_way: Vec<Vec<f64>>,
    /// The two tables in dB, kept only for the decibel residual.
    decibel: Option<(Vec<Vec<f64>>, Vec<Vec<f64>>)>,
    canopy_active: bool,
}

impl Retriever {
    /// Tabulates the forward model on `frequencies` (the sub-band in `cfg`,
    /// if any, is applied here).
    pub fn new(
        frequencies: &[f64],
        canopy: &CanopyDescriptor,
        soil_template: &SoilDescriptor,
        view: &ViewGeometry,
        cfg: &SearchConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        soil_template.validate()?;
        view.validate()?;
        let frequencies: Vec<f64> = match cfg.sub_band {
            Some((lo, hi)) => frequencies
                .iter()
                .copied()
                .filter(|&f| f >= lo && f <= hi)
                .collect(),
            None => frequencies.to_vec(),
        };
        if frequencies.is_empty() {
            let (lo, hi) = cfg.sub_band.unwrap_or((f64::NAN, f64::NAN));
            return Err(Error::EmptySubBand { low: lo, high: hi });
        }

        let theta = view.effective_beamwidth;
        let area = effective_area(view);
        let soil_values = cfg.soil_grid.values();
        let ground = soil_values
            .iter()
            .map(|&e| {
                let soil = soil_template
                    .with_permittivity(ComplexPermittivity::with_loss_tangent(e, cfg.soil_loss_tangent)?);
                Ok(frequencies
                    .iter()
                    .map(|&f| coherent_rcs(&soil, f, theta, area))
                    .collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;

        let kernel = ExtinctionKernel::new(canopy, theta)?;
        let canopy_active = cfg.canopy_modeling && !kernel.is_empty();
        let canopy_values = cfg.canopy_grid.values();
        let two_way = if canopy_active {
            canopy_values
                .iter()
                .map(|&e| {
                    let eps = ComplexPermittivity::with_loss_tangent(e, cfg.canopy_loss_tangent)?;
                    frequencies
                        .iter()
                        .map(|&f| kernel.transmissivity(eps, f).map(|t| t * t))
                        .collect()
                })
                .collect::<Result<Vec<Vec<f64>>>>()?
        } else {
            vec![vec![1.0; frequencies.len()]]
        };

        let to_db = |t: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            t.iter()
                .map(|row| row.iter().map(|v| 10.0 * v.log10()).collect())
                .collect()
        };
        let decibel = (cfg.residual == ResidualMode::Decibel).then(|| (to_db(&ground), to_db(&two_way)));

        Ok(Retriever {
            cfg: cfg.clone(),
            decibel,
            frequencies,
            soil_values,
            canopy_values,
            ground,
            two_way,
            canopy_active,
        })
    }

    pub fn config(&self) -> &SearchConfig {
        &self.cfg
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// Residual of one grid cell against `measured` (already restricted to
    /// this retriever's frequencies, and in dB for the decibel residual).
    pub fn cell_residual(&self, soil_index: usize, canopy_index: usize, measured: &[f64]) -> f64 {
        let j = if self.canopy_active { canopy_index } else { 0 };
        let (g, t) = match &self.decibel {
            Some((g, t)) => (&g[soil_index], &t[j]),
            None => (&self.ground[soil_index], &self.two_way[j]),
        };
        match self.cfg.residual {
            ResidualMode::Linear => g
                .iter()
                .zip(t)
                .zip(measured)
                .map(|((g, t), m)| {
                    let d = g * t - m;
                    d * d
                })
                .sum(),
            ResidualMode::Decibel => g
                .iter()
                .zip(t)
                .zip(measured)
                .map(|((g, t), m)| {
                    let d = g + t - m;
                    d * d
                })
                .sum(),
        }
    }

    /// Measured values on this retriever's frequencies, in the units the
    /// residual works in.
    pub fn prepare(&self, measured: &RcsSpectrum) -> Result<Vec<f64>> {
        let meas = self.restrict(measured)?;
        if meas.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroSpectrum);
        }
        if self.cfg.residual == ResidualMode::Decibel {
            if meas.iter().any(|&v| !(v > 0.0)) {
                return Err(Error::invalid(
                    "measured spectrum",
                    "decibel residuals need strictly positive values",
                ));
            }
            return Ok(meas.iter().map(|v| 10.0 * v.log10()).collect());
        }
        Ok(meas)
    }

    fn restrict(&self, measured: &RcsSpectrum) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.frequencies.len());
        let mut it = measured.iter();
        for &f in &self.frequencies {
            let v = it
                .by_ref()
                .find(|&(g, _)| g == f)
                .map(|(_, v)| v)
                .ok_or_else(|| {
                    Error::GridMismatch(format!(
                        "measured spectrum has no value at {f} Hz used by the forward model"
                    ))
                })?;
            out.push(v);
        }
        Ok(out)
    }

    /// Exhaustive search; ties go to the lowest soil then lowest canopy
    /// permittivity.
    pub fn retrieve(&self, measured: &RcsSpectrum) -> Result<RetrievalResult> {
        let meas = self.prepare(measured)?;
        let n_canopy = if self.canopy_active {
            self.canopy_values.len()
        } else {
            1
        };
        let row_best = |i: usize| {
            let mut best = (f64::INFINITY, 0usize);
            for j in 0..n_canopy {
                let r = self.cell_residual(i, j, &meas);
                let r = if r.is_nan() { f64::INFINITY } else { r };
                if r < best.0 {
                    best = (r, j);
                }
            }
            best
        };
        let rows: Vec<(f64, usize)> = if self.cfg.parallel {
            (0..self.soil_values.len()).into_par_iter().map(row_best).collect()
        } else {
            (0..self.soil_values.len()).map(row_best).collect()
        };
        let mut best = (f64::INFINITY, 0usize, 0usize);
        for (i, &(r, j)) in rows.iter().enumerate() {
            if r < best.0 {
                best = (r, i, j);
            }
        }
        let (residual, i, j) = best;
        if !residual.is_finite() {
            return Err(Error::invalid("retrieval", "no grid cell gave a finite residual"));
        }

        let soil_eps = ComplexPermittivity::with_loss_tangent(self.soil_values[i], self.cfg.soil_loss_tangent)?;
        let canopy_eps =
            ComplexPermittivity::with_loss_tangent(self.canopy_values[j], self.cfg.canopy_loss_tangent)?;
        let linear = self.restrict(measured)?;
        let t = &self.two_way[if self.canopy_active { j } else { 0 }];
        let pairs = self
            .frequencies
            .iter()
            .zip(&self.ground[i])
            .zip(t)
            .zip(&linear)
            .map(|(((&f, g), t), &m)| SpectrumPair {
                frequency_hz: f,
                simulated: g * t,
                measured: m,
            })
            .collect();
        let last = |n: usize, k: usize| k == 0 || k + 1 == n;
        Ok(RetrievalResult {
            soil_permittivity: soil_eps,
            canopy_permittivity: canopy_eps,
            vwc: topp_vwc(soil_eps.real_part()),
            residual,
            pairs,
            diagnostics: SearchDiagnostics {
                soil_index: i,
                canopy_index: j,
                soil_at_boundary: last(self.soil_values.len(), i),
                canopy_at_boundary: self.canopy_active && last(n_canopy, j),
                cells_evaluated: self.soil_values.len() * n_canopy,
                frequencies_used: self.frequencies.len(),
            },
        })
    }
}

/// One-shot retrieval: tabulate the forward model on the measured grid and
/// search it.
pub fn retrieve(
    measured: &RcsSpectrum,
    canopy: &CanopyDescriptor,
    soil_template: &SoilDescriptor,
    view: &ViewGeometry,
    cfg: &SearchConfig,
) -> Result<RetrievalResult> {
    Retriever::new(measured.grid().frequencies(), canopy, soil_template, view, cfg)?.retrieve(measured)
}

/// Multiplies every bin by `10^(n/10)` with `n ~ N(0, sigma_db)`.
pub fn apply_multiplicative_noise<R: Rng + ?Sized>(
    spectrum: &RcsSpectrum,
    sigma_db: f64,
    rng: &mut R,
) -> Result<RcsSpectrum> {
    let normal = Normal::new(0.0, sigma_db)
        .map_err(|_| Error::invalid("noise level", "must be finite and >= 0"))?;
    let values = spectrum
        .values()
        .iter()
        .map(|v| v * 10f64.powf(normal.sample(rng) / 10.0))
        .collect();
    RcsSpectrum::new(spectrum.grid().clone(), values)
}
