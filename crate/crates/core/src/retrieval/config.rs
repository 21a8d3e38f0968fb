use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evenly spaced real permittivity values, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisGrid {
    pub low: f64,
    pub high: f64,
    pub count: usize,
}

impl AxisGrid {
    pub fn new(low: f64, high: f64, count: usize) -> Result<Self> {
        let g = AxisGrid { low, high, count };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::invalid("search grid", "needs at least one value"));
        }
        if !(self.low >= 1.0) || !self.high.is_finite() {
            return Err(Error::invalid("search grid", "values must be finite and >= 1"));
        }
        if self.count > 1 && !(self.high > self.low) {
            return Err(Error::invalid("search grid", "must be strictly increasing"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        if self.count > 1 {
            (self.high - self.low) / (self.count - 1) as f64
        } else {
            0.0
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.high
        } else {
            self.low + self.step() * i as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

/// How the spectral misfit is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualMode {
    /// `Σ (σ_s - σ_m)²` in m⁴.
    #[default]
    Linear,
    /// `Σ (10 log σ_s - 10 log σ_m)²` in dB².
    Decibel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub soil_grid: AxisGrid,
    pub canopy_grid: AxisGrid,
    /// `ε''/ε'` tied to every soil candidate.
    pub soil_loss_tangent: f64,
    /// `ε''/ε'` tied to every canopy candidate.
    pub canopy_loss_tangent: f64,
    /// Optional `[low, high]` restriction of the fitted frequencies, Hz.
    pub sub_band: Option<(f64, f64)>,
    pub canopy_modeling: bool,
    pub residual: ResidualMode,
    /// Evaluate grid rows on the rayon pool; the result is identical.
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            soil_grid: AxisGrid {
                low: 2.0,
                high: 40.0,
                count: 500,
            },
            canopy_grid: AxisGrid {
                low: 1.5,
                high: 40.0,
                count: 500,
            },
            soil_loss_tangent: 0.15,
            canopy_loss_tangent: 0.30,
            sub_band: None,
            canopy_modeling: true,
            residual: ResidualMode::Linear,
            parallel: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        self.soil_grid.validate()?;
        self.canopy_grid.validate()?;
        for (name, t) in [
            ("soil loss tangent", self.soil_loss_tangent),
            ("canopy loss tangent", self.canopy_loss_tangent),
        ] {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::invalid(name, "must be finite and >= 0"));
            }
        }
        if let Some((lo, hi)) = self.sub_band {
            if !(lo <= hi) {
                return Err(Error::EmptySubBand { low: lo, high: hi });
            }
        }
        Ok(())
    }

    pub fn with_sub_band(mut self, low: f64, high: f64) -> Self {
        self.sub_band = Some((low, high));
        self
    }

    pub fn without_canopy(mut self) -> Self {
        self.canopy_modeling = false;
        self
    }
}
