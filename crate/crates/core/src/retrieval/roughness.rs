use serde::Serialize;

use super::{Retriever, SearchConfig};
use crate::canopy::CanopyDescriptor;
use crate::em::SoilMoisture;
use crate::error::Result;
use crate::ground::{RcsSpectrum, SoilDescriptor, ViewGeometry};

/// Largest roughness height tried, m.
pub const ROUGHNESS_MAX: f64 = 0.05;
/// Spacing of the tried roughness heights, m.
pub const ROUGHNESS_STEP: f64 = 0.0005;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoughnessCalibration {
    /// m.
    pub roughness_height: f64,
    /// `|retrieved - known|` at that roughness.
    pub vwc_error: f64,
    pub residual: f64,
    /// False when the best error is reached at non-adjacent roughness values.
    pub unique: bool,
    /// `(s, vwc error)` for every tried value.
    pub curve: Vec<(f64, f64)>,
}

/// Picks the roughness height in `[0, 5 cm]` (0.5 mm steps) whose bare-soil
/// retrieval best matches a known moisture.
///
/// Equal moisture errors are broken by the smaller spectral residual; the
/// canopy term is always disabled.
pub fn calibrate_roughness(
    bare: &RcsSpectrum,
    known: SoilMoisture,
    soil_template: &SoilDescriptor,
    view: &ViewGeometry,
    cfg: &SearchConfig,
) -> Result<RoughnessCalibration> {
    let cfg = cfg.clone().without_canopy();
    let canopy = CanopyDescriptor::bare();
    let steps = (ROUGHNESS_MAX / ROUGHNESS_STEP).round() as usize;
    let mut rows = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let s = k as f64 * ROUGHNESS_STEP;
        let soil = soil_template.with_roughness(s);
        let r = Retriever::new(bare.grid().frequencies(), &canopy, &soil, view, &cfg)?.retrieve(bare)?;
        rows.push((s, (r.vwc.value() - known.value()).abs(), r.residual));
    }
    let best_err = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = (0..rows.len()).filter(|&k| rows[k].1 == best_err).collect();
    let unique = tied.windows(2).all(|w| w[1] == w[0] + 1);
    let &pick = tied
        .iter()
        .min_by(|&&a, &&b| rows[a].2.total_cmp(&rows[b].2))
        .expect("at least one roughness value is tried");
    Ok(RoughnessCalibration {
        roughness_height: rows[pick].0,
        vwc_error: rows[pick].1,
        residual: rows[pick].2,
        unique,
        curve: rows.iter().map(|r| (r.0, r.1)).collect(),
    })
}
