//! Leaf area index from layered gap fractions and the leaf density derived
//! from it.

use serde::{Deserialize, Serialize};

use crate::cloud::{PointCloud, Tile};
use crate::error::{LidarError, Result};

/// How the per-layer log gap-fraction steps are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaiForm {
    /// `-(1/G) Σ Δln P_gap`: one-sided leaf area per ground area.
    #[default]
    Integrated,
    /// `-(1/G) Σ Δln P_gap / v_z`: the same sum divided by the layer
    /// thickness, which has units of m⁻¹.
    PerLayerThickness,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LaiConfig {
    pub layers: usize,
    /// Mean projection of unit leaf area onto the plane normal to the
    /// pulse; 0.5 for randomly oriented leaves.
    pub projection: f64,
    /// Returns at or below this height count as ground hits, m.
    pub ground_tolerance: f64,
    pub form: LaiForm,
}

impl Default for LaiConfig {
    fn default() -> Self {
        LaiConfig {
            layers: 8,
            projection: 0.5,
            ground_tolerance: 0.05,
            form: LaiForm::Integrated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaiEstimate {
    pub lai: f64,
    pub form: LaiForm,
    /// Layer boundaries from the canopy top down to the ground, m.
    pub boundaries: Vec<f64>,
    /// Fraction of pulses that reached below each boundary.
    pub gap_fractions: Vec<f64>,
    /// m.
    pub layer_thickness: f64,
}

/// Combines gap fractions ordered from the canopy top down.
pub fn lai_from_gap_fractions(gap_fractions: &[f64], layer_thickness: f64, cfg: &LaiConfig) -> Result<f64> {
    if !(cfg.projection > 0.0) {
        return Err(LidarError::invalid("leaf projection coefficient", "must be > 0"));
    }
    if gap_fractions.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
        return Err(LidarError::NoGroundReturns);
    }
    let sum: f64 = gap_fractions.windows(2).map(|w| w[1].ln() - w[0].ln()).sum();
    let scale = match cfg.form {
        LaiForm::Integrated => 1.0,
        LaiForm::PerLayerThickness => {
            if !(layer_thickness > 0.0) {
                return Err(LidarError::invalid("layer thickness", "must be > 0"));
            }
            1.0 / layer_thickness
        }
    };
    Ok(-sum * scale / cfg.projection)
}

/// Single-return estimate: the gap fraction at a height is the share of
/// returns from below it, with the ground level taken at the ground
/// tolerance. A tile with only ground returns has LAI 0; one with no
/// ground returns is saturated and rejected.
pub fn estimate_lai(cloud: &PointCloud, tile: &Tile, cfg: &LaiConfig) -> Result<LaiEstimate> {
    if cfg.layers == 0 {
        return Err(LidarError::invalid("layer count", "must be >= 1"));
    }
    let mut z: Vec<f64> = cloud
        .points
        .iter()
        .filter(|p| tile.contains(p[0], p[1]))
        .map(|p| p[2])
        .collect();
    if z.is_empty() {
        return Err(LidarError::EmptyTile);
    }
    z.sort_by(f64::total_cmp);
    let total = z.len() as f64;
    let top = z[z.len() - 1].max(cfg.ground_tolerance);
    let thickness = top / cfg.layers as f64;
    let mut boundaries: Vec<f64> = (0..cfg.layers).map(|k| top - k as f64 * thickness).collect();
    boundaries.push(cfg.ground_tolerance.min(top));
    let below = |h: f64| z.partition_point(|&v| v <= h) as f64 / total;
    let gap_fractions: Vec<f64> = boundaries.iter().map(|&b| below(b)).collect();
    let lai = lai_from_gap_fractions(&gap_fractions, thickness, cfg)?;
    Ok(LaiEstimate {
        lai,
        form: cfg.form,
        boundaries,
        gap_fractions,
        layer_thickness: thickness,
    })
}

/// Leaf counts implied by an LAI and a mean single-leaf area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeafDensity {
    /// leaves/m² of ground.
    pub per_area: f64,
    /// leaves/m³ of canopy layer.
    pub per_volume: f64,
}

pub fn leaf_density(lai: f64, leaf_area: f64, canopy_height: f64) -> Result<LeafDensity> {
    if !(leaf_area > 0.0) {
        return Err(LidarError::invalid("leaf area", format!("{leaf_area} m², must be > 0")));
    }
    if !(lai >= 0.0) {
        return Err(LidarError::invalid("leaf area index", format!("{lai}, must be >= 0")));
    }
    let per_area = lai / leaf_area;
    let per_volume = if per_area == 0.0 {
        0.0
    } else if canopy_height > 0.0 {
        per_area / canopy_height
    } else {
        return Err(LidarError::invalid("canopy height", "must be > 0 when leaves are present"));
    };
    Ok(LeafDensity { per_area, per_volume })
}
