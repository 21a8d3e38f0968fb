//! Whole-tile canopy structure estimate and its conversion into a forward
//! model canopy description.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use soilscan_core::canopy::{CanopyDescriptor, CropKind, CylinderGeometry, DiskGeometry, OrientationDistribution};
use soilscan_core::em::ComplexPermittivity;

use crate::chm::{build_chm, CanopyHeightModel};
use crate::cloud::{PointCloud, Tile};
use crate::density::{plant_density_corn, plant_density_soybean, CornDensityConfig, SoybeanDensityConfig};
use crate::error::{LidarError, Result};
use crate::ground::{normalize_ground, GroundConfig};
use crate::lai::{estimate_lai, leaf_density, LaiConfig, LaiForm};
use crate::rows::{detect_rows, RowAxis, RowConfig};

/// Fraction of the 95th-percentile canopy height above which a raster cell
/// counts as vegetated.
pub const VEGETATED_FRACTION: f64 = 0.25;

/// Mean CHM height over vegetated cells; 0 for a bare tile.
pub fn canopy_height(chm: &CanopyHeightModel) -> f64 {
    let threshold = VEGETATED_FRACTION * chm.quantile(0.95);
    if !(threshold > 0.0) {
        return 0.0;
    }
    let (sum, n) = chm
        .values
        .iter()
        .filter(|&&v| v > threshold)
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Crop-specific leaf and stalk dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllometryEntry {
    pub crop_kind: CropKind,
    /// Mean one-sided area of a single leaf, m².
    pub leaf_area: f64,
    /// m.
    pub leaf_width: f64,
    /// m; 0 when stalks are not modeled.
    pub stalk_radius: f64,
}

pub const ALLOMETRY_HEADER: &str = "crop_kind,leaf_area_m2,leaf_width_m,stalk_radius_m";

/// Mature corn (0.8 m × 8 cm leaves, 1.2 cm stalks) and soybean (3 cm
/// leaflets, stalks not modeled).
pub fn default_allometry() -> Vec<AllometryEntry> {
    vec![
        AllometryEntry {
            crop_kind: CropKind::Corn,
            leaf_area: 0.8 * 0.08,
            leaf_width: 0.08,
            stalk_radius: 0.012,
        },
        AllometryEntry {
            crop_kind: CropKind::Soybean,
            leaf_area: std::f64::consts::PI * 0.03 * 0.03,
            leaf_width: 0.06,
            stalk_radius: 0.0,
        },
    ]
}

pub fn parse_allometry(text: &str) -> Result<Vec<AllometryEntry>> {
    let err = |line: usize, message: String| LidarError::Parse {
        path: String::new(),
        line,
        message,
    };
    let mut out = Vec::new();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            if line.replace(' ', "") != ALLOMETRY_HEADER {
                return Err(err(n, format!("expected header `{ALLOMETRY_HEADER}`, found {line:?}")));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(err(n, format!("expected 4 fields, found {}", fields.len())));
        }
        let crop_kind: CropKind = fields[0].parse().map_err(|e: soilscan_core::Error| err(n, e.to_string()))?;
        let num = |k: usize| {
            fields[k]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| err(n, format!("cannot parse {:?} as a non-negative number", fields[k])))
        };
        let entry = AllometryEntry {
            crop_kind,
            leaf_area: num(1)?,
            leaf_width: num(2)?,
            stalk_radius: num(3)?,
        };
        if !(entry.leaf_area > 0.0 && entry.leaf_width > 0.0) {
            return Err(err(n, "leaf area and width must be > 0".into()));
        }
        out.push(entry);
    }
    if !seen_header {
        return Err(err(0, format!("missing header `{ALLOMETRY_HEADER}`")));
    }
    Ok(out)
}

pub fn format_allometry(entries: &[AllometryEntry]) -> String {
    let mut out = format!("{ALLOMETRY_HEADER}\n");
    for e in entries {
        let _ = writeln!(out, "{},{},{},{}", e.crop_kind, e.leaf_area, e.leaf_width, e.stalk_radius);
    }
    out
}

pub fn load_allometry(path: &Path) -> Result<Vec<AllometryEntry>> {
    let text = std::fs::read_to_string(path).map_err(|source| LidarError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_allometry(&text).map_err(|e| e.at_path(path))
}

pub fn allometry_for(entries: &[AllometryEntry], crop: CropKind) -> Result<AllometryEntry> {
    entries
        .iter()
        .find(|e| e.crop_kind == crop)
        .copied()
        .ok_or_else(|| LidarError::invalid("allometry table", format!("no entry for {crop}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct StructureConfig {
    pub ground: GroundConfig,
    pub rows: RowConfig,
    pub corn: CornDensityConfig,
    pub soybean: SoybeanDensityConfig,
    pub lai: LaiConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowDiagnostics {
    /// Across-row offset, m.
    pub centerline: f64,
    pub plants: usize,
}

/// Canopy structure of one tile. `crop_kind`, `height`, `stalk_density`
/// and `leaf_density` carry the forward-model names and units (densities
/// per m³ of canopy layer).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanopyStructureEstimate {
    pub crop_kind: CropKind,
    /// Mean canopy height, m.
    pub height: f64,
    /// plants/m³.
    pub stalk_density: f64,
    /// leaves/m³.
    pub leaf_density: f64,
    /// plants/m².
    pub plant_density: f64,
    pub lai: f64,
    pub lai_form: LaiForm,
    /// leaves/m².
    pub leaf_density_per_area: f64,
    /// m².
    pub leaf_area: f64,
    pub rows_detected: bool,
    pub row_axis: Option<RowAxis>,
    /// m.
    pub row_spacing: Option<f64>,
    pub row_score: f64,
    /// m².
    pub tile_area: f64,
    pub rows: Vec<RowDiagnostics>,
}

/// Full pipeline on one tile: ground normalization, CHM, rows, plant
/// count, height, LAI and leaf density.
///
/// Without detectable rows the tile falls back to row-free statistics:
/// height and LAI are still estimated and the plant density is reported
/// as 0 with `rows_detected = false`.
pub fn estimate_structure(
    cloud: &PointCloud,
    tile: &Tile,
    crop: CropKind,
    allometry: &AllometryEntry,
    cfg: &StructureConfig,
) -> Result<CanopyStructureEstimate> {
    let local = cloud.within(tile);
    let normalized = normalize_ground(&local, &cfg.ground)?;
    let chm = build_chm(&normalized, tile)?;
    let height = canopy_height(&chm);
    let (rows_detected, row_axis, row_spacing, row_score, plants, rows) = match detect_rows(&chm, &cfg.rows) {
        Ok(seg) => {
            let d = match crop {
                CropKind::Corn => plant_density_corn(&normalized, &seg, tile, &cfg.corn)?,
                CropKind::Soybean => plant_density_soybean(&chm, &seg, tile, &cfg.soybean)?,
            };
            let rows = d
                .rows
                .iter()
                .map(|r| RowDiagnostics {
                    centerline: r.centerline,
                    plants: r.plants.len(),
                })
                .collect();
            (true, Some(seg.axis), Some(seg.spacing), seg.score, d.density, rows)
        }
        Err(LidarError::NoPeriodicity { score, .. }) => (false, None, None, score, 0.0, Vec::new()),
        Err(e) => return Err(e),
    };
    let lai = estimate_lai(&normalized, tile, &cfg.lai)?;
    let leaves = leaf_density(lai.lai, allometry.leaf_area, height)?;
    Ok(CanopyStructureEstimate {
        crop_kind: crop,
        height,
        stalk_density: if height > 0.0 { plants / height } else { 0.0 },
        leaf_density: leaves.per_volume,
        plant_density: plants,
        lai: lai.lai,
        lai_form: lai.form,
        leaf_density_per_area: leaves.per_area,
        leaf_area: allometry.leaf_area,
        rows_detected,
        row_axis,
        row_spacing,
        row_score,
        tile_area: tile.area(),
        rows,
    })
}

impl CanopyStructureEstimate {
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("estimate always serializes")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| LidarError::Parse {
            path: String::new(),
            line: e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0),
            message: e.message().to_string(),
        })
    }

    /// Area-weighted mean of per-tile estimates of the same crop; row
    /// diagnostics are concatenated.
    pub fn combine(parts: &[CanopyStructureEstimate]) -> Result<Self> {
        let first = parts.first().ok_or(LidarError::EmptyTile)?;
        let total: f64 = parts.iter().map(|p| p.tile_area).sum();
        let avg = |f: fn(&CanopyStructureEstimate) -> f64| parts.iter().map(|p| f(p) * p.tile_area).sum::<f64>() / total;
        let with_rows: Vec<&CanopyStructureEstimate> = parts.iter().filter(|p| p.rows_detected).collect();
        let row_spacing = (!with_rows.is_empty())
            .then(|| with_rows.iter().filter_map(|p| p.row_spacing).sum::<f64>() / with_rows.len() as f64);
        Ok(CanopyStructureEstimate {
            crop_kind: first.crop_kind,
            height: avg(|p| p.height),
            stalk_density: avg(|p| p.stalk_density),
            leaf_density: avg(|p| p.leaf_density),
            plant_density: avg(|p| p.plant_density),
            lai: avg(|p| p.lai),
            lai_form: first.lai_form,
            leaf_density_per_area: avg(|p| p.leaf_density_per_area),
            leaf_area: first.leaf_area,
            rows_detected: !with_rows.is_empty(),
            row_axis: with_rows.first().and_then(|p| p.row_axis),
            row_spacing,
            row_score: avg(|p| p.row_score),
            tile_area: total,
            rows: parts.iter().flat_map(|p| p.rows.iter().cloned()).collect(),
        })
    }

    /// Forward-model canopy built from this estimate, the allometry entry and
    /// the leaf thickness and permittivity supplied by the caller.
    pub fn to_descriptor(
        &self,
        allometry: &AllometryEntry,
        leaf_thickness: f64,
        permittivity: ComplexPermittivity,
    ) -> Result<CanopyDescriptor> {
        let (leaf_radius, corn_leaf_length) = match self.crop_kind {
            CropKind::Corn => (0.5 * allometry.leaf_width, Some(allometry.leaf_area / allometry.leaf_width)),
            CropKind::Soybean => ((allometry.leaf_area / std::f64::consts::PI).sqrt(), None),
        };
        let stalk_geometry = if self.crop_kind == CropKind::Corn && allometry.stalk_radius > 0.0 && self.height > 0.0 {
            Some(CylinderGeometry::new(allometry.stalk_radius, self.height, permittivity)?)
        } else {
            None
        };
        let descriptor = CanopyDescriptor {
            crop_kind: self.crop_kind,
            height: self.height,
            stalk_density: if stalk_geometry.is_some() { self.stalk_density } else { 0.0 },
            leaf_density: self.leaf_density,
            stalk_geometry,
            leaf_geometry: DiskGeometry::new(leaf_radius, leaf_thickness, permittivity)?,
            leaf_orientation: OrientationDistribution::Uniform,
            corn_leaf_length,
        };
        descriptor.validate()?;
        Ok(descriptor)
    }
}
