//! Plant counting along detected rows.

use serde::{Deserialize, Serialize};

use crate::chm::CanopyHeightModel;
use crate::cloud::{PointCloud, Tile};
use crate::error::{LidarError, Result};
use crate::rows::{RowAxis, RowSegmentation};
use crate::signal::{convolve_reflect, find_peaks, gaussian_kernel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CornDensityConfig {
    /// Profile bin along the row, m.
    pub bin: f64,
    /// Closest allowed stem spacing, m.
    pub min_separation: f64,
    /// Returns below this height (ground) are ignored, m.
    pub min_height: f64,
    /// Standard deviation of the profile smoothing, bins.
    pub smoothing: f64,
    /// Peak prominence required, as a fraction of the median row maximum.
    pub prominence_fraction: f64,
    /// Only returns this close to a row centerline count, m; keeps the
    /// stalks ahead of leaves reaching across from neighboring plants.
    pub core_half_width: f64,
}

impl Default for CornDensityConfig {
    fn default() -> Self {
        CornDensityConfig {
            bin: 0.02,
            min_separation: 0.15,
            min_height: 0.1,
            smoothing: 1.5,
            prominence_fraction: 0.1,
            core_half_width: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SoybeanDensityConfig {
    /// Kernel length along the row, m; the kernel spans the row strip across.
    pub kernel_length: f64,
    /// Closest allowed plant spacing, m.
    pub min_separation: f64,
    /// Peak prominence required, as a fraction of the row profile maximum.
    pub prominence_fraction: f64,
}

impl Default for SoybeanDensityConfig {
    fn default() -> Self {
        SoybeanDensityConfig {
            kernel_length: 0.1,
            min_separation: 0.1,
            prominence_fraction: 0.02,
        }
    }
}

/// Along-row extent of one plant: halfway to each neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantExtent {
    pub center: f64,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowCount {
    /// Across-row offset of the row, m.
    pub centerline: f64,
    pub plants: Vec<PlantExtent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantDensity {
    /// plants/m².
    pub density: f64,
    pub plants: usize,
    /// m².
    pub area: f64,
    pub rows: Vec<RowCount>,
}

fn along_extent(tile: &Tile, axis: RowAxis) -> (f64, f64) {
    match axis {
        RowAxis::X => (tile.x0, tile.width),
        RowAxis::Y => (tile.y0, tile.height),
    }
}

/// Splits `[start, end)` between plant centers at their midpoints.
fn partition(centers: &[f64], start: f64, end: f64) -> Vec<PlantExtent> {
    (0..centers.len())
        .map(|i| PlantExtent {
            center: centers[i],
            start: if i == 0 { start } else { 0.5 * (centers[i - 1] + centers[i]) },
            end: if i + 1 == centers.len() {
                end
            } else {
                0.5 * (centers[i] + centers[i + 1])
            },
        })
        .collect()
}

fn summarize(rows: Vec<RowCount>, tile: &Tile) -> PlantDensity {
    let plants = rows.iter().map(|r| r.plants.len()).sum();
    PlantDensity {
        density: plants as f64 / tile.area(),
        plants,
        area: tile.area(),
        rows,
    }
}

/// Counts corn stems as peaks of the height-weighted return count along each
/// row strip.
pub fn plant_density_corn(
    cloud: &PointCloud,
    rows: &RowSegmentation,
    tile: &Tile,
    cfg: &CornDensityConfig,
) -> Result<PlantDensity> {
    if !(cfg.bin > 0.0) || !(cfg.min_separation >= 0.0) || !(cfg.core_half_width > 0.0) {
        return Err(LidarError::invalid("corn density config", "bin and core width must be > 0"));
    }
    let (u0, length) = along_extent(tile, rows.axis);
    let nbins = ((length / cfg.bin) - 1e-9).ceil().max(1.0) as usize;
    let strips: Vec<(f64, f64)> = (0..rows.centerlines.len()).map(|i| rows.strip(i)).collect();
    let mut profiles = vec![vec![0.0; nbins]; strips.len()];
    for p in &cloud.points {
        if p[2] < cfg.min_height || !tile.contains(p[0], p[1]) {
            continue;
        }
        let (u, v) = rows.axis.split(p[0], p[1]);
        // strips are sorted and contiguous except at the outer edges
        let k = strips.partition_point(|s| s.1 <= v);
        if k < strips.len() && v >= strips[k].0 && (v - rows.centerlines[k]).abs() <= cfg.core_half_width {
            let b = (((u - u0) / cfg.bin) as usize).min(nbins - 1);
            profiles[k][b] += p[2];
        }
    }
    let kernel = gaussian_kernel(cfg.smoothing);
    let smoothed: Vec<Vec<f64>> = profiles.iter().map(|p| convolve_reflect(p, &kernel)).collect();
    let mut maxima: Vec<f64> = smoothed.iter().map(|p| p.iter().copied().fold(0.0, f64::max)).collect();
    maxima.sort_by(f64::total_cmp);
    let reference = maxima.get(maxima.len() / 2).copied().unwrap_or(0.0);
    let min_prominence = (cfg.prominence_fraction * reference).max(f64::MIN_POSITIVE);
    let counts = smoothed
        .iter()
        .zip(&rows.centerlines)
        .map(|(profile, &centerline)| {
            let centers: Vec<f64> = find_peaks(profile, min_prominence, cfg.min_separation / cfg.bin)
                .into_iter()
                .map(|i| u0 + (i as f64 + 0.5) * cfg.bin)
                .collect();
            RowCount {
                centerline,
                plants: partition(&centers, u0, u0 + length),
            }
        })
        .collect();
    Ok(summarize(counts, tile))
}

/// Counts soybean plants as peaks of the smoothed canopy height summed over
/// a box spanning the row strip across and `kernel_length` along the row.
pub fn plant_density_soybean(
    chm: &CanopyHeightModel,
    rows: &RowSegmentation,
    tile: &Tile,
    cfg: &SoybeanDensityConfig,
) -> Result<PlantDensity> {
    if !(cfg.kernel_length > 0.0) {
        return Err(LidarError::invalid("soybean kernel length", "must be > 0"));
    }
    let res = chm.resolution;
    let (n_along, n_across) = match rows.axis {
        RowAxis::X => (chm.nx, chm.ny),
        RowAxis::Y => (chm.ny, chm.nx),
    };
    let (u0, v0) = rows.axis.split(chm.origin.0, chm.origin.1);
    let at = |a: usize, c: usize| match rows.axis {
        RowAxis::X => chm.get(a, c),
        RowAxis::Y => chm.get(c, a),
    };
    let half = ((0.5 * cfg.kernel_length / res).round() as usize).max(0);
    let (tu0, length) = along_extent(tile, rows.axis);
    let counts = (0..rows.centerlines.len())
        .map(|i| {
            let (lo, hi) = rows.strip(i);
            let c_lo = (((lo - v0) / res).ceil().max(0.0)) as usize;
            let c_hi = ((((hi - v0) / res).ceil()) as usize).min(n_across);
            let column: Vec<f64> = (0..n_along)
                .map(|a| (c_lo..c_hi).map(|c| at(a, c)).sum::<f64>())
                .collect();
            // box sum along the row; windows shrink at the raster edges
            let mut prefix = vec![0.0; n_along + 1];
            for a in 0..n_along {
                prefix[a + 1] = prefix[a] + column[a];
            }
            let profile: Vec<f64> = (0..n_along)
                .map(|a| {
                    let s = a.saturating_sub(half);
                    let e = (a + half + 1).min(n_along);
                    (prefix[e] - prefix[s]) / (e - s) as f64
                })
                .collect();
            let top = profile.iter().copied().fold(0.0, f64::max);
            let min_prominence = (cfg.prominence_fraction * top).max(f64::MIN_POSITIVE);
            let centers: Vec<f64> = find_peaks(&profile, min_prominence, cfg.min_separation / res)
                .into_iter()
                .map(|a| u0 + (a as f64 + 0.5) * res)
                .collect();
            RowCount {
                centerline: rows.centerlines[i],
                plants: partition(&centers, tu0, tu0 + length),
            }
        })
        .collect();
    Ok(summarize(counts, tile))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_row(axis: RowAxis) -> RowSegmentation {
        RowSegmentation {
            axis,
            score: 1.0,
            centerlines: vec![0.5],
            boundaries: vec![],
            spacing: 0.76,
        }
    }

    #[test]
    fn stems_become_peaks() {
        let tile = Tile::new(0.0, 0.0, 4.0, 1.0).unwrap();
        let mut pts = Vec::new();
        for k in 0..16 {
            let x = 0.125 + 0.25 * k as f64;
            for j in 0..20 {
                pts.push([x + 0.002 * (j % 3) as f64, 0.5, 0.1 * j as f64]);
            }
        }
        let cloud = PointCloud::new(pts).unwrap();
        let d = plant_density_corn(&cloud, &one_row(RowAxis::X), &tile, &CornDensityConfig::default()).unwrap();
        assert_eq!(d.plants, 16);
        assert!((d.density - 4.0).abs() < 1e-12);
        let extents = &d.rows[0].plants;
        assert_eq!(extents[0].start, 0.0);
        assert!((extents[0].end - 0.25).abs() < 0.03);
    }

    #[test]
    fn empty_strip_has_no_plants() {
        let tile = Tile::new(0.0, 0.0, 4.0, 1.0).unwrap();
        let cloud = PointCloud::new(vec![[1.0, 0.5, 0.0]; 50]).unwrap();
        let d = plant_density_corn(&cloud, &one_row(RowAxis::X), &tile, &CornDensityConfig::default()).unwrap();
        assert_eq!(d.plants, 0);
    }

    fn mounds(spacing: f64, flat: bool) -> CanopyHeightModel {
        let (nx, ny) = (200, 50);
        let values = (0..nx * ny)
            .map(|i| {
                let x = (i % nx) as f64 * 0.02 + 0.01;
                if flat {
                    0.8
                } else {
                    0.4 + 0.4 * (std::f64::consts::PI * x / spacing).cos().powi(2)
                }
            })
            .collect();
        CanopyHeightModel {
            origin: (0.0, 0.0),
            resolution: 0.02,
            nx,
            ny,
            values,
            smoothed: true,
        }
    }

    #[test]
    fn mounds_are_counted_and_flat_rows_are_not() {
        let tile = Tile::new(0.0, 0.0, 4.0, 1.0).unwrap();
        let cfg = SoybeanDensityConfig::default();
        let d = plant_density_soybean(&mounds(0.25, false), &one_row(RowAxis::X), &tile, &cfg).unwrap();
        // interior crests at 0.25 k for k = 1..=15
        assert_eq!(d.plants, 15);
        let flat = plant_density_soybean(&mounds(0.25, true), &one_row(RowAxis::X), &tile, &cfg).unwrap();
        assert_eq!(flat.plants, 0);
    }
}
