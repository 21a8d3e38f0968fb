//! Row detection from the periodicity of projected canopy height.

use serde::{Deserialize, Serialize};

use crate::chm::CanopyHeightModel;
use crate::error::{LidarError, Result};
use crate::signal::{find_peaks, refine_peak};

/// Direction the crop rows run in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowAxis {
    /// Rows parallel to x; offsets are y coordinates.
    X,
    /// Rows parallel to y; offsets are x coordinates.
    Y,
}

impl RowAxis {
    /// `(along, across)` coordinates of a horizontal position.
    pub fn split(self, x: f64, y: f64) -> (f64, f64) {
        match self {
            RowAxis::X => (x, y),
            RowAxis::Y => (y, x),
        }
    }
}

impl std::fmt::Display for RowAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RowAxis::X => "x",
            RowAxis::Y => "y",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RowConfig {
    /// Minimum `1/(1+CV)` for a tile to count as row-structured.
    pub min_score: f64,
    /// Peak prominence required in the projected profile, as a fraction of
    /// the profile range (maximum minus minimum).
    pub prominence_fraction: f64,
    /// Closest allowed row spacing, m.
    pub min_spacing: f64,
}

impl Default for RowConfig {
    fn default() -> Self {
        RowConfig {
            min_score: 0.3,
            prominence_fraction: 0.1,
            min_spacing: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowSegmentation {
    pub axis: RowAxis,
    /// `1/(1+CV)` of the spacing between detected rows.
    pub score: f64,
    /// Across-row offsets of the row centers, m, increasing.
    pub centerlines: Vec<f64>,
    /// Across-row offsets of the profile minima between neighboring rows, m.
    pub boundaries: Vec<f64>,
    /// Mean center-to-center distance, m.
    pub spacing: f64,
}

impl RowSegmentation {
    /// Across-row extent `[low, high)` assigned to row `i`. Inner edges are
    /// the boundaries; outer rows extend half a spacing outward.
    pub fn strip(&self, i: usize) -> (f64, f64) {
        let n = self.centerlines.len();
        let low = if i == 0 {
            self.centerlines[0] - 0.5 * self.spacing
        } else {
            self.boundaries[i - 1]
        };
        let high = if i + 1 == n {
            self.centerlines[n - 1] + 0.5 * self.spacing
        } else {
            self.boundaries[i]
        };
        (low, high)
    }
}

/// Mean height along rows running parallel to `axis`, as a function of the
/// across-row cell index.
pub fn projected_profile(chm: &CanopyHeightModel, axis: RowAxis) -> Vec<f64> {
    match axis {
        RowAxis::X => (0..chm.ny)
            .map(|iy| (0..chm.nx).map(|ix| chm.get(ix, iy)).sum::<f64>() / chm.nx as f64)
            .collect(),
        RowAxis::Y => (0..chm.nx)
            .map(|ix| (0..chm.ny).map(|iy| chm.get(ix, iy)).sum::<f64>() / chm.ny as f64)
            .collect(),
    }
}

struct Candidate {
    score: f64,
    /// Regularity weighted by the profile's standard deviation.
    strength: f64,
    peaks: Vec<f64>,
    minima: Vec<f64>,
}

/// Score and peak positions (fractional cell indices) of one projection.
fn analyze(profile: &[f64], cfg: &RowConfig, resolution: f64) -> Candidate {
    let top = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bottom = profile.iter().copied().fold(f64::INFINITY, f64::min);
    let range = (top - bottom).max(0.0);
    let idx = if range > 0.0 {
        find_peaks(profile, cfg.prominence_fraction * range, cfg.min_spacing / resolution)
    } else {
        Vec::new()
    };
    let peaks: Vec<f64> = idx.iter().map(|&i| refine_peak(profile, i)).collect();
    let minima = idx
        .windows(2)
        .map(|w| {
            (w[0]..=w[1])
                .min_by(|&a, &b| profile[a].total_cmp(&profile[b]))
                .map(|i| i as f64)
                .unwrap_or(w[0] as f64)
        })
        .collect();
    let gaps: Vec<f64> = peaks.windows(2).map(|w| w[1] - w[0]).collect();
    let score = if gaps.len() < 2 {
        0.0
    } else {
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / gaps.len() as f64;
        1.0 / (1.0 + var.sqrt() / mean)
    };
    let n = profile.len().max(1) as f64;
    let mean = profile.iter().sum::<f64>() / n;
    let spread = (profile.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    Candidate {
        score,
        strength: score * spread,
        peaks,
        minima,
    }
}

/// Picks the axis whose projected profile has the stronger periodicity
/// (gap regularity times profile standard deviation) and locates the rows
/// on it. Needs at least three rows in the tile.
pub fn detect_rows(chm: &CanopyHeightModel, cfg: &RowConfig) -> Result<RowSegmentation> {
    let res = chm.resolution;
    let along_x = analyze(&projected_profile(chm, RowAxis::X), cfg, res);
    let along_y = analyze(&projected_profile(chm, RowAxis::Y), cfg, res);
    // ties go to the axis with more rows, then to x
    let (axis, best) = if along_y.strength > along_x.strength
        || (along_y.strength == along_x.strength && along_y.peaks.len() > along_x.peaks.len())
    {
        (RowAxis::Y, along_y)
    } else {
        (RowAxis::X, along_x)
    };
    if !(best.score >= cfg.min_score) {
        return Err(LidarError::NoPeriodicity {
            score: best.score,
            threshold: cfg.min_score,
        });
    }
    let start = match axis {
        RowAxis::X => chm.origin.1,
        RowAxis::Y => chm.origin.0,
    };
    let to_m = |i: f64| start + (i + 0.5) * res;
    let centerlines: Vec<f64> = best.peaks.iter().map(|&i| to_m(i)).collect();
    let spacing = (centerlines[centerlines.len() - 1] - centerlines[0]) / (centerlines.len() - 1) as f64;
    Ok(RowSegmentation {
        axis,
        score: best.score,
        boundaries: best.minima.iter().map(|&i| to_m(i)).collect(),
        centerlines,
        spacing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Cosine-squared ridges parallel to `axis` with the given spacing.
    fn ridges(axis: RowAxis, spacing: f64) -> CanopyHeightModel {
        let n = 250;
        let res = 0.02;
        let mut values = vec![0.0; n * n];
        for iy in 0..n {
            for ix in 0..n {
                let across = match axis {
                    RowAxis::X => iy,
                    RowAxis::Y => ix,
                } as f64
                    * res
                    + 0.5 * res;
                values[iy * n + ix] = 2.0 * (std::f64::consts::PI * across / spacing).cos().powi(2);
            }
        }
        CanopyHeightModel {
            origin: (0.0, 0.0),
            resolution: res,
            nx: n,
            ny: n,
            values,
            smoothed: true,
        }
    }

    #[test]
    fn periodic_rows_score_one() {
        let seg = detect_rows(&ridges(RowAxis::X, 0.76), &RowConfig::default()).unwrap();
        assert_eq!(seg.axis, RowAxis::X);
        assert!(seg.score > 0.99);
        assert!((seg.spacing - 0.76).abs() < 0.01);
        assert_eq!(seg.boundaries.len() + 1, seg.centerlines.len());
        for (i, b) in seg.boundaries.iter().enumerate() {
            assert!(seg.centerlines[i] < *b && *b < seg.centerlines[i + 1]);
        }
    }

    #[test]
    fn axis_follows_the_rows() {
        let seg = detect_rows(&ridges(RowAxis::Y, 0.76), &RowConfig::default()).unwrap();
        assert_eq!(seg.axis, RowAxis::Y);
        assert!((seg.spacing - 0.76).abs() < 0.01);
    }

    #[test]
    fn flat_canopy_has_no_rows() {
        let mut chm = ridges(RowAxis::X, 0.76);
        chm.values.iter_mut().for_each(|v| *v = 1.0);
        assert!(matches!(
            detect_rows(&chm, &RowConfig::default()),
            Err(LidarError::NoPeriodicity { .. })
        ));
    }

    #[test]
    fn strips_tile_the_across_axis() {
        let seg = detect_rows(&ridges(RowAxis::X, 0.76), &RowConfig::default()).unwrap();
        for i in 1..seg.centerlines.len() {
            assert_eq!(seg.strip(i - 1).1, seg.strip(i).0);
        }
    }
}
