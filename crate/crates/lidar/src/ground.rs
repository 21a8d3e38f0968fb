//! Ground normalization: heights above a fitted ground plane.

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{LidarError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GroundConfig {
    /// Side of the seed cells, m.
    pub cell_size: f64,
    /// Height quantile taken as the ground seed of each cell.
    pub seed_quantile: f64,
    pub min_points: usize,
    /// Seeds this far above the fitted plane (m), beyond the spread of the
    /// others, are treated as canopy and dropped before refitting.
    pub outlier_tolerance: f64,
}

impl Default for GroundConfig {
    fn default() -> Self {
        GroundConfig {
            cell_size: 1.0,
            seed_quantile: 0.05,
            min_points: 100,
            outlier_tolerance: 0.05,
        }
    }
}

/// `z = offset + slope_x·x + slope_y·y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundPlane {
    pub offset: f64,
    pub slope_x: f64,
    pub slope_y: f64,
}

impl GroundPlane {
    pub fn height(&self, x: f64, y: f64) -> f64 {
        self.offset + self.slope_x * x + self.slope_y * y
    }
}

/// One seed per occupied cell: the point at the configured quantile of
/// height above `plane`.
fn ground_seeds(cloud: &PointCloud, cfg: &GroundConfig, plane: &GroundPlane) -> Vec<[f64; 3]> {
    let b = match cloud.bounds() {
        Some(b) => b,
        None => return Vec::new(),
    };
    let nx = (((b[0].1 - b[0].0) / cfg.cell_size).floor() as usize) + 1;
    let ny = (((b[1].1 - b[1].0) / cfg.cell_size).floor() as usize) + 1;
    let mut cells: Vec<Vec<[f64; 3]>> = vec![Vec::new(); nx * ny];
    for p in &cloud.points {
        let i = (((p[0] - b[0].0) / cfg.cell_size) as usize).min(nx - 1);
        let j = (((p[1] - b[1].0) / cfg.cell_size) as usize).min(ny - 1);
        cells[j * nx + i].push(*p);
    }
    cells
        .into_iter()
        .filter(|c| !c.is_empty())
        .map(|mut c| {
            c.sort_by(|a, b| (a[2] - plane.height(a[0], a[1])).total_cmp(&(b[2] - plane.height(b[0], b[1]))));
            let k = (cfg.seed_quantile * (c.len() - 1) as f64).floor() as usize;
            c[k]
        })
        .collect()
}

/// Least-squares plane through `pts`; a horizontal plane at the median
/// height when the points do not span two horizontal directions.
fn fit_plane(pts: &[[f64; 3]]) -> GroundPlane {
    let n = pts.len() as f64;
    let (mx, my, mz) = pts.iter().fold((0.0, 0.0, 0.0), |a, p| (a.0 + p[0] / n, a.1 + p[1] / n, a.2 + p[2] / n));
    // centered normal equations for the two slopes
    let (mut sxx, mut sxy, mut syy, mut sxz, mut syz) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in pts {
        let (dx, dy, dz) = (p[0] - mx, p[1] - my, p[2] - mz);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
        sxz += dx * dz;
        syz += dy * dz;
    }
    let det = sxx * syy - sxy * sxy;
    if pts.len() < 3 || det <= 1e-9 * (sxx * syy).max(1e-300) {
        let mut z: Vec<f64> = pts.iter().map(|p| p[2]).collect();
        z.sort_by(f64::total_cmp);
        return GroundPlane {
            offset: z.get(z.len() / 2).copied().unwrap_or(0.0),
            slope_x: 0.0,
            slope_y: 0.0,
        };
    }
    let slope_x = (sxz * syy - syz * sxy) / det;
    let slope_y = (syz * sxx - sxz * sxy) / det;
    GroundPlane {
        offset: mz - slope_x * mx - slope_y * my,
        slope_x,
        slope_y,
    }
}

/// Fits the ground plane to per-cell low-quantile seeds, dropping seeds
/// that sit well above the plane (cells where no pulse reached the ground).
pub fn fit_ground_plane(cloud: &PointCloud, cfg: &GroundConfig) -> Result<GroundPlane> {
    if cloud.len() < cfg.min_points {
        return Err(LidarError::TooFewPoints {
            count: cloud.len(),
            min: cfg.min_points,
        });
    }
    if !(cfg.cell_size > 0.0) || !(0.0..=1.0).contains(&cfg.seed_quantile) {
        return Err(LidarError::invalid("ground config", "cell size must be > 0 and quantile in [0, 1]"));
    }
    let mut plane = GroundPlane {
        offset: 0.0,
        slope_x: 0.0,
        slope_y: 0.0,
    };
    // seeds are re-chosen against each new plane so that a slope inside a
    // cell does not bias the quantile toward its downhill side
    for _ in 0..10 {
        let mut seeds = ground_seeds(cloud, cfg, &plane);
        let mut next = fit_plane(&seeds);
        for _ in 0..5 {
            let mut resid: Vec<f64> = seeds.iter().map(|p| p[2] - next.height(p[0], p[1])).collect();
            resid.sort_by(f64::total_cmp);
            let median = resid[resid.len() / 2];
            let mut dev: Vec<f64> = resid.iter().map(|r| (r - median).abs()).collect();
            dev.sort_by(f64::total_cmp);
            let cutoff = median + cfg.outlier_tolerance + 3.0 * 1.4826 * dev[dev.len() / 2];
            let before = seeds.len();
            seeds.retain(|p| p[2] - next.height(p[0], p[1]) <= cutoff);
            if seeds.len() == before {
                break;
            }
            next = fit_plane(&seeds);
        }
        let converged = (next.slope_x - plane.slope_x).abs() < 1e-7
            && (next.slope_y - plane.slope_y).abs() < 1e-7;
        plane = next;
        if converged {
            break;
        }
    }
    Ok(plane)
}

/// Heights above the fitted ground plane.
pub fn normalize_ground(cloud: &PointCloud, cfg: &GroundConfig) -> Result<PointCloud> {
    let plane = fit_ground_plane(cloud, cfg)?;
    Ok(cloud.map_points(|[x, y, z]| [x, y, z - plane.height(x, y)]))
}
