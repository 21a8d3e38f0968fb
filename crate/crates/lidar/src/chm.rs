//! Canopy height model: per-cell maximum height on a fine raster.

use serde::{Deserialize, Serialize};

use crate::cloud::{PointCloud, Tile};
use crate::error::{LidarError, Result};
use crate::signal::{convolve_reflect, gaussian_kernel, quantile};

/// Raster cell size, m.
pub const CHM_RESOLUTION: f64 = 0.02;
/// Standard deviation of the smoothing kernel, cells.
pub const CHM_SMOOTHING_SIGMA: f64 = 3.0;

/// Row-major raster (`iy * nx + ix`) of heights above ground, m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanopyHeightModel {
    /// Lower-left corner of cell `(0, 0)`, m.
    pub origin: (f64, f64),
    pub resolution: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
    pub smoothed: bool,
}

impl CanopyHeightModel {
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            self.origin.0 + (ix as f64 + 0.5) * self.resolution,
            self.origin.1 + (iy as f64 + 0.5) * self.resolution,
        )
    }

    /// Cell holding `(x, y)`, if inside the raster.
    pub fn cell_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fx = (x - self.origin.0) / self.resolution;
        let fy = (y - self.origin.1) / self.resolution;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (ix, iy) = (fx as usize, fy as usize);
        (ix < self.nx && iy < self.ny).then_some((ix, iy))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Height at quantile `q` over all cells.
    pub fn quantile(&self, q: f64) -> f64 {
        quantile(&self.values, q)
    }

    /// Separable Gaussian smoothing with reflected edges.
    pub fn smoothed(&self, sigma_cells: f64) -> Self {
        let kernel = gaussian_kernel(sigma_cells);
        let mut out = self.values.clone();
        for iy in 0..self.ny {
            let row = &mut out[iy * self.nx..(iy + 1) * self.nx];
            let filtered = convolve_reflect(row, &kernel);
            row.copy_from_slice(&filtered);
        }
        let mut column = vec![0.0; self.ny];
        for ix in 0..self.nx {
            for iy in 0..self.ny {
                column[iy] = out[iy * self.nx + ix];
            }
            for (iy, v) in convolve_reflect(&column, &kernel).into_iter().enumerate() {
                out[iy * self.nx + ix] = v;
            }
        }
        CanopyHeightModel {
            values: out,
            smoothed: true,
            ..self.clone()
        }
    }
}

/// Per-cell maximum of the normalized heights inside `tile` (negative
/// heights count as 0); cells without returns take the value of the
/// nearest occupied cell. Not smoothed.
pub fn rasterize(cloud: &PointCloud, tile: &Tile, resolution: f64) -> Result<CanopyHeightModel> {
    if !(resolution > 0.0) {
        return Err(LidarError::invalid("raster resolution", "must be > 0"));
    }
    let nx = ((tile.width / resolution) - 1e-9).ceil().max(1.0) as usize;
    let ny = ((tile.height / resolution) - 1e-9).ceil().max(1.0) as usize;
    let mut chm = CanopyHeightModel {
        origin: (tile.x0, tile.y0),
        resolution,
        nx,
        ny,
        values: vec![f64::NEG_INFINITY; nx * ny],
        smoothed: false,
    };
    let mut occupied = 0usize;
    for p in &cloud.points {
        if !tile.contains(p[0], p[1]) {
            continue;
        }
        if let Some((ix, iy)) = chm.cell_of(p[0], p[1]) {
            let v = &mut chm.values[iy * nx + ix];
            if *v == f64::NEG_INFINITY {
                occupied += 1;
            }
            *v = v.max(p[2].max(0.0));
        }
    }
    if occupied == 0 {
        return Err(LidarError::EmptyTile);
    }
    fill_nearest(&mut chm.values, nx, ny);
    Ok(chm)
}

/// Fills empty (`-inf`) cells from their nearest occupied cell using
/// forward and backward sweeps that propagate the closest known source.
fn fill_nearest(values: &mut [f64], nx: usize, ny: usize) {
    const NONE: usize = usize::MAX;
    let mut source: Vec<usize> = (0..nx * ny)
        .map(|i| if values[i] == f64::NEG_INFINITY { NONE } else { i })
        .collect();
    let dist2 = |cell: usize, src: usize| {
        let (cx, cy) = ((cell % nx) as i64, (cell / nx) as i64);
        let (sx, sy) = ((src % nx) as i64, (src / nx) as i64);
        (cx - sx).pow(2) + (cy - sy).pow(2)
    };
    let forward = [(-1i64, -1i64), (0, -1), (1, -1), (-1, 0)];
    let backward = [(1i64, 1i64), (0, 1), (-1, 1), (1, 0)];
    let relax = |source: &mut Vec<usize>, cell: usize, pass: &[(i64, i64)]| {
        let (x, y) = ((cell % nx) as i64, (cell / nx) as i64);
        let mut changed = false;
        for &(dx, dy) in pass {
            let (qx, qy) = (x + dx, y + dy);
            if qx < 0 || qy < 0 || qx >= nx as i64 || qy >= ny as i64 {
                continue;
            }
            let cand = source[qy as usize * nx + qx as usize];
            let cur = source[cell];
            if cand == NONE || cand == cur {
                continue;
            }
            let better = cur == NONE || {
                let (dc, dn) = (dist2(cell, cand), dist2(cell, cur));
                dc < dn || (dc == dn && cand < cur)
            };
            if better {
                source[cell] = cand;
                changed = true;
            }
        }
        changed
    };
    loop {
        let mut changed = false;
        for cell in 0..nx * ny {
            changed |= relax(&mut source, cell, &forward);
        }
        for cell in (0..nx * ny).rev() {
            changed |= relax(&mut source, cell, &backward);
        }
        if !changed {
            break;
        }
    }
    for cell in 0..nx * ny {
        if values[cell] == f64::NEG_INFINITY {
            values[cell] = values[source[cell]];
        }
    }
}

/// Rasterizes at 2 cm and smooths with σ = 3 cells.
pub fn build_chm(cloud: &PointCloud, tile: &Tile) -> Result<CanopyHeightModel> {
    Ok(rasterize(cloud, tile, CHM_RESOLUTION)?.smoothed(CHM_SMOOTHING_SIGMA))
}
