//! Point clouds, tiles and the `x y z` text format.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LidarError, Result};

/// LiDAR returns in meters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    pub points: Vec<[f64; 3]>,
    /// One value per point when present.
    pub intensity: Option<Vec<f64>>,
    pub tile_id: Option<String>,
}

impl PointCloud {
    pub fn new(points: Vec<[f64; 3]>) -> Result<Self> {
        let cloud = PointCloud {
            points,
            intensity: None,
            tile_id: None,
        };
        cloud.validate()?;
        Ok(cloud)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(i) = self.points.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(LidarError::invalid("point cloud", format!("point {i} has a non-finite coordinate")));
        }
        if let Some(intensity) = &self.intensity {
            if intensity.len() != self.points.len() {
                return Err(LidarError::invalid(
                    "point cloud",
                    format!("{} intensities for {} points", intensity.len(), self.points.len()),
                ));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Copy with `f` applied to every point; intensities are kept.
    pub fn map_points(&self, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        PointCloud {
            points: self.points.iter().map(|&p| f(p)).collect(),
            intensity: self.intensity.clone(),
            tile_id: self.tile_id.clone(),
        }
    }

    pub fn translated(&self, dx: f64, dy: f64, dz: f64) -> Self {
        self.map_points(|[x, y, z]| [x + dx, y + dy, z + dz])
    }

    /// Copy with the x and y coordinates exchanged (a field turned by 90°
    /// and mirrored, which swaps the row axis).
    pub fn swapped_axes(&self) -> Self {
        self.map_points(|[x, y, z]| [y, x, z])
    }

    /// Every `step`-th point, starting with the first.
    pub fn subsampled(&self, step: usize) -> Self {
        let step = step.max(1);
        PointCloud {
            points: self.points.iter().step_by(step).copied().collect(),
            intensity: self
                .intensity
                .as_ref()
                .map(|v| v.iter().step_by(step).copied().collect()),
            tile_id: self.tile_id.clone(),
        }
    }

    /// Points whose horizontal position lies inside `tile`.
    pub fn within(&self, tile: &Tile) -> Self {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| tile.contains(self.points[i][0], self.points[i][1]))
            .collect();
        PointCloud {
            points: keep.iter().map(|&i| self.points[i]).collect(),
            intensity: self.intensity.as_ref().map(|v| keep.iter().map(|&i| v[i]).collect()),
            tile_id: self.tile_id.clone(),
        }
    }

    /// `(min, max)` of each coordinate.
    pub fn bounds(&self) -> Option<[(f64, f64); 3]> {
        let first = self.points.first()?;
        let mut b = [(first[0], first[0]), (first[1], first[1]), (first[2], first[2])];
        for p in &self.points {
            for k in 0..3 {
                b[k].0 = b[k].0.min(p[k]);
                b[k].1 = b[k].1.max(p[k]);
            }
        }
        Some(b)
    }
}

/// Axis-aligned horizontal processing window, half-open on its upper edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tile {
    pub x0: f64,
    pub y0: f64,
    pub width: f64,
    pub height: f64,
}

/// Side of the standard processing tile, m.
pub const DEFAULT_TILE_SIZE: f64 = 10.0;

impl Tile {
    pub fn new(x0: f64, y0: f64, width: f64, height: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0) || !x0.is_finite() || !y0.is_finite() {
            return Err(LidarError::invalid("tile", format!("{width} x {height} at ({x0}, {y0})")));
        }
        Ok(Tile { x0, y0, width, height })
    }

    pub fn square(x0: f64, y0: f64, size: f64) -> Result<Self> {
        Tile::new(x0, y0, size, size)
    }

    /// Smallest tile holding every point of `cloud`.
    pub fn bounding(cloud: &PointCloud) -> Result<Self> {
        let b = cloud.bounds().ok_or(LidarError::EmptyTile)?;
        // nudge the upper edges so the extreme points fall inside
        let pad = |lo: f64, hi: f64| ((hi - lo) * 1e-9).max(1e-9);
        Tile::new(
            b[0].0,
            b[1].0,
            b[0].1 - b[0].0 + pad(b[0].0, b[0].1),
            b[1].1 - b[1].0 + pad(b[1].0, b[1].1),
        )
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x < self.x0 + self.width && y >= self.y0 && y < self.y0 + self.height
    }

    /// Covers `self` with tiles of side `size`; edge tiles are clipped.
    pub fn split(&self, size: f64) -> Result<Vec<Tile>> {
        if !(size > 0.0) {
            return Err(LidarError::invalid("tile size", "must be > 0"));
        }
        let nx = (self.width / size - 1e-9).ceil().max(1.0) as usize;
        let ny = (self.height / size - 1e-9).ceil().max(1.0) as usize;
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let x0 = self.x0 + i as f64 * size;
                let y0 = self.y0 + j as f64 * size;
                let w = (self.x0 + self.width - x0).min(size);
                let h = (self.y0 + self.height - y0).min(size);
                out.push(Tile::new(x0, y0, w, h)?);
            }
        }
        Ok(out)
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> LidarError {
    LidarError::Parse {
        path: String::new(),
        line,
        message: message.into(),
    }
}

/// Parses `x y z` lines (whitespace or comma separated) with an optional
/// fourth intensity column, which must then be present on every line.
/// Blank lines and `#` comments are skipped.
pub fn parse_xyz(text: &str) -> Result<PointCloud> {
    let mut points = Vec::new();
    let mut intensity: Vec<f64> = Vec::new();
    let mut columns = None;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(parse_error(n, format!("expected `x y z [intensity]`, found {line:?}")));
        }
        match columns {
            None => columns = Some(fields.len()),
            Some(c) if c != fields.len() => {
                return Err(parse_error(n, format!("expected {c} columns like the first point, found {}", fields.len())))
            }
            _ => {}
        }
        let mut v = [0.0; 4];
        for (k, f) in fields.iter().enumerate() {
            v[k] = f
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| parse_error(n, format!("cannot parse {f:?} as a finite number")))?;
        }
        points.push([v[0], v[1], v[2]]);
        if fields.len() == 4 {
            intensity.push(v[3]);
        }
    }
    let cloud = PointCloud {
        points,
        intensity: (columns == Some(4)).then_some(intensity),
        tile_id: None,
    };
    cloud.validate()?;
    Ok(cloud)
}

pub fn format_xyz(cloud: &PointCloud) -> String {
    let mut out = String::with_capacity(cloud.len() * 24);
    for (i, [x, y, z]) in cloud.points.iter().enumerate() {
        match &cloud.intensity {
            Some(v) => {
                let _ = writeln!(out, "{x} {y} {z} {}", v[i]);
            }
            None => {
                let _ = writeln!(out, "{x} {y} {z}");
            }
        }
    }
    out
}

pub fn load_xyz(path: &Path) -> Result<PointCloud> {
    let text = std::fs::read_to_string(path).map_err(|source| LidarError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut cloud = parse_xyz(&text).map_err(|e| e.at_path(path))?;
    cloud.tile_id = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    Ok(cloud)
}
