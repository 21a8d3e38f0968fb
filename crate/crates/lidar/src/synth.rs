//! Ray-cast synthetic crop tiles with known structure.
//!
//! Plants stand on a planar ground in straight rows. Leaves are thin disks
//! with uniformly random normals, so the mean leaf projection is exactly
//! one half. Each pulse aims at a uniformly random ground point from a
//! random off-nadir direction and returns its first intersection with a
//! stalk, leaf or the ground, perturbed by range noise.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, UnitSphere};
use serde::{Deserialize, Serialize};
use soilscan_core::canopy::CropKind;

use crate::chm::{CanopyHeightModel, CHM_RESOLUTION, CHM_SMOOTHING_SIGMA};
use crate::cloud::{PointCloud, Tile};
use crate::estimate::canopy_height;
use crate::error::{LidarError, Result};
use crate::ground::GroundPlane;
use crate::rows::RowAxis;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Layout {
    /// Plants in rows.
    Rows(CropKind),
    /// Leaves scattered uniformly through a horizontal slab, no plants.
    RandomDisks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub layout: Layout,
    pub tile: Tile,
    pub row_axis: RowAxis,
    /// m.
    pub row_spacing: f64,
    /// Mean in-row distance between plants, m.
    pub plant_spacing: f64,
    /// Standard deviation of each plant's in-row position, m.
    pub position_jitter: f64,
    /// Mean plant height, m.
    pub plant_height: f64,
    /// Relative standard deviation of plant height.
    pub height_jitter: f64,
    /// One-sided leaf area per ground area the leaves are sized to.
    pub leaf_area_index: f64,
    /// m.
    pub leaf_radius: f64,
    /// m; 0 for no stalks.
    pub stalk_radius: f64,
    /// Pulses per m² of tile.
    pub pulse_density: f64,
    /// Largest off-nadir pulse angle, rad.
    pub max_scan_angle: f64,
    /// Standard deviation of the range error, m.
    pub range_noise: f64,
    pub ground: GroundPlane,
    /// Plants (or leaves) only where this region contains them; everywhere
    /// when absent.
    pub planted: Option<Tile>,
    pub seed: u64,
}

impl FieldSpec {
    /// Mature corn: 2 m plants every 25 cm in 76 cm rows, LAI 3.
    pub fn corn(seed: u64) -> Self {
        FieldSpec {
            layout: Layout::Rows(CropKind::Corn),
            tile: Tile::square(0.0, 0.0, 6.0).expect("valid tile"),
            row_axis: RowAxis::X,
            row_spacing: 0.76,
            plant_spacing: 0.25,
            position_jitter: 0.02,
            plant_height: 2.0,
            height_jitter: 0.03,
            leaf_area_index: 3.0,
            leaf_radius: 0.04,
            stalk_radius: 0.012,
            pulse_density: 40_000.0,
            max_scan_angle: 15f64.to_radians(),
            range_noise: 0.005,
            ground: GroundPlane {
                offset: 0.0,
                slope_x: 0.0,
                slope_y: 0.0,
            },
            planted: None,
            seed,
        }
    }

    /// Soybean: 0.8 m dome-shaped plants every 40 cm in 76 cm rows, LAI 3.
    pub fn soybean(seed: u64) -> Self {
        FieldSpec {
            layout: Layout::Rows(CropKind::Soybean),
            plant_spacing: 0.4,
            plant_height: 0.8,
            leaf_radius: 0.03,
            stalk_radius: 0.0,
            ..FieldSpec::corn(seed)
        }
    }

    /// Randomly placed leaves between 0.2 m and 2 m with the given LAI.
    pub fn random_disks(lai: f64, seed: u64) -> Self {
        FieldSpec {
            layout: Layout::RandomDisks,
            leaf_area_index: lai,
            stalk_radius: 0.0,
            ..FieldSpec::corn(seed)
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("row spacing", self.row_spacing),
            ("plant spacing", self.plant_spacing),
            ("plant height", self.plant_height),
            ("leaf radius", self.leaf_radius),
            ("pulse density", self.pulse_density),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(LidarError::invalid(name, format!("{v}, must be > 0")));
            }
        }
        if !(self.leaf_area_index >= 0.0) || !(self.range_noise >= 0.0) || !(self.stalk_radius >= 0.0) {
            return Err(LidarError::invalid("field spec", "LAI, noise and stalk radius must be >= 0"));
        }
        if !(0.0..PI / 2.0).contains(&self.max_scan_angle) {
            return Err(LidarError::invalid("scan angle", "must be in [0, 90°)"));
        }
        Ok(())
    }
}

/// Known parameters of a generated tile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldTruth {
    pub row_axis: RowAxis,
    pub row_spacing: f64,
    /// Plants standing inside the tile per m².
    pub plant_density: f64,
    /// Mean height of the plants inside the tile, m.
    pub mean_plant_height: f64,
    /// Mean height of the canopy surface over vegetated cells, from dense
    /// noiseless vertical rays through the scene geometry, m.
    pub canopy_height: f64,
    /// Area of leaf disks centered inside the tile per m² of tile.
    pub lai: f64,
    pub plants: usize,
}

#[derive(Debug, Clone)]
pub struct SyntheticField {
    pub cloud: PointCloud,
    pub truth: FieldTruth,
}

#[derive(Debug, Clone, Copy)]
struct Disk {
    center: [f64; 3],
    normal: [f64; 3],
    radius: f64,
    /// Counted as leaf area.
    leaf: bool,
}

#[derive(Debug, Clone, Copy)]
struct Stalk {
    x: f64,
    y: f64,
    base: f64,
    top: f64,
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Disk(usize),
    Stalk(usize),
}

/// Uniform horizontal bucket grid of shape references.
struct Buckets {
    x0: f64,
    y0: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    items: Vec<Vec<Shape>>,
}

impl Buckets {
    fn new(x0: f64, y0: f64, width: f64, height: f64, cell: f64) -> Self {
        let nx = (width / cell).ceil() as usize + 1;
        let ny = (height / cell).ceil() as usize + 1;
        Buckets {
            x0,
            y0,
            cell,
            nx,
            ny,
            items: vec![Vec::new(); nx * ny],
        }
    }

    fn index(&self, x: f64, y: f64) -> (i64, i64) {
        (((x - self.x0) / self.cell).floor() as i64, ((y - self.y0) / self.cell).floor() as i64)
    }

    fn insert(&mut self, x: f64, y: f64, radius: f64, shape: Shape) {
        let (i0, j0) = self.index(x - radius, y - radius);
        let (i1, j1) = self.index(x + radius, y + radius);
        for j in j0.max(0)..=j1.min(self.ny as i64 - 1) {
            for i in i0.max(0)..=i1.min(self.nx as i64 - 1) {
                self.items[j as usize * self.nx + i as usize].push(shape);
            }
        }
    }

    /// Cells crossed by the horizontal segment from `a` to `b`.
    fn cells_along(&self, a: (f64, f64), b: (f64, f64), out: &mut Vec<usize>) {
        out.clear();
        let (mut i, mut j) = self.index(a.0, a.1);
        let (i_end, j_end) = self.index(b.0, b.1);
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let step_i = if dx > 0.0 { 1 } else { -1 };
        let step_j = if dy > 0.0 { 1 } else { -1 };
        let next_boundary = |idx: i64, step: i64, origin: f64| origin + (idx + if step > 0 { 1 } else { 0 }) as f64 * self.cell;
        let mut t_max_x = if dx != 0.0 {
            (next_boundary(i, step_i, self.x0) - a.0) / dx
        } else {
            f64::INFINITY
        };
        let mut t_max_y = if dy != 0.0 {
            (next_boundary(j, step_j, self.y0) - a.1) / dy
        } else {
            f64::INFINITY
        };
        let t_dx = if dx != 0.0 { self.cell / dx.abs() } else { f64::INFINITY };
        let t_dy = if dy != 0.0 { self.cell / dy.abs() } else { f64::INFINITY };
        loop {
            if i >= 0 && j >= 0 && (i as usize) < self.nx && (j as usize) < self.ny {
                out.push(j as usize * self.nx + i as usize);
            }
            if (i == i_end && j == j_end) || out.len() > 4 * (self.nx + self.ny) {
                break;
            }
            if t_max_x < t_max_y {
                if t_max_x > 1.0 {
                    break;
                }
                i += step_i;
                t_max_x += t_dx;
            } else {
                if t_max_y > 1.0 {
                    break;
                }
                j += step_j;
                t_max_y += t_dy;
            }
        }
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

struct Scene {
    disks: Vec<Disk>,
    stalks: Vec<Stalk>,
    stalk_radius: f64,
    buckets: Buckets,
    top: f64,
    ground: GroundPlane,
}

impl Scene {
    /// Ray parameter of the first hit of `o + t d` (`d` pointing down).
    fn first_hit(&self, o: [f64; 3], d: [f64; 3], cells: &mut Vec<usize>) -> f64 {
        let g = self.ground;
        let t_ground = (g.offset + g.slope_x * o[0] + g.slope_y * o[1] - o[2]) / (d[2] - g.slope_x * d[0] - g.slope_y * d[1]);
        let t_top = (self.top - o[2]) / d[2];
        let a = (o[0] + t_top * d[0], o[1] + t_top * d[1]);
        let b = (o[0] + t_ground * d[0], o[1] + t_ground * d[1]);
        self.buckets.cells_along(a, b, cells);
        let mut best = t_ground;
        for &c in cells.iter() {
            for shape in &self.buckets.items[c] {
                let t = match *shape {
                    Shape::Disk(k) => {
                        let disk = &self.disks[k];
                        let denom = dot(disk.normal, d);
                        if denom.abs() < 1e-12 {
                            continue;
                        }
                        let t = dot(disk.normal, sub(disk.center, o)) / denom;
                        let p = [o[0] + t * d[0], o[1] + t * d[1], o[2] + t * d[2]];
                        let q = sub(p, disk.center);
                        if dot(q, q) > disk.radius * disk.radius {
                            continue;
                        }
                        t
                    }
                    Shape::Stalk(k) => match self.stalk_hit(&self.stalks[k], o, d) {
                        Some(t) => t,
                        None => continue,
                    },
                };
                if t > 0.0 && t < best {
                    best = t;
                }
            }
        }
        best
    }

    fn stalk_hit(&self, s: &Stalk, o: [f64; 3], d: [f64; 3]) -> Option<f64> {
        let r = self.stalk_radius;
        let (ox, oy) = (o[0] - s.x, o[1] - s.y);
        let mut best: Option<f64> = None;
        // top cap
        let t_cap = (s.top - o[2]) / d[2];
        let (cx, cy) = (ox + t_cap * d[0], oy + t_cap * d[1]);
        if cx * cx + cy * cy <= r * r {
            best = Some(t_cap);
        }
        let a = d[0] * d[0] + d[1] * d[1];
        if a > 1e-15 {
            let b = 2.0 * (d[0] * ox + d[1] * oy);
            let c = ox * ox + oy * oy - r * r;
            let disc = b * b - 4.0 * a * c;
            if disc >= 0.0 {
                let t = (-b - disc.sqrt()) / (2.0 * a);
                let z = o[2] + t * d[2];
                if z >= s.base && z <= s.top && best.is_none_or(|bt| t < bt) {
                    best = Some(t);
                }
            }
        }
        best
    }
}

/// Generates the point cloud and the known parameters of `spec`.
pub fn generate_field(spec: &FieldSpec) -> Result<SyntheticField> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let tile = spec.tile;
    let margin = 1.0;
    let (gx0, gy0) = (tile.x0 - margin, tile.y0 - margin);
    let (gw, gh) = (tile.width + 2.0 * margin, tile.height + 2.0 * margin);
    let ground = spec.ground;
    let jitter = Normal::new(0.0, spec.position_jitter.max(0.0)).expect("finite jitter");
    let height_noise = Normal::new(0.0, spec.height_jitter.max(0.0)).expect("finite jitter");
    let leaf_area = PI * spec.leaf_radius * spec.leaf_radius;

    let planted = |x: f64, y: f64| spec.planted.is_none_or(|p| p.contains(x, y));
    let mut disks = Vec::new();
    let mut stalks = Vec::new();
    let mut plant_heights = Vec::new();

    match spec.layout {
        Layout::RandomDisks => {
            let count = (spec.leaf_area_index * gw * gh / leaf_area).round() as usize;
            for _ in 0..count {
                let (x, y) = (gx0 + rng.random::<f64>() * gw, gy0 + rng.random::<f64>() * gh);
                let z = ground.height(x, y) + 0.2 + rng.random::<f64>() * (spec.plant_height - 0.2);
                let normal = UnitSphere.sample(&mut rng);
                if !planted(x, y) {
                    continue;
                }
                disks.push(Disk {
                    center: [x, y, z],
                    normal,
                    radius: spec.leaf_radius,
                    leaf: true,
                });
            }
        }
        Layout::Rows(crop) => {
            let (u0, ulen, v0, vlen) = match spec.row_axis {
                RowAxis::X => (gx0, gw, tile.y0, tile.height),
                RowAxis::Y => (gy0, gh, tile.x0, tile.width),
            };
            let to_xy = |u: f64, v: f64| match spec.row_axis {
                RowAxis::X => (u, v),
                RowAxis::Y => (v, u),
            };
            let disks_per_plant =
                (spec.leaf_area_index * spec.row_spacing * spec.plant_spacing / leaf_area).round() as usize;
            // rows start half a spacing inside the tile and continue past
            // its edges by the margin
            let first = -((margin / spec.row_spacing).ceil());
            let last = ((vlen + margin) / spec.row_spacing).ceil();
            let mut k = first;
            while k <= last {
                let v = v0 + 0.5 * spec.row_spacing + k * spec.row_spacing;
                let phase = rng.random::<f64>() * spec.plant_spacing;
                let mut u = u0 + phase;
                while u < u0 + ulen {
                    let pu = u + jitter.sample(&mut rng);
                    let (x, y) = to_xy(pu, v);
                    let base = ground.height(x, y);
                    let h = spec.plant_height * (1.0 + height_noise.sample(&mut rng));
                    if !planted(x, y) {
                        u += spec.plant_spacing;
                        continue;
                    }
                    if tile.contains(x, y) {
                        plant_heights.push(h);
                    }
                    if spec.stalk_radius > 0.0 {
                        stalks.push(Stalk {
                            x,
                            y,
                            base,
                            top: base + h,
                        });
                    }
                    match crop {
                        CropKind::Corn => {
                            corn_leaves(spec, &mut rng, (x, y, base), h, disks_per_plant, &mut disks);
                            corn_tassel(&mut rng, (x, y, base), h, &mut disks);
                        }
                        CropKind::Soybean => soybean_leaves(spec, &mut rng, (x, y, base), h, disks_per_plant, &mut disks),
                    }
                    u += spec.plant_spacing;
                }
                k += 1.0;
            }
        }
    }

    let top = disks
        .iter()
        .map(|d| d.center[2] + d.radius)
        .chain(stalks.iter().map(|s| s.top))
        .fold(0.0f64, f64::max)
        + 0.05;
    let mut buckets = Buckets::new(gx0, gy0, gw, gh, 0.1);
    for (i, d) in disks.iter().enumerate() {
        buckets.insert(d.center[0], d.center[1], d.radius, Shape::Disk(i));
    }
    for (i, s) in stalks.iter().enumerate() {
        buckets.insert(s.x, s.y, spec.stalk_radius, Shape::Stalk(i));
    }
    let scene = Scene {
        disks,
        stalks,
        stalk_radius: spec.stalk_radius,
        buckets,
        top: top.max(ground_top(&ground, &tile) + 0.05),
        ground,
    };

    // Pulses aim at ground points around the tile too, and only returns
    // landing inside are kept, so the density stays uniform up to the edges.
    let cos_max = spec.max_scan_angle.cos();
    let reach = (scene.top - ground_bottom(&ground, &tile)) * spec.max_scan_angle.tan();
    let aim = Tile::new(
        tile.x0 - reach,
        tile.y0 - reach,
        tile.width + 2.0 * reach,
        tile.height + 2.0 * reach,
    )?;
    let pulses = (spec.pulse_density * aim.area()).round() as usize;
    let range = Normal::new(0.0, spec.range_noise).expect("finite noise");
    let mut points = Vec::with_capacity((spec.pulse_density * tile.area()) as usize);
    let mut cells = Vec::new();
    for _ in 0..pulses {
        let (x, y) = (aim.x0 + rng.random::<f64>() * aim.width, aim.y0 + rng.random::<f64>() * aim.height);
        // uniform over the solid-angle cap around nadir
        let cos_t = 1.0 - rng.random::<f64>() * (1.0 - cos_max);
        let sin_t = (1.0 - cos_t * cos_t).sqrt();
        let phi = rng.random::<f64>() * TAU;
        let d = [sin_t * phi.cos(), sin_t * phi.sin(), -cos_t];
        let gz = ground.height(x, y);
        let lift = scene.top - gz + 1.0;
        let o = [x - d[0] / d[2] * -lift, y - d[1] / d[2] * -lift, gz + lift];
        let t = scene.first_hit(o, d, &mut cells) + range.sample(&mut rng);
        let hit = [o[0] + t * d[0], o[1] + t * d[1], o[2] + t * d[2]];
        if tile.contains(hit[0], hit[1]) {
            points.push(hit);
        }
    }

    let inside_leaf_area = scene
        .disks
        .iter()
        .filter(|d| d.leaf && tile.contains(d.center[0], d.center[1]))
        .map(|d| PI * d.radius * d.radius)
        .sum::<f64>();
    let truth = FieldTruth {
        row_axis: spec.row_axis,
        row_spacing: spec.row_spacing,
        plant_density: plant_heights.len() as f64 / tile.area(),
        canopy_height: surface_height(&scene, &tile),
        mean_plant_height: if plant_heights.is_empty() {
            0.0
        } else {
            plant_heights.iter().sum::<f64>() / plant_heights.len() as f64
        },
        lai: inside_leaf_area / tile.area(),
        plants: plant_heights.len(),
    };
    let mut cloud = PointCloud::new(points)?;
    cloud.tile_id = Some(format!("synthetic-{}", spec.seed));
    Ok(SyntheticField { cloud, truth })
}

/// Canopy height of the exact scene: each raster cell takes the highest
/// first hit of a 5 × 5 grid of vertical rays, then the raster is smoothed
/// and averaged like a measured one.
const SURFACE_SUBSAMPLES: usize = 5;

fn surface_height(scene: &Scene, tile: &Tile) -> f64 {
    let res = CHM_RESOLUTION;
    let nx = (tile.width / res).round().max(1.0) as usize;
    let ny = (tile.height / res).round().max(1.0) as usize;
    let mut values = vec![0.0; nx * ny];
    let mut cells = Vec::new();
    let down = [0.0, 0.0, -1.0];
    for iy in 0..ny {
        for ix in 0..nx {
            let mut best = 0.0f64;
            for sy in 0..SURFACE_SUBSAMPLES {
                for sx in 0..SURFACE_SUBSAMPLES {
                    let sub = |i: usize| (i as f64 + 0.5) / SURFACE_SUBSAMPLES as f64;
                    let x = tile.x0 + (ix as f64 + sub(sx)) * res;
                    let y = tile.y0 + (iy as f64 + sub(sy)) * res;
                    let o = [x, y, scene.top + 1.0];
                    let t = scene.first_hit(o, down, &mut cells);
                    best = best.max(o[2] - t - scene.ground.height(x, y));
                }
            }
            values[iy * nx + ix] = best;
        }
    }
    let chm = CanopyHeightModel {
        origin: (tile.x0, tile.y0),
        resolution: res,
        nx,
        ny,
        values,
        smoothed: false,
    };
    canopy_height(&chm.smoothed(CHM_SMOOTHING_SIGMA))
}

fn corner_heights(g: &GroundPlane, t: &Tile) -> [f64; 4] {
    [
        (t.x0, t.y0),
        (t.x0 + t.width, t.y0),
        (t.x0, t.y0 + t.height),
        (t.x0 + t.width, t.y0 + t.height),
    ]
    .map(|(x, y)| g.height(x, y))
}

fn ground_top(g: &GroundPlane, t: &Tile) -> f64 {
    corner_heights(g, t).into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn ground_bottom(g: &GroundPlane, t: &Tile) -> f64 {
    corner_heights(g, t).into_iter().fold(f64::INFINITY, f64::min)
}

/// Twelve strap leaves per plant, each a chain of touching disks leaving
/// the stalk across the row. Lower leaves are long, start out flat and
/// reach far; upper ones are short, start steep and stay close to the stalk; all droop toward
/// their tips. A tassel of small disks tops the stalk.
fn corn_leaves(
    spec: &FieldSpec,
    rng: &mut ChaCha8Rng,
    (x, y, base): (f64, f64, f64),
    h: f64,
    count: usize,
    out: &mut Vec<Disk>,
) {
    const LEAVES: usize = 12;
    let across = match spec.row_axis {
        RowAxis::X => PI / 2.0,
        RowAxis::Y => 0.0,
    };
    let spread = Normal::new(0.0, 40f64.to_radians()).expect("finite spread");
    let step = 2.0 * spec.leaf_radius;
    let tip_slope = -35f64.to_radians().sin();
    // leaves shorten toward the top; segments are shared out by weight
    let weight = |leaf: usize| 1.4 - (leaf as f64 + 0.5) / LEAVES as f64;
    let total: f64 = (0..LEAVES).map(weight).sum();
    let mut assigned = 0usize;
    let mut cumulative = 0.0;
    for leaf in 0..LEAVES {
        cumulative += weight(leaf);
        let upto = (count as f64 * cumulative / total).round() as usize;
        let segments = upto - assigned;
        assigned = upto;
        let length = (segments as f64 * step).max(step);
        let level = (leaf as f64 + 0.5) / LEAVES as f64;
        let insert = base + h * (0.3 + 0.6 * level);
        let rise = (5.0 + 40.0 * level).to_radians().sin();
        let curl = (rise - tip_slope) / length;
        let side = if leaf % 2 == 0 { 0.0 } else { PI };
        let azimuth = across + side + spread.sample(rng);
        let (mut reach, mut z, mut slope) = (0.0, insert, rise);
        for _ in 0..segments {
            // advance half a step, place the disk, advance the other half
            for half in 0..2 {
                let dz = slope.clamp(-1.0, 1.0) * 0.5 * step;
                reach += (0.25 * step * step - dz * dz).max(0.0).sqrt();
                z += dz;
                slope -= curl * 0.5 * step;
                if half == 0 {
                    out.push(Disk {
                        center: [x + reach * azimuth.cos(), y + reach * azimuth.sin(), z.min(base + h)],
                        normal: UnitSphere.sample(rng),
                        radius: spec.leaf_radius,
                        leaf: true,
                    });
                }
            }
        }
    }
}

/// Small disks clustered on the top of a corn stalk; not counted as leaf
/// area.
fn corn_tassel(rng: &mut ChaCha8Rng, (x, y, base): (f64, f64, f64), h: f64, out: &mut Vec<Disk>) {
    for k in 0..TASSEL_DISKS {
        let z = base + h - 0.05 - 0.3 * k as f64 / TASSEL_DISKS as f64;
        let phi = rng.random::<f64>() * TAU;
        let r = 0.08 * rng.random::<f64>().sqrt();
        out.push(Disk {
            center: [x + r * phi.cos(), y + r * phi.sin(), z],
            normal: UnitSphere.sample(rng),
            radius: TASSEL_RADIUS,
            leaf: false,
        });
    }
}

const TASSEL_DISKS: usize = 12;
const TASSEL_RADIUS: f64 = 0.025;

/// Leaflets spread evenly over the plant's share of the row, a little past
/// halfway to each neighbor and out to the middle of the inter-row, under a
/// dome that is highest over the stem.
fn soybean_leaves(
    spec: &FieldSpec,
    rng: &mut ChaCha8Rng,
    (x, y, base): (f64, f64, f64),
    h: f64,
    count: usize,
    out: &mut Vec<Disk>,
) {
    let along = 0.55 * spec.plant_spacing;
    let across = 0.5 * spec.row_spacing;
    for _ in 0..count {
        let a = 2.0 * rng.random::<f64>() - 1.0;
        let c = 2.0 * rng.random::<f64>() - 1.0;
        let crown = h * (1.0 - 0.5 * a * a - 0.25 * c * c);
        let z = crown * (1.0 - 0.7 * rng.random::<f64>().powi(4));
        let (dx, dy) = match spec.row_axis {
            RowAxis::X => (a * along, c * across),
            RowAxis::Y => (c * across, a * along),
        };
        out.push(Disk {
            center: [x + dx, y + dy, base + z],
            normal: UnitSphere.sample(rng),
            radius: spec.leaf_radius,
            leaf: true,
        });
    }
}
