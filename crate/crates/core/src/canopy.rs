//! Discrete-scatterer canopy model.
//!
//! Stalks are finite dielectric cylinders and leaves are thin dielectric
//! disks. Only the forward-scattering amplitude matters for the nadir
//! pipeline: its imaginary part, averaged over orientation and weighted by
//! number density, gives the volume extinction coefficient
//!
//! ```text
//! κ_e = (4π/k²) (N_s ⟨Im S_s⟩ + N_l ⟨Im S_l⟩),   S = k f
//! ```
//!
//! where `f` is the forward amplitude in metres returned by this module
//! (`S = k f` is the dimensionless amplitude, so `κ_e = (4π/k) N ⟨Im f⟩`).
//!
//! Amplitudes use the low-frequency polarizability of each body. A thin disk
//! passes the tangential field unchanged and divides the normal field by
//! `ε`; a long thin cylinder passes the axial field and scales the transverse
//! field by `2/(ε+1)`. The finite-length array factor of the cylinder is one
//! in the forward direction. The single polarization channel reported is the
//! mean of the H and V co-polarized amplitudes.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::em::{wavenumber, ComplexPermittivity};
use crate::error::{Error, Result};

/// Electrical-size limit `k r` for the cylinder approximation.
pub const CYLINDER_KR_LIMIT: f64 = 2.0;
/// Electrical-thickness limit `k t |√ε|` for the thin-disk approximation.
pub const DISK_THICKNESS_LIMIT: f64 = 1.0;
/// Maximum thickness/radius ratio accepted for a disk.
pub const DISK_ASPECT_LIMIT: f64 = 0.2;
/// Points per axis of the orientation quadrature.
pub const ORIENTATION_QUADRATURE: usize = 32;

const GRAZING_LIMIT_DEG: f64 = 80.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderGeometry {
    radius: f64,
    length: f64,
    permittivity: ComplexPermittivity,
}

impl CylinderGeometry {
    pub fn new(radius: f64, length: f64, permittivity: ComplexPermittivity) -> Result<Self> {
        let g = CylinderGeometry {
            radius,
            length,
            permittivity,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) {
            return Err(Error::invalid("cylinder radius", "must be > 0"));
        }
        if !(self.length > 0.0) {
            return Err(Error::invalid("cylinder length", "must be > 0"));
        }
        Ok(())
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn permittivity(&self) -> ComplexPermittivity {
        self.permittivity
    }

    pub fn volume(&self) -> f64 {
        PI * self.radius * self.radius * self.length
    }

    pub fn with_permittivity(mut self, permittivity: ComplexPermittivity) -> Self {
        self.permittivity = permittivity;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskGeometry {
    radius: f64,
    thickness: f64,
    permittivity: ComplexPermittivity,
}

impl DiskGeometry {
    pub fn new(radius: f64, thickness: f64, permittivity: ComplexPermittivity) -> Result<Self> {
        let g = DiskGeometry {
            radius,
            thickness,
            permittivity,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) {
            return Err(Error::invalid("disk radius", "must be > 0"));
        }
        if !(self.thickness > 0.0) || self.thickness / self.radius > DISK_ASPECT_LIMIT {
            return Err(Error::invalid(
                "disk thickness",
                format!(
                    "must satisfy 0 < thickness <= {DISK_ASPECT_LIMIT} * radius, got {} for radius {}",
                    self.thickness, self.radius
                ),
            ));
        }
        Ok(())
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn permittivity(&self) -> ComplexPermittivity {
        self.permittivity
    }

    pub fn volume(&self) -> f64 {
        PI * self.radius * self.radius * self.thickness
    }

    pub fn face_area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn with_permittivity(mut self, permittivity: ComplexPermittivity) -> Self {
        self.permittivity = permittivity;
        self
    }
}

/// Scatterer orientation: azimuth `psi` in [0, 2π) and tilt `delta` of the
/// symmetry axis (cylinder axis or disk normal) from vertical, in [0, π/2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    pub psi: f64,
    pub delta: f64,
}

impl Orientation {
    pub const VERTICAL: Orientation = Orientation {
        psi: 0.0,
        delta: 0.0,
    };

    pub fn new(psi: f64, delta: f64) -> Self {
        Orientation { psi, delta }
    }

    fn axis(self) -> [f64; 3] {
        let (sd, cd) = self.delta.sin_cos();
        let (sp, cp) = self.psi.sin_cos();
        [sd * cp, sd * sp, cd]
    }
}

/// Probability density over `(psi, delta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrientationDistribution {
    /// Constant density `1/π²` over the full domain.
    Uniform,
    /// All mass at `delta = 0`.
    Vertical,
    /// Piecewise-constant density on `psi_bins × delta_bins` equal cells,
    /// row-major in `psi`.
    Tabulated {
        psi_bins: usize,
        delta_bins: usize,
        density: Vec<f64>,
    },
}

const PSI_SPAN: f64 = 2.0 * PI;
const DELTA_SPAN: f64 = PI / 2.0;

impl OrientationDistribution {
    pub fn density(&self, o: Orientation) -> f64 {
        match self {
            OrientationDistribution::Uniform => 1.0 / (PSI_SPAN * DELTA_SPAN),
            OrientationDistribution::Vertical => f64::NAN,
            OrientationDistribution::Tabulated {
                psi_bins,
                delta_bins,
                density,
            } => {
                let i = ((o.psi.rem_euclid(PSI_SPAN) / PSI_SPAN) * *psi_bins as f64) as usize;
                let j = ((o.delta / DELTA_SPAN) * *delta_bins as f64) as usize;
                density[i.min(psi_bins - 1) * delta_bins + j.min(delta_bins - 1)]
            }
        }
    }

    /// Checks shape and that the density integrates to one within 1e-3 under
    /// the module quadrature.
    pub fn validate(&self) -> Result<()> {
        if let OrientationDistribution::Tabulated {
            psi_bins,
            delta_bins,
            density,
        } = self
        {
            if *psi_bins == 0 || *delta_bins == 0 || density.len() != psi_bins * delta_bins {
                return Err(Error::invalid(
                    "orientation distribution",
                    format!(
                        "table has {} values, expected {psi_bins} x {delta_bins}",
                        density.len()
                    ),
                ));
            }
            if density.iter().any(|&p| !(p >= 0.0)) {
                return Err(Error::invalid(
                    "orientation distribution",
                    "densities must be non-negative",
                ));
            }
            let total = quadrature(ORIENTATION_QUADRATURE, |o| self.density(o));
            if (total - 1.0).abs() > 1e-3 {
                return Err(Error::invalid(
                    "orientation distribution",
                    format!("density integrates to {total}, expected 1"),
                ));
            }
        }
        Ok(())
    }
}

fn quadrature(n: usize, mut integrand: impl FnMut(Orientation) -> f64) -> f64 {
    let d_psi = PSI_SPAN / n as f64;
    let d_delta = DELTA_SPAN / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        let psi = (i as f64 + 0.5) * d_psi;
        for j in 0..n {
            let delta = (j as f64 + 0.5) * d_delta;
            sum += integrand(Orientation::new(psi, delta));
        }
    }
    sum * d_psi * d_delta
}

/// `⟨Im S⟩ = ∬ Im S(ψ, δ) p(ψ, δ) dψ dδ` on the 32 x 32 midpoint grid.
pub fn orientation_average_im<F>(amplitude: F, dist: &OrientationDistribution) -> Result<f64>
where
    F: FnMut(Orientation) -> Result<Complex64>,
{
    orientation_average_im_with(amplitude, dist, ORIENTATION_QUADRATURE)
}

/// Same as [`orientation_average_im`] with an `n x n` midpoint grid.
pub fn orientation_average_im_with<F>(
    mut amplitude: F,
    dist: &OrientationDistribution,
    n: usize,
) -> Result<f64>
where
    F: FnMut(Orientation) -> Result<Complex64>,
{
    if let OrientationDistribution::Vertical = dist {
        return Ok(amplitude(Orientation::VERTICAL)?.im);
    }
    let mut failure = None;
    let avg = quadrature(n, |o| match amplitude(o) {
        Ok(s) => s.im * dist.density(o),
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(avg),
    }
}

fn polarizations(theta_i: f64) -> [[f64; 3]; 2] {
    let (s, c) = theta_i.sin_cos();
    [[0.0, 1.0, 0.0], [c, 0.0, s]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Polarization-averaged forward amplitude of a uniaxial body with
/// polarizabilities `along` (on the symmetry axis) and `across`.
fn uniaxial_forward(
    k: f64,
    volume: f64,
    along: Complex64,
    across: Complex64,
    axis: [f64; 3],
    theta_i: f64,
) -> Complex64 {
    let prefactor = k * k * volume / (4.0 * PI);
    let total: Complex64 = polarizations(theta_i)
        .iter()
        .map(|&e| {
            let c2 = dot(e, axis).powi(2);
            along * c2 + across * (1.0 - c2)
        })
        .sum();
    prefactor * total * 0.5
}

fn check_incidence(theta_i: f64) -> Result<()> {
    if !(theta_i >= 0.0) || theta_i.to_degrees() >= GRAZING_LIMIT_DEG {
        return Err(Error::GrazingIncidence {
            degrees: theta_i.to_degrees(),
        });
    }
    Ok(())
}

/// Forward amplitude (m) of a cylinder with arbitrary axis orientation.
pub fn cylinder_amplitude(
    geom: &CylinderGeometry,
    frequency_hz: f64,
    theta_i: f64,
    orientation: Orientation,
) -> Result<Complex64> {
    check_incidence(theta_i)?;
    let k = wavenumber(frequency_hz);
    let kr = k * geom.radius;
    if kr > CYLINDER_KR_LIMIT {
        return Err(Error::ApproximationOutOfRange {
            model: "finite cylinder",
            quantity: "k*r",
            value: kr,
            limit: CYLINDER_KR_LIMIT,
        });
    }
    let eps = geom.permittivity.to_complex();
    let along = eps - 1.0;
    let across = 2.0 * (eps - 1.0) / (eps + 1.0);
    Ok(uniaxial_forward(
        k,
        geom.volume(),
        along,
        across,
        orientation.axis(),
        theta_i,
    ))
}

/// Forward amplitude (m) of a vertical stalk.
pub fn cylinder_forward_amplitude(
    geom: &CylinderGeometry,
    frequency_hz: f64,
    theta_i: f64,
) -> Result<Complex64> {
    cylinder_amplitude(geom, frequency_hz, theta_i, Orientation::VERTICAL)
}

/// Forward amplitude (m) of a thin disk whose normal has the given
/// orientation.
pub fn disk_forward_amplitude(
    geom: &DiskGeometry,
    frequency_hz: f64,
    theta_i: f64,
    orientation: Orientation,
) -> Result<Complex64> {
    check_incidence(theta_i)?;
    let k = wavenumber(frequency_hz);
    let eps = geom.permittivity.to_complex();
    let electrical_thickness = k * geom.thickness * eps.sqrt().norm();
    if electrical_thickness >= DISK_THICKNESS_LIMIT {
        return Err(Error::ApproximationOutOfRange {
            model: "thin disk",
            quantity: "k*t*|sqrt(eps)|",
            value: electrical_thickness,
            limit: DISK_THICKNESS_LIMIT,
        });
    }
    let across = eps - 1.0;
    let along = (eps - 1.0) / eps;
    Ok(uniaxial_forward(
        k,
        geom.volume(),
        along,
        across,
        orientation.axis(),
        theta_i,
    ))
}

/// Number of width-sized disks used for an elongated leaf.
pub fn corn_leaf_segments(leaf_length: f64, leaf_width: f64) -> usize {
    ((leaf_length / leaf_width) - 1e-9).ceil().max(1.0) as usize
}

/// Elongated leaf as a coplanar chain of disks with diameter equal to the
/// leaf width; forward contributions add in phase.
pub fn corn_leaf_amplitude(
    segment: &DiskGeometry,
    leaf_length: f64,
    frequency_hz: f64,
    theta_i: f64,
    orientation: Orientation,
) -> Result<Complex64> {
    let width = 2.0 * segment.radius;
    if !(leaf_length >= width * (1.0 - 1e-12)) {
        return Err(Error::invalid(
            "corn leaf length",
            format!("length {leaf_length} is shorter than width {width}"),
        ));
    }
    let n = corn_leaf_segments(leaf_length, width);
    Ok(disk_forward_amplitude(segment, frequency_hz, theta_i, orientation)? * n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CropKind {
    Corn,
    Soybean,
}

impl std::fmt::Display for CropKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CropKind::Corn => "corn",
            CropKind::Soybean => "soybean",
        })
    }
}

impl std::str::FromStr for CropKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "corn" => Ok(CropKind::Corn),
            "soybean" | "soy" => Ok(CropKind::Soybean),
            other => Err(Error::invalid(
                "crop kind",
                format!("expected corn or soybean, got {other:?}"),
            )),
        }
    }
}

/// Physical canopy description consumed by the forward model.
///
/// Densities are volumetric (per m³ of canopy layer).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanopyDescriptor {
    pub crop_kind: CropKind,
    pub height: f64,
    pub stalk_density: f64,
    pub leaf_density: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stalk_geometry: Option<CylinderGeometry>,
    pub leaf_geometry: DiskGeometry,
    pub leaf_orientation: OrientationDistribution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corn_leaf_length: Option<f64>,
}

impl CanopyDescriptor {
    pub fn validate(&self) -> Result<()> {
        if !(self.height >= 0.0) {
            return Err(Error::invalid("canopy height", "must be >= 0"));
        }
        if !(self.stalk_density >= 0.0) || !(self.leaf_density >= 0.0) {
            return Err(Error::invalid("canopy density", "densities must be >= 0"));
        }
        if let Some(g) = &self.stalk_geometry {
            g.validate()?;
        }
        self.leaf_geometry.validate()?;
        self.leaf_orientation.validate()?;
        if self.crop_kind == CropKind::Corn && self.stalk_geometry.is_none() {
            return Err(Error::invalid("canopy", "corn requires a stalk geometry"));
        }
        if let Some(len) = self.corn_leaf_length {
            if !(len >= 2.0 * self.leaf_geometry.radius * (1.0 - 1e-12)) {
                return Err(Error::invalid(
                    "corn leaf length",
                    "must be at least the leaf width",
                ));
            }
        }
        Ok(())
    }

    /// A canopy with no scatterers; the forward model reduces to bare soil.
    pub fn bare() -> Self {
        CanopyDescriptor {
            crop_kind: CropKind::Soybean,
            height: 0.0,
            stalk_density: 0.0,
            leaf_density: 0.0,
            stalk_geometry: None,
            leaf_geometry: DiskGeometry {
                radius: 0.04,
                thickness: 2e-4,
                permittivity: ComplexPermittivity::VACUUM,
            },
            leaf_orientation: OrientationDistribution::Uniform,
            corn_leaf_length: None,
        }
    }

    /// Mature corn: 2 m tall, 8 plants/m², 12 leaves of 0.8 m × 8 cm per
    /// plant, 1.2 cm stalk radius.
    pub fn typical_corn(permittivity: ComplexPermittivity) -> Self {
        let height = 2.0;
        CanopyDescriptor {
            crop_kind: CropKind::Corn,
            height,
            stalk_density: 8.0 / height,
            leaf_density: 8.0 * 12.0 / height,
            stalk_geometry: Some(CylinderGeometry {
                radius: 0.012,
                length: height,
                permittivity,
            }),
            leaf_geometry: DiskGeometry {
                radius: 0.04,
                thickness: 3e-4,
                permittivity,
            },
            leaf_orientation: OrientationDistribution::Uniform,
            corn_leaf_length: Some(0.8),
        }
    }

    /// Soybean at canopy closure: 0.8 m tall, 3 cm leaflets, leaf area
    /// index about 4.
    pub fn typical_soybean(permittivity: ComplexPermittivity) -> Self {
        let height = 0.8;
        let leaf = DiskGeometry {
            radius: 0.03,
            thickness: 2.5e-4,
            permittivity,
        };
        CanopyDescriptor {
            crop_kind: CropKind::Soybean,
            height,
            stalk_density: 0.0,
            leaf_density: 4.0 / leaf.face_area() / height,
            stalk_geometry: None,
            leaf_geometry: leaf,
            leaf_orientation: OrientationDistribution::Uniform,
            corn_leaf_length: None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.height == 0.0 || (self.stalk_density == 0.0 && self.leaf_density == 0.0)
    }

    /// Copy with a single canopy permittivity applied to stalks and leaves.
    pub fn with_permittivity(&self, eps: ComplexPermittivity) -> Self {
        let mut out = self.clone();
        out.leaf_geometry = out.leaf_geometry.with_permittivity(eps);
        out.stalk_geometry = out.stalk_geometry.map(|g| g.with_permittivity(eps));
        out
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let c: CanopyDescriptor = toml::from_str(text).map_err(|e| Error::Parse {
            path: "<canopy>".into(),
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        })?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("canopy descriptor always serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Parse { line, message, .. } => Error::Parse {
                path: path.display().to_string(),
                line,
                message,
            },
            other => other,
        })
    }

    /// Orientation-averaged `Im` of the per-leaf forward amplitude (m).
    pub fn mean_leaf_im(&self, frequency_hz: f64, theta_i: f64) -> Result<f64> {
        let leaf = self.leaf_geometry;
        match (self.crop_kind, self.corn_leaf_length) {
            (CropKind::Corn, Some(len)) => orientation_average_im(
                |o| corn_leaf_amplitude(&leaf, len, frequency_hz, theta_i, o),
                &self.leaf_orientation,
            ),
            _ => orientation_average_im(
                |o| disk_forward_amplitude(&leaf, frequency_hz, theta_i, o),
                &self.leaf_orientation,
            ),
        }
    }

    /// `Im` of the vertical stalk forward amplitude (m); zero without stalks.
    pub fn mean_stalk_im(&self, frequency_hz: f64, theta_i: f64) -> Result<f64> {
        match &self.stalk_geometry {
            Some(g) => orientation_average_im(
                |o| cylinder_amplitude(g, frequency_hz, theta_i, o),
                &OrientationDistribution::Vertical,
            ),
            None => Ok(0.0),
        }
    }
}

pub(crate) fn line_of(text: &str, byte: usize) -> usize {
    text[..byte.min(text.len())].matches('\n').count() + 1
}

/// Volume extinction coefficient κ_e (Np/m).
pub fn extinction_coefficient(canopy: &CanopyDescriptor, frequency_hz: f64) -> Result<f64> {
    extinction_coefficient_at(canopy, frequency_hz, 0.0)
}

/// κ_e for waves travelling at `theta_i` from vertical.
pub fn extinction_coefficient_at(
    canopy: &CanopyDescriptor,
    frequency_hz: f64,
    theta_i: f64,
) -> Result<f64> {
    let k = wavenumber(frequency_hz);
    let mut sum = 0.0;
    if canopy.stalk_density > 0.0 {
        sum += canopy.stalk_density * canopy.mean_stalk_im(frequency_hz, theta_i)?;
    }
    if canopy.leaf_density > 0.0 {
        sum += canopy.leaf_density * canopy.mean_leaf_im(frequency_hz, theta_i)?;
    }
    // (4π/k²) N Im(k f)
    Ok(4.0 * PI / (k * k) * (k * sum))
}

/// One-way amplitude transmissivity `exp(-κ_e h / cos θ)` for a given κ_e.
pub fn transmissivity_from_extinction(kappa_e: f64, height: f64, theta_i: f64) -> Result<f64> {
    check_incidence(theta_i)?;
    Ok((-kappa_e * height / theta_i.cos()).exp())
}

/// One-way amplitude transmissivity Υ of the canopy layer; square it for the
/// two-way power loss.
pub fn transmissivity(canopy: &CanopyDescriptor, frequency_hz: f64, theta_i: f64) -> Result<f64> {
    check_incidence(theta_i)?;
    if canopy.is_empty() {
        return Ok(1.0);
    }
    let kappa = extinction_coefficient_at(canopy, frequency_hz, theta_i)?;
    transmissivity_from_extinction(kappa, canopy.height, theta_i)
}

/// Orientation weights `⟨½ Σ_pol (ê·â)²⟩` and `⟨½ Σ_pol (1 - (ê·â)²)⟩`.
fn axis_weights(dist: &OrientationDistribution, theta_i: f64) -> (f64, f64) {
    let weights = |o: Orientation| {
        let c2: f64 = polarizations(theta_i)
            .iter()
            .map(|&e| dot(e, o.axis()).powi(2))
            .sum();
        (0.5 * c2, 0.5 * (2.0 - c2))
    };
    match dist {
        OrientationDistribution::Vertical => weights(Orientation::VERTICAL),
        _ => (
            quadrature(ORIENTATION_QUADRATURE, |o| weights(o).0 * dist.density(o)),
            quadrature(ORIENTATION_QUADRATURE, |o| weights(o).1 * dist.density(o)),
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct BodyTerm {
    /// Number density times volume (and segment count), m³/m³.
    filling: f64,
    along: f64,
    across: f64,
}

/// Canopy structure with the orientation averages done once, so that
/// extinction for any scatterer permittivity and frequency is closed form.
///
/// Gives the same values as [`extinction_coefficient_at`] (up to rounding)
/// at a tiny fraction of the cost; the retrieval tables are built with it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtinctionKernel {
    theta_i: f64,
    height: f64,
    stalk: Option<(BodyTerm, f64)>,
    leaf: Option<(BodyTerm, f64)>,
}

impl ExtinctionKernel {
    pub fn new(canopy: &CanopyDescriptor, theta_i: f64) -> Result<Self> {
        canopy.validate()?;
        check_incidence(theta_i)?;
        let empty = canopy.is_empty();
        let stalk = match (&canopy.stalk_geometry, canopy.stalk_density > 0.0 && !empty) {
            (Some(g), true) => {
                let (along, across) = axis_weights(&OrientationDistribution::Vertical, theta_i);
                let term = BodyTerm {
                    filling: canopy.stalk_density * g.volume(),
                    along,
                    across,
                };
                Some((term, g.radius))
            }
            _ => None,
        };
        let leaf = if canopy.leaf_density > 0.0 && !empty {
            let g = &canopy.leaf_geometry;
            let segments = match (canopy.crop_kind, canopy.corn_leaf_length) {
                (CropKind::Corn, Some(len)) => corn_leaf_segments(len, 2.0 * g.radius),
                _ => 1,
            };
            let (along, across) = axis_weights(&canopy.leaf_orientation, theta_i);
            let term = BodyTerm {
                filling: canopy.leaf_density * g.volume() * segments as f64,
                along,
                across,
            };
            Some((term, g.thickness))
        } else {
            None
        };
        Ok(ExtinctionKernel {
            theta_i,
            height: canopy.height,
            stalk,
            leaf,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.stalk.is_none() && self.leaf.is_none()
    }

    /// κ_e (Np/m) with every scatterer at permittivity `eps`.
    pub fn extinction(&self, eps: ComplexPermittivity, frequency_hz: f64) -> Result<f64> {
        let k = wavenumber(frequency_hz);
        let e = eps.to_complex();
        let mut sum = 0.0;
        if let Some((term, radius)) = self.stalk {
            if k * radius > CYLINDER_KR_LIMIT {
                return Err(Error::ApproximationOutOfRange {
                    model: "finite cylinder",
                    quantity: "k*r",
                    value: k * radius,
                    limit: CYLINDER_KR_LIMIT,
                });
            }
            let along = e - 1.0;
            let across = 2.0 * (e - 1.0) / (e + 1.0);
            sum += term.filling * (along * term.along + across * term.across).im;
        }
        if let Some((term, thickness)) = self.leaf {
            let electrical_thickness = k * thickness * e.sqrt().norm();
            if electrical_thickness >= DISK_THICKNESS_LIMIT {
                return Err(Error::ApproximationOutOfRange {
                    model: "thin disk",
                    quantity: "k*t*|sqrt(eps)|",
                    value: electrical_thickness,
                    limit: DISK_THICKNESS_LIMIT,
                });
            }
            let along = (e - 1.0) / e;
            let across = e - 1.0;
            sum += term.filling * (along * term.along + across * term.across).im;
        }
        // Im f = k² V/(4π) Im(α); κ = (4π/k) N Im f
        Ok(k * sum)
    }

    /// One-way transmissivity `exp(-κ_e h / cos θ)`.
    pub fn transmissivity(&self, eps: ComplexPermittivity, frequency_hz: f64) -> Result<f64> {
        if self.is_empty() {
            return Ok(1.0);
        }
        let kappa = self.extinction(eps, frequency_hz)?;
        transmissivity_from_extinction(kappa, self.height, self.theta_i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(re: f64, im: f64) -> ComplexPermittivity {
        ComplexPermittivity::new(re, im).unwrap()
    }

    fn leaf(e: ComplexPermittivity) -> DiskGeometry {
        DiskGeometry::new(0.03, 3e-4, e).unwrap()
    }

    fn soybean(n_l: f64, e: ComplexPermittivity) -> CanopyDescriptor {
        CanopyDescriptor {
            crop_kind: CropKind::Soybean,
            height: 0.8,
            stalk_density: 0.0,
            leaf_density: n_l,
            stalk_geometry: None,
            leaf_geometry: leaf(e),
            leaf_orientation: OrientationDistribution::Uniform,
            corn_leaf_length: None,
        }
    }

    #[test]
    fn vacuum_scatterers_are_invisible() {
        let c = CylinderGeometry::new(0.015, 2.0, ComplexPermittivity::VACUUM).unwrap();
        assert_eq!(cylinder_forward_amplitude(&c, 5e8, 0.0).unwrap(), Complex64::new(0.0, 0.0));
        let d = leaf(ComplexPermittivity::VACUUM);
        let s = disk_forward_amplitude(&d, 5e8, 0.0, Orientation::new(0.3, 0.7)).unwrap();
        assert_eq!(s.norm(), 0.0);
    }

    #[test]
    fn lossy_stalk_has_positive_forward_im() {
        let c = CylinderGeometry::new(0.015, 2.0, eps(25.0, 8.0)).unwrap();
        assert!(cylinder_forward_amplitude(&c, 5e8, 0.0).unwrap().im > 0.0);
    }

    #[test]
    fn stalk_amplitude_scales_with_length() {
        let short = CylinderGeometry::new(0.01, 1.0, eps(25.0, 8.0)).unwrap();
        let long = CylinderGeometry::new(0.01, 2.0, eps(25.0, 8.0)).unwrap();
        let a = cylinder_forward_amplitude(&short, 3e8, 0.0).unwrap().norm();
        let b = cylinder_forward_amplitude(&long, 3e8, 0.0).unwrap().norm();
        assert!((b / a - 2.0).abs() < 0.1);
    }

    #[test]
    fn fat_cylinder_is_rejected() {
        // k r = 18.87 * 0.2 = 3.8
        let c = CylinderGeometry::new(0.2, 2.0, eps(25.0, 8.0)).unwrap();
        assert!(matches!(
            cylinder_forward_amplitude(&c, 9e8, 0.0),
            Err(Error::ApproximationOutOfRange { .. })
        ));
    }

    #[test]
    fn thick_disk_is_rejected() {
        let d = DiskGeometry::new(0.1, 0.02, eps(60.0, 20.0)).unwrap();
        assert!(disk_forward_amplitude(&d, 9e8, 0.0, Orientation::VERTICAL).is_err());
        assert!(DiskGeometry::new(0.01, 0.005, eps(10.0, 1.0)).is_err());
    }

    #[test]
    fn face_on_disk_dominates_edge_on() {
        let d = leaf(eps(30.0, 10.0));
        let face = disk_forward_amplitude(&d, 5e8, 0.0, Orientation::new(0.0, 0.0)).unwrap();
        let edge =
            disk_forward_amplitude(&d, 5e8, 0.0, Orientation::new(0.0, PI / 2.0)).unwrap();
        assert!(face.norm() >= edge.norm());
        assert!(face.im > 0.0 && edge.im > 0.0);
    }

    #[test]
    fn corn_leaf_segmentation() {
        let d = leaf(eps(30.0, 10.0));
        let w = 2.0 * d.radius();
        let one = disk_forward_amplitude(&d, 5e8, 0.0, Orientation::new(0.2, 0.4)).unwrap();
        let single = corn_leaf_amplitude(&d, w, 5e8, 0.0, Orientation::new(0.2, 0.4)).unwrap();
        assert_eq!(single, one);
        let triple =
            corn_leaf_amplitude(&d, 3.0 * w, 5e8, 0.0, Orientation::new(0.2, 0.4)).unwrap();
        assert!((triple - one * 3.0).norm() < 1e-15);
        assert!(corn_leaf_amplitude(&d, 0.5 * w, 5e8, 0.0, Orientation::VERTICAL).is_err());
    }

    #[test]
    fn corn_leaf_length_is_preserved_within_one_disk() {
        for len in [0.07, 0.5, 0.61, 0.8, 1.05] {
            let w = 0.06;
            let n = corn_leaf_segments(len, w) as f64;
            assert!(n * w >= len - 1e-12 && n * w - len < w);
            let disks = n * PI * w * w / 4.0;
            let ellipse = PI / 4.0 * len * w;
            assert!(disks >= ellipse - 1e-12 && disks - ellipse <= PI * w * w / 4.0 + 1e-12);
        }
    }

    #[test]
    fn vertical_distribution_is_exact() {
        let d = leaf(eps(30.0, 10.0));
        let avg = orientation_average_im(
            |o| disk_forward_amplitude(&d, 6e8, 0.0, o),
            &OrientationDistribution::Vertical,
        )
        .unwrap();
        let direct = disk_forward_amplitude(&d, 6e8, 0.0, Orientation::VERTICAL).unwrap();
        assert_eq!(avg, direct.im);
    }

    #[test]
    fn constant_integrand_averages_to_itself() {
        let c = Complex64::new(0.3, 1.7);
        let uniform = orientation_average_im(|_| Ok(c), &OrientationDistribution::Uniform).unwrap();
        assert!((uniform - 1.7).abs() < 1e-12);
        let mut density = vec![0.0; 4 * 2];
        // all mass in the two low-tilt cells of the first two azimuth bins
        let cell = (PSI_SPAN / 4.0) * (DELTA_SPAN / 2.0);
        density[0] = 0.5 / cell;
        density[2] = 0.5 / cell;
        let tab = OrientationDistribution::Tabulated {
            psi_bins: 4,
            delta_bins: 2,
            density,
        };
        tab.validate().unwrap();
        let avg = orientation_average_im(|_| Ok(c), &tab).unwrap();
        assert!((avg - 1.7).abs() < 1e-9);
    }

    #[test]
    fn unnormalized_table_is_rejected() {
        let tab = OrientationDistribution::Tabulated {
            psi_bins: 2,
            delta_bins: 2,
            density: vec![1.0; 4],
        };
        assert!(tab.validate().is_err());
    }

    #[test]
    fn quadrature_refinement_agrees() {
        let d = leaf(eps(30.0, 10.0));
        let dist = OrientationDistribution::Uniform;
        let coarse =
            orientation_average_im_with(|o| disk_forward_amplitude(&d, 7e8, 0.1, o), &dist, 32)
                .unwrap();
        let fine =
            orientation_average_im_with(|o| disk_forward_amplitude(&d, 7e8, 0.1, o), &dist, 128)
                .unwrap();
        assert!(((coarse - fine) / fine).abs() < 0.01);
    }

    #[test]
    fn empty_canopy_has_no_extinction() {
        let c = soybean(0.0, eps(30.0, 9.0));
        assert_eq!(extinction_coefficient(&c, 5e8).unwrap(), 0.0);
        assert_eq!(transmissivity(&c, 5e8, 0.2).unwrap(), 1.0);
    }

    #[test]
    fn extinction_is_linear_in_leaf_density() {
        let a = extinction_coefficient(&soybean(400.0, eps(30.0, 9.0)), 5e8).unwrap();
        let b = extinction_coefficient(&soybean(800.0, eps(30.0, 9.0)), 5e8).unwrap();
        assert!(a > 0.0);
        assert!((b / a - 2.0).abs() < 1e-12);
    }

    #[test]
    fn extinction_adds_across_populations() {
        let stalk = CylinderGeometry::new(0.012, 2.0, eps(30.0, 9.0)).unwrap();
        let mut both = soybean(50.0, eps(30.0, 9.0));
        both.crop_kind = CropKind::Corn;
        both.stalk_geometry = Some(stalk);
        both.stalk_density = 4.0;
        let mut leaves_only = both.clone();
        leaves_only.stalk_density = 0.0;
        let mut stalks_only = both.clone();
        stalks_only.leaf_density = 0.0;
        let total = extinction_coefficient(&both, 6e8).unwrap();
        let parts = extinction_coefficient(&leaves_only, 6e8).unwrap()
            + extinction_coefficient(&stalks_only, 6e8).unwrap();
        assert!((total - parts).abs() <= 1e-14 * total);
    }

    #[test]
    fn dense_green_soybean_attenuates_more() {
        let green = soybean(1200.0, eps(35.0, 10.5));
        let dry = soybean(300.0, eps(8.0, 1.6));
        for i in 0..=14 {
            let f = 2e8 + 5e7 * i as f64;
            assert!(
                extinction_coefficient(&green, f).unwrap() > extinction_coefficient(&dry, f).unwrap()
            );
        }
    }

    #[test]
    fn transmissivity_exponent() {
        let ln2 = std::f64::consts::LN_2;
        assert!((transmissivity_from_extinction(ln2, 1.0, 0.0).unwrap() - 0.5).abs() < 1e-12);
        let t60 = transmissivity_from_extinction(ln2, 1.0, PI / 3.0).unwrap();
        assert!((t60 - 0.25).abs() < 1e-12);
        assert_eq!(transmissivity_from_extinction(0.0, 2.0, 0.3).unwrap(), 1.0);
        assert!(matches!(
            transmissivity_from_extinction(0.1, 1.0, 80f64.to_radians()),
            Err(Error::GrazingIncidence { .. })
        ));
    }

    #[test]
    fn descriptor_round_trips_through_toml() {
        let mut c = soybean(640.0, eps(30.0, 9.0));
        c.crop_kind = CropKind::Corn;
        c.stalk_geometry = Some(CylinderGeometry::new(0.012, 2.1, eps(25.0, 7.5)).unwrap());
        c.corn_leaf_length = Some(0.75);
        let text = c.to_toml_string();
        assert!(text.contains("stalk_density"));
        assert_eq!(CanopyDescriptor::from_toml_str(&text).unwrap(), c);
    }

    #[test]
    fn corn_without_stalks_is_invalid() {
        let mut c = soybean(100.0, eps(30.0, 9.0));
        c.crop_kind = CropKind::Corn;
        assert!(c.validate().is_err());
    }

    #[test]
    fn kernel_matches_quadrature_path() {
        let e = eps(18.0, 5.4);
        let mut corn = CanopyDescriptor::typical_corn(e);
        let soy = CanopyDescriptor::typical_soybean(e);
        corn.leaf_orientation = OrientationDistribution::Tabulated {
            psi_bins: 1,
            delta_bins: 2,
            density: vec![1.5 / (PI * PI), 0.5 / (PI * PI)],
        };
        for c in [&corn, &soy, &CanopyDescriptor::typical_corn(e)] {
            for theta in [0.0, 0.035, 0.3] {
                let kernel = ExtinctionKernel::new(c, theta).unwrap();
                for f in [2e8, 5.5e8, 9e8] {
                    let a = extinction_coefficient_at(c, f, theta).unwrap();
                    let b = kernel.extinction(e, f).unwrap();
                    assert!(((a - b) / a).abs() < 1e-12, "{a} {b}");
                    let t = transmissivity(c, f, theta).unwrap();
                    assert!((kernel.transmissivity(e, f).unwrap() - t).abs() < 1e-12);
                }
            }
        }
        let bare = ExtinctionKernel::new(&CanopyDescriptor::bare(), 0.0).unwrap();
        assert_eq!(bare.transmissivity(e, 5e8).unwrap(), 1.0);
    }
}
