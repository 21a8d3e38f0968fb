//! `simulate`: synthetic A-scans and point clouds with a truth sidecar.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use soilscan_core::canopy::CanopyDescriptor;
use soilscan_core::em::{topp_permittivity, ComplexPermittivity, SoilMoisture};
use soilscan_core::formats::format_ascan;
use soilscan_lidar::cloud::format_xyz;
use soilscan_lidar::synth::{generate_field, FieldSpec, FieldTruth};
use soilscan_lidar::{RowAxis, Tile};

use crate::config::{load_canopy, parse_toml, read, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{sanitize, OutputDir};

fn default_altitudes() -> Vec<f64> {
    vec![6.0]
}

fn default_plate_ranges() -> Vec<f64> {
    (0..7).map(|k| 6.0 + 0.5 * k as f64).collect()
}

/// Soil under an optional canopy, scanned from one or more altitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundScene {
    #[serde(default = "GroundScene::default_name")]
    pub name: String,
    /// Volumetric water content, m³/m³.
    pub vwc: f64,
    #[serde(default = "GroundScene::default_soil_loss_tangent")]
    pub soil_loss_tangent: f64,
    /// `bare`, `corn`, `soybean` or a descriptor file relative to the scene
    /// file.
    #[serde(default = "GroundScene::default_canopy")]
    pub canopy: String,
    /// Replaces the canopy's real permittivity, keeping the configured loss
    /// tangent.
    #[serde(default)]
    pub canopy_permittivity: Option<f64>,
    #[serde(default = "default_altitudes")]
    pub altitudes: Vec<f64>,
    /// RMS additive noise, trace units.
    #[serde(default)]
    pub noise_rms: f64,
    /// Overrides the configured soil roughness, m.
    #[serde(default)]
    pub roughness_height: Option<f64>,
    /// Overrides the configured effective beamwidth, deg.
    #[serde(default)]
    pub effective_beamwidth_deg: Option<f64>,
}

impl GroundScene {
    fn default_name() -> String {
        "scene".into()
    }
    fn default_soil_loss_tangent() -> f64 {
        0.15
    }
    fn default_canopy() -> String {
        "bare".into()
    }
}

/// Broadside square plate at several ranges, for calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateScene {
    #[serde(default = "PlateScene::default_name")]
    pub name: String,
    /// m.
    #[serde(default = "PlateScene::default_side")]
    pub side: f64,
    #[serde(default = "default_plate_ranges")]
    pub ranges: Vec<f64>,
    #[serde(default)]
    pub noise_rms: f64,
}

impl PlateScene {
    fn default_name() -> String {
        "plate".into()
    }
    fn default_side() -> f64 {
        0.9
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldPreset {
    Corn,
    Soybean,
    RandomLeaves,
}

/// A ray-cast LiDAR tile of a synthetic crop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldScene {
    #[serde(default = "FieldScene::default_name")]
    pub name: String,
    pub preset: FieldPreset,
    /// Square tile edge, m.
    #[serde(default)]
    pub tile_size: Option<f64>,
    #[serde(default)]
    pub pulse_density: Option<f64>,
    #[serde(default)]
    pub row_axis: Option<RowAxis>,
    #[serde(default)]
    pub row_spacing: Option<f64>,
    #[serde(default)]
    pub plant_spacing: Option<f64>,
    #[serde(default)]
    pub plant_height: Option<f64>,
    #[serde(default)]
    pub leaf_area_index: Option<f64>,
}

impl FieldScene {
    fn default_name() -> String {
        "field".into()
    }

    pub fn spec(&self, seed: u64) -> Result<FieldSpec> {
        let mut spec = match self.preset {
            FieldPreset::Corn => FieldSpec::corn(seed),
            FieldPreset::Soybean => FieldSpec::soybean(seed),
            FieldPreset::RandomLeaves => FieldSpec::random_disks(3.0, seed),
        };
        if let Some(s) = self.tile_size {
            spec.tile = Tile::square(0.0, 0.0, s)?;
        }
        spec.pulse_density = self.pulse_density.unwrap_or(spec.pulse_density);
        spec.row_axis = self.row_axis.unwrap_or(spec.row_axis);
        spec.row_spacing = self.row_spacing.unwrap_or(spec.row_spacing);
        spec.plant_spacing = self.plant_spacing.unwrap_or(spec.plant_spacing);
        spec.plant_height = self.plant_height.unwrap_or(spec.plant_height);
        spec.leaf_area_index = self.leaf_area_index.unwrap_or(spec.leaf_area_index);
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SceneSpec {
    Ground(GroundScene),
    Plate(PlateScene),
    Field(FieldScene),
}

impl SceneSpec {
    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self> {
        parse_toml(text, path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&read(path)?, path)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub file: String,
    /// Altitude or plate range, m.
    pub range: f64,
}

/// Everything a ground scene was generated from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub scene: GroundScene,
    pub soil_permittivity: ComplexPermittivity,
    pub roughness_height: f64,
    pub scattering_beamwidth_deg: f64,
    pub effective_beamwidth_deg: f64,
    pub center_frequency: f64,
    pub scans: Vec<ScanEntry>,
    pub canopy: CanopyDescriptor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateTruth {
    pub seed: u64,
    pub scene: PlateScene,
    pub center_frequency: f64,
    pub scans: Vec<ScanEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub seed: u64,
    pub scene: FieldScene,
    pub cloud: String,
    pub points: usize,
    pub truth: FieldTruth,
    pub spec: FieldSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TruthRecord {
    Ground(GroundTruth),
    Plate(PlateTruth),
    Field(FieldRecord),
}

impl TruthRecord {
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("truth record always serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        parse_toml(&read(path)?, path)
    }

    /// Volumetric water content of a ground scene.
    pub fn vwc(&self) -> Option<f64> {
        match self {
            TruthRecord::Ground(g) => Some(g.scene.vwc),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub files: Vec<PathBuf>,
    pub truth: PathBuf,
}

fn range_label(r: f64) -> String {
    format!("{r}m")
}

/// Generates the scene; `base` resolves a canopy file named in the scene.
pub fn simulate(cfg: &RunConfig, scene: &SceneSpec, base: &Path, out: &OutputDir) -> Result<SimulateOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match scene {
        SceneSpec::Ground(g) => {
            let vwc = SoilMoisture::new(g.vwc)?;
            let eps = topp_permittivity(vwc)?;
            let soil_eps = ComplexPermittivity::with_loss_tangent(eps, g.soil_loss_tangent)?;
            let mut soil = cfg.soil.descriptor(soil_eps);
            if let Some(s) = g.roughness_height {
                soil.roughness_height = s;
            }
            let mut view_cfg = cfg.view;
            if let Some(b) = g.effective_beamwidth_deg {
                view_cfg.effective_beamwidth_deg = b;
            }
            let mut canopy = load_canopy(&g.canopy, base, cfg.builtin_canopy_permittivity()?)?;
            if let Some(re) = g.canopy_permittivity {
                canopy = canopy.with_permittivity(ComplexPermittivity::with_loss_tangent(
                    re,
                    cfg.search.canopy_loss_tangent,
                )?);
            }
            if g.altitudes.is_empty() {
                return Err(CliError::input("ground scene needs at least one altitude"));
            }
            let sim = cfg.simulator(g.noise_rms);
            let name = sanitize(&g.name);
            let mut files = Vec::new();
            let mut scans = Vec::new();
            for &alt in &g.altitudes {
                let scan = sim.ground_scan(&canopy, &soil, &view_cfg.at(alt), &g.name, &mut rng)?;
                let file = format!("{name}_{}.ascan.csv", range_label(alt));
                files.push(out.write(&file, &format_ascan(&scan))?);
                scans.push(ScanEntry { file, range: alt });
            }
            let truth = TruthRecord::Ground(GroundTruth {
                seed: cfg.seed,
                scene: g.clone(),
                soil_permittivity: soil_eps,
                roughness_height: soil.roughness_height,
                scattering_beamwidth_deg: soil.scattering_beamwidth.to_degrees(),
                effective_beamwidth_deg: view_cfg.effective_beamwidth_deg,
                center_frequency: cfg.center_frequency,
                scans,
                canopy,
            });
            let truth = out.write(&format!("{name}.truth.toml"), &truth.to_toml_string())?;
            Ok(SimulateOutput { files, truth })
        }
        SceneSpec::Plate(p) => {
            if p.ranges.is_empty() {
                return Err(CliError::input("plate scene needs at least one range"));
            }
            let sim = cfg.simulator(p.noise_rms);
            let name = sanitize(&p.name);
            let mut files = Vec::new();
            let mut scans = Vec::new();
            for &r in &p.ranges {
                let scan = sim.plate_scan(p.side, r, &p.name, &mut rng)?;
                let file = format!("{name}_{}.ascan.csv", range_label(r));
                files.push(out.write(&file, &format_ascan(&scan))?);
                scans.push(ScanEntry { file, range: r });
            }
            let truth = TruthRecord::Plate(PlateTruth {
                seed: cfg.seed,
                scene: p.clone(),
                center_frequency: cfg.center_frequency,
                scans,
            });
            let truth = out.write(&format!("{name}.truth.toml"), &truth.to_toml_string())?;
            Ok(SimulateOutput { files, truth })
        }
        SceneSpec::Field(f) => {
            let spec = f.spec(cfg.seed)?;
            let field = generate_field(&spec)?;
            let name = sanitize(&f.name);
            let cloud = format!("{name}.xyz");
            let files = vec![out.write(&cloud, &format_xyz(&field.cloud))?];
            let truth = TruthRecord::Field(FieldRecord {
                seed: cfg.seed,
                scene: f.clone(),
                cloud,
                points: field.cloud.len(),
                truth: field.truth,
                spec,
            });
            let truth = out.write(&format!("{name}.truth.toml"), &truth.to_toml_string())?;
            Ok(SimulateOutput { files, truth })
        }
    }
}
