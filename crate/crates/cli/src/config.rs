//! Run configuration shared by every subcommand, read from a TOML file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use soilscan_core::canopy::CanopyDescriptor;
use soilscan_core::em::{ComplexPermittivity, FrequencyGrid};
use soilscan_core::ground::{SoilDescriptor, ViewGeometry};
use soilscan_core::radar::{GateConfig, DEFAULT_CENTER_FREQUENCY};
use soilscan_core::retrieval::SearchConfig;
use soilscan_core::scene::{HardwareModel, RadarSimulator};
use soilscan_lidar::StructureConfig;

use crate::error::{io_error, CliError, Result};

/// Frequency grid every spectrum is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BandConfig {
    pub low_hz: f64,
    pub high_hz: f64,
    pub bins: usize,
}

impl Default for BandConfig {
    fn default() -> Self {
        BandConfig {
            low_hz: 200e6,
            high_hz: 900e6,
            bins: 100,
        }
    }
}

/// Soil properties held fixed during the search; the permittivity is what
/// gets retrieved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SoilTemplate {
    /// m.
    pub roughness_height: f64,
    pub scattering_beamwidth_deg: f64,
    /// m; ten times the roughness height when absent.
    pub correlation_length: Option<f64>,
}

impl Default for SoilTemplate {
    fn default() -> Self {
        let s = SoilDescriptor::new(ComplexPermittivity::VACUUM);
        SoilTemplate {
            roughness_height: s.roughness_height,
            scattering_beamwidth_deg: s.scattering_beamwidth.to_degrees(),
            correlation_length: None,
        }
    }
}

impl SoilTemplate {
    pub fn descriptor(&self, permittivity: ComplexPermittivity) -> SoilDescriptor {
        SoilDescriptor {
            permittivity,
            roughness_height: self.roughness_height,
            scattering_beamwidth: self.scattering_beamwidth_deg.to_radians(),
            correlation_length: self.correlation_length,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ViewConfig {
    pub effective_beamwidth_deg: f64,
    pub antenna_halfpower_beamwidth_deg: f64,
}

impl Default for ViewConfig {
    fn default() -> Self {
        let v = ViewGeometry::new(1.0);
        ViewConfig {
            effective_beamwidth_deg: v.effective_beamwidth.to_degrees(),
            antenna_halfpower_beamwidth_deg: v.antenna_halfpower_beamwidth.to_degrees(),
        }
    }
}

impl ViewConfig {
    pub fn at(&self, altitude: f64) -> ViewGeometry {
        ViewGeometry {
            altitude,
            effective_beamwidth: self.effective_beamwidth_deg.to_radians(),
            antenna_halfpower_beamwidth: self.antenna_halfpower_beamwidth_deg.to_radians(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GateSettings {
    /// m.
    pub search_half_width: f64,
    pub window_pulse_widths: f64,
    pub taper_fraction: f64,
}

impl Default for GateSettings {
    fn default() -> Self {
        let g = GateConfig::default();
        GateSettings {
            search_half_width: g.search_half_width,
            window_pulse_widths: g.window_pulse_widths,
            taper_fraction: g.taper_fraction,
        }
    }
}

/// Synthetic radar used by `simulate`; the pulse center frequency comes from
/// the top-level setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulatorSettings {
    pub hardware: HardwareModel,
    /// Hz.
    pub sample_rate: f64,
    pub coupling_gain: f64,
    /// s.
    pub coupling_delay: f64,
    /// m².
    pub clutter_rcs: f64,
    /// m.
    pub clutter_min_height: f64,
}

impl Default for SimulatorSettings {
    fn default() -> Self {
        let s = RadarSimulator::default();
        SimulatorSettings {
            hardware: s.hardware,
            sample_rate: s.sample_rate,
            coupling_gain: s.coupling_gain,
            coupling_delay: s.coupling_delay,
            clutter_rcs: s.clutter_rcs,
            clutter_min_height: s.clutter_min_height,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LidarSettings {
    /// Allometry table; the built-in table is used when absent.
    pub allometry: Option<PathBuf>,
    /// Square tile edge, m; the whole cloud is one tile when absent.
    pub tile_size: Option<f64>,
    /// Leaf thickness written to the canopy descriptor, m.
    pub leaf_thickness: f64,
    pub structure: StructureConfig,
}

impl Default for LidarSettings {
    fn default() -> Self {
        LidarSettings {
            allometry: None,
            tile_size: None,
            leaf_thickness: 3e-4,
            structure: StructureConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Relative to the working directory; overridden by `--output-dir` and
    /// the `SOILSCAN_OUTPUT_DIR` variable.
    pub output_dir: Option<PathBuf>,
    /// Canopy descriptor file, or one of `bare`, `corn`, `soybean`.
    pub canopy: Option<String>,
    pub calibration: Option<PathBuf>,
    /// Ricker pulse center frequency, Hz.
    pub center_frequency: f64,
    /// Real permittivity given to the built-in canopies; the loss tangent is
    /// the search's canopy loss tangent.
    pub canopy_permittivity: f64,
    pub band: BandConfig,
    pub search: SearchConfig,
    pub soil: SoilTemplate,
    pub view: ViewConfig,
    pub gate: GateSettings,
    pub simulator: SimulatorSettings,
    pub lidar: LidarSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            output_dir: None,
            canopy: None,
            calibration: None,
            center_frequency: DEFAULT_CENTER_FREQUENCY,
            canopy_permittivity: 22.0,
            band: BandConfig::default(),
            search: SearchConfig::default(),
            soil: SoilTemplate::default(),
            view: ViewConfig::default(),
            gate: GateSettings::default(),
            simulator: SimulatorSettings::default(),
            lidar: LidarSettings::default(),
        }
    }
}

/// 1-based line of byte offset `at`.
pub(crate) fn line_of(text: &str, at: usize) -> usize {
    text[..at.min(text.len())].matches('\n').count() + 1
}

/// Parses TOML into `T`, reporting failures as `path:line: message`.
pub(crate) fn parse_toml<T: serde::de::DeserializeOwned>(text: &str, path: &Path) -> Result<T> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(0);
        CliError::input(format!("{}:{line}: {}", path.display(), e.message().trim_end()))
    })
}

pub(crate) fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_relative() {
        base.join(p)
    } else {
        p.to_path_buf()
    }
}

fn require_file(path: &Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::input(format!("{}: {what} file does not exist", path.display())))
    }
}

pub fn is_builtin_canopy(name: &str) -> bool {
    matches!(name, "bare" | "corn" | "soybean")
}

impl RunConfig {
    /// Reads a configuration file. Relative file references are resolved
    /// against the file's directory and must exist.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let mut cfg: RunConfig = parse_toml(&text, path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(c) = &cfg.canopy {
            if !is_builtin_canopy(c) {
                let p = resolve(base, Path::new(c));
                require_file(&p, "canopy")?;
                cfg.canopy = Some(p.display().to_string());
            }
        }
        if let Some(c) = &cfg.calibration {
            let p = resolve(base, c);
            require_file(&p, "calibration")?;
            cfg.calibration = Some(p);
        }
        if let Some(a) = &cfg.lidar.allometry {
            let p = resolve(base, a);
            require_file(&p, "allometry")?;
            cfg.lidar.allometry = Some(p);
        }
        if let Some(o) = &cfg.output_dir {
            cfg.output_dir = Some(resolve(base, o));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.search.validate()?;
        if !(self.center_frequency > 0.0) || !self.center_frequency.is_finite() {
            return Err(CliError::input("center_frequency must be a positive number of Hz"));
        }
        if !(self.canopy_permittivity >= 1.0) {
            return Err(CliError::input("canopy_permittivity must be >= 1"));
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        let b = self.band;
        if b.bins < 2 || !(b.low_hz > 0.0) || !(b.high_hz > b.low_hz) {
            return Err(CliError::input(format!(
                "band needs 0 < low_hz < high_hz and at least 2 bins, got [{}, {}] with {}",
                b.low_hz, b.high_hz, b.bins
            )));
        }
        Ok(FrequencyGrid::linspace(b.low_hz, b.high_hz, b.bins)?)
    }

    pub fn gate(&self) -> GateConfig {
        GateConfig {
            center_frequency: self.center_frequency,
            search_half_width: self.gate.search_half_width,
            window_pulse_widths: self.gate.window_pulse_widths,
            taper_fraction: self.gate.taper_fraction,
        }
    }

    pub fn simulator(&self, noise_rms: f64) -> RadarSimulator {
        let s = self.simulator;
        RadarSimulator {
            hardware: s.hardware,
            sample_rate: s.sample_rate,
            center_frequency: self.center_frequency,
            noise_rms,
            coupling_gain: s.coupling_gain,
            coupling_delay: s.coupling_delay,
            clutter_rcs: s.clutter_rcs,
            clutter_min_height: s.clutter_min_height,
            duration: None,
        }
    }

    /// Soil template for the search; its permittivity is a placeholder.
    pub fn soil_template(&self) -> SoilDescriptor {
        self.soil.descriptor(ComplexPermittivity::VACUUM)
    }

    pub fn builtin_canopy_permittivity(&self) -> Result<ComplexPermittivity> {
        Ok(ComplexPermittivity::with_loss_tangent(
            self.canopy_permittivity,
            self.search.canopy_loss_tangent,
        )?)
    }

    /// Canopy named by `spec` (a keyword or a descriptor file), falling back
    /// to the configured one and then to bare soil.
    pub fn canopy(&self, spec: Option<&str>) -> Result<CanopyDescriptor> {
        let spec = spec.or(self.canopy.as_deref()).unwrap_or("bare");
        load_canopy(spec, Path::new("."), self.builtin_canopy_permittivity()?)
    }
}

/// A built-in canopy keyword or a descriptor file relative to `base`.
pub fn load_canopy(spec: &str, base: &Path, permittivity: ComplexPermittivity) -> Result<CanopyDescriptor> {
    Ok(match spec {
        "bare" => CanopyDescriptor::bare(),
        "corn" => CanopyDescriptor::typical_corn(permittivity),
        "soybean" => CanopyDescriptor::typical_soybean(permittivity),
        path => CanopyDescriptor::load(&resolve(base, Path::new(path)))?,
    })
}
