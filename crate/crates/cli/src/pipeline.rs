//! `calibrate`, `rcs`, `retrieve` and `lidar`: file-to-file processing.
//!
//! Each input file is processed independently on the rayon pool; outputs
//! keep the order of the inputs.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use soilscan_core::canopy::CanopyDescriptor;
use soilscan_core::em::{ComplexPermittivity, FrequencyGrid};
use soilscan_core::formats::{
    format_calibration, format_rcs, load_ascan, load_calibration, load_rcs, RcsRecord,
};
use soilscan_core::ground::RcsSpectrum;
use soilscan_core::radar::{channel_response, derive_calibration, isolate_ground_return, measured_rcs, PlateMeasurement};
use soilscan_core::retrieval::{RetrievalResult, Retriever, SearchConfig, SearchDiagnostics};
use soilscan_core::canopy::CropKind;
use soilscan_lidar::cloud::load_xyz;
use soilscan_lidar::estimate::{allometry_for, default_allometry, load_allometry};
use soilscan_lidar::{estimate_structure, CanopyStructureEstimate, Tile};

use crate::config::{parse_toml, read, BandConfig, RunConfig, SoilTemplate, ViewConfig};
use crate::error::{CliError, Result};
use crate::output::{stem_of, OutputDir};

/// Runs `f` on every input in parallel and returns the results in input
/// order, or the first failure in input order.
fn each<T: Send>(inputs: &[PathBuf], f: impl Fn(&Path) -> Result<T> + Sync) -> Result<Vec<T>> {
    if inputs.is_empty() {
        return Err(CliError::input("no input files given"));
    }
    inputs
        .par_iter()
        .map(|p| f(p).map_err(|e| e.at(p)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Derives the calibration factor from plate scans. Ranges default to the
/// altitude recorded in each scan.
pub fn calibrate(
    cfg: &RunConfig,
    scans: &[PathBuf],
    plate_side: f64,
    ranges: Option<&[f64]>,
    out: &OutputDir,
    name: &str,
) -> Result<PathBuf> {
    let loaded = each(scans, |p| Ok(load_ascan(p)?))?;
    if let Some(r) = ranges {
        if r.len() != loaded.len() {
            return Err(CliError::input(format!(
                "{} ranges given for {} plate scans",
                r.len(),
                loaded.len()
            )));
        }
    }
    let plates: Vec<PlateMeasurement> = loaded
        .into_iter()
        .enumerate()
        .map(|(i, scan)| PlateMeasurement {
            range: ranges.map_or(scan.altitude_est, |r| r[i]),
            scan,
        })
        .collect();
    let cal = derive_calibration(&plates, plate_side, &cfg.grid()?, &cfg.gate())?;
    out.write(name, &format_calibration(&cal))
}

/// Calibrated RCS spectrum of each scan, written as `<stem>.rcs.csv`. The
/// range is the scan's recorded altitude unless `altitude` is given.
pub fn rcs(
    cfg: &RunConfig,
    scans: &[PathBuf],
    calibration: &Path,
    altitude: Option<f64>,
    out: &OutputDir,
) -> Result<Vec<PathBuf>> {
    let cal = load_calibration(calibration)?;
    let gate = cfg.gate();
    each(scans, |p| {
        let scan = load_ascan(p)?;
        let range = altitude.unwrap_or(scan.altitude_est);
        let segment = isolate_ground_return(&scan, &gate)?;
        let response = channel_response(&segment, &cal.grid)?;
        let spectrum = measured_rcs(&response, range, &cal)?;
        let record = RcsRecord {
            spectrum,
            altitude: Some(range),
            location: (!scan.location.is_empty()).then(|| scan.location.clone()),
        };
        out.write(&format!("{}.rcs.csv", stem_of(p, &[".csv", ".ascan"])?), &format_rcs(&record))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub frequency_hz: f64,
    pub simulated_m2: f64,
    pub measured_m2: f64,
}

/// Settings a retrieval ran with, echoed into its report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub center_frequency: f64,
    pub band: BandConfig,
    pub soil: SoilTemplate,
    pub view: ViewConfig,
    pub search: SearchConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalReport {
    pub source: String,
    /// m.
    pub altitude: f64,
    pub vwc: f64,
    pub soil_permittivity: ComplexPermittivity,
    pub canopy_permittivity: ComplexPermittivity,
    /// m⁴ for the linear residual, dB² for the decibel one.
    pub residual: f64,
    pub diagnostics: SearchDiagnostics,
    pub config: ConfigEcho,
    pub canopy: CanopyDescriptor,
    pub fit: Vec<FitRow>,
}

impl RetrievalReport {
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("report always serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        parse_toml(&read(path)?, path)
    }
}

impl ConfigEcho {
    pub fn of(cfg: &RunConfig) -> Self {
        ConfigEcho {
            seed: cfg.seed,
            center_frequency: cfg.center_frequency,
            band: cfg.band,
            soil: cfg.soil,
            view: cfg.view,
            search: cfg.search.clone(),
        }
    }
}

/// Altitude for a spectrum: the explicit override, else the file metadata.
pub fn spectrum_altitude(record: &RcsRecord, altitude: Option<f64>, path: &Path) -> Result<f64> {
    altitude.or(record.altitude).ok_or_else(|| {
        CliError::input(format!(
            "{}: no altitude_m metadata; pass --altitude",
            path.display()
        ))
    })
}

fn report(source: &Path, altitude: f64, r: RetrievalResult, cfg: &RunConfig, canopy: &CanopyDescriptor) -> RetrievalReport {
    RetrievalReport {
        source: source.display().to_string(),
        altitude,
        vwc: r.vwc.value(),
        soil_permittivity: r.soil_permittivity,
        canopy_permittivity: r.canopy_permittivity,
        residual: r.residual,
        diagnostics: r.diagnostics,
        config: ConfigEcho::of(cfg),
        canopy: canopy.clone(),
        fit: r
            .pairs
            .iter()
            .map(|p| FitRow {
                frequency_hz: p.frequency_hz,
                simulated_m2: p.simulated,
                measured_m2: p.measured,
            })
            .collect(),
    }
}

/// Grid-search retrieval of each spectrum, written as
/// `<stem>.retrieval.toml`. Forward-model tables are shared between spectra
/// measured on the same grid from the same altitude.
pub fn retrieve(
    cfg: &RunConfig,
    spectra: &[PathBuf],
    canopy: &CanopyDescriptor,
    altitude: Option<f64>,
    out: &OutputDir,
) -> Result<Vec<(PathBuf, RetrievalReport)>> {
    let records = each(spectra, |p| {
        let rec = load_rcs(p)?;
        let alt = spectrum_altitude(&rec, altitude, p)?;
        Ok((rec, alt))
    })?;
    let soil = cfg.soil_template();
    let mut cache: Vec<(FrequencyGrid, f64, Retriever)> = Vec::new();
    let mut reports = Vec::with_capacity(spectra.len());
    for (path, (rec, alt)) in spectra.iter().zip(records) {
        let grid = rec.spectrum.grid();
        let k = match cache.iter().position(|(g, a, _)| g == grid && *a == alt) {
            Some(k) => k,
            None => {
                let mut search = cfg.search.clone();
                search.parallel = true;
                let r = Retriever::new(grid.frequencies(), canopy, &soil, &cfg.view.at(alt), &search)
                    .map_err(|e| CliError::from(e).at(path))?;
                cache.push((grid.clone(), alt, r));
                cache.len() - 1
            }
        };
        let result = cache[k].2.retrieve(&rec.spectrum).map_err(|e| CliError::from(e).at(path))?;
        let rep = report(path, alt, result, cfg, canopy);
        let name = format!("{}.retrieval.toml", stem_of(path, &[".csv", ".rcs"])?);
        let written = out.write(&name, &rep.to_toml_string())?;
        reports.push((written, rep));
    }
    Ok(reports)
}

/// Loads an RCS file and its altitude.
pub fn load_spectrum(path: &Path, altitude: Option<f64>) -> Result<(RcsSpectrum, f64)> {
    let rec = load_rcs(path).map_err(|e| CliError::from(e).at(path))?;
    let alt = spectrum_altitude(&rec, altitude, path)?;
    Ok((rec.spectrum, alt))
}

#[derive(Debug, Clone)]
pub struct LidarOutput {
    pub structure: PathBuf,
    pub descriptor: Option<PathBuf>,
    pub estimate: CanopyStructureEstimate,
}

/// Canopy structure of each point cloud, written as `<stem>.structure.toml`
/// plus a forward-model canopy `<stem>.canopy.toml` when one can be built.
pub fn lidar(cfg: &RunConfig, clouds: &[PathBuf], crop: CropKind, out: &OutputDir) -> Result<Vec<LidarOutput>> {
    let table = match &cfg.lidar.allometry {
        Some(p) => load_allometry(p)?,
        None => default_allometry(),
    };
    let allometry = allometry_for(&table, crop)?;
    let leaf_eps = cfg.builtin_canopy_permittivity()?;
    let settings = &cfg.lidar;
    each(clouds, |p| {
        let cloud = load_xyz(p)?;
        let whole = Tile::bounding(&cloud)?;
        let tiles = match settings.tile_size {
            Some(s) => whole.split(s)?,
            None => vec![whole],
        };
        let parts = tiles
            .par_iter()
            .map(|t| estimate_structure(&cloud, t, crop, &allometry, &settings.structure))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let estimate = CanopyStructureEstimate::combine(&parts)?;
        let stem = stem_of(p, &[".xyz", ".txt", ".csv"])?;
        let structure = out.write(&format!("{stem}.structure.toml"), &estimate.to_toml_string())?;
        let descriptor = match estimate.to_descriptor(&allometry, settings.leaf_thickness, leaf_eps) {
            Ok(d) => Some(out.write(&format!("{stem}.canopy.toml"), &d.to_toml_string())?),
            Err(_) if estimate.height <= 0.0 => None,
            Err(e) => return Err(e.into()),
        };
        Ok(LidarOutput {
            structure,
            descriptor,
            estimate,
        })
    })
}
