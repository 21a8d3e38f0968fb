//! Command-line workflows: synthetic scene simulation, plate calibration,
//! RCS computation, soil moisture retrieval, LiDAR canopy structure,
//! sensitivity sweeps and plot data.
//!
//! Every command is also callable as a library function so the same code
//! paths can be driven from tests.

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod plot;
pub mod simulate;
pub mod svg;
pub mod sweep;
pub mod table;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use soilscan_core::canopy::CropKind;

pub use config::RunConfig;
pub use error::{CliError, ErrorKind, Result};
pub use output::{OutputDir, OUTPUT_DIR_ENV};

use simulate::{SceneSpec, TruthRecord};
use sweep::{SweepInputs, SweepKind};

#[derive(Debug, Parser)]
#[command(name = "soilscan", version, about = "Radar soil moisture retrieval under crop canopies")]
pub struct Cli {
    /// Run configuration (TOML); built-in defaults when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for every output file.
    #[arg(long, global = true, env = OUTPUT_DIR_ENV)]
    pub output_dir: Option<PathBuf>,
    /// Overrides the configured random seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthetic A-scans or point clouds plus a truth sidecar.
    Simulate {
        /// Scene description (TOML) with `kind = "ground" | "plate" | "field"`.
        #[arg(long)]
        scene: PathBuf,
    },
    /// Calibration factor from plate scans.
    Calibrate {
        /// Plate side length, m.
        #[arg(long, default_value_t = 0.9)]
        plate_side: f64,
        /// Plate ranges in scan order, m; defaults to each scan's altitude.
        #[arg(long, value_delimiter = ',')]
        ranges: Option<Vec<f64>>,
        /// Output file name.
        #[arg(long, default_value = "calibration.csv")]
        name: String,
        #[arg(required = true)]
        scans: Vec<PathBuf>,
    },
    /// Calibrated ground RCS spectra from A-scans.
    Rcs {
        /// Calibration file; defaults to the configured one.
        #[arg(long)]
        calibration: Option<PathBuf>,
        /// Platform altitude, m; defaults to each scan's altitude.
        #[arg(long)]
        altitude: Option<f64>,
        #[arg(required = true)]
        scans: Vec<PathBuf>,
    },
    /// Soil moisture retrieval from RCS spectra.
    Retrieve {
        #[command(flatten)]
        scene: SceneArgs,
        #[arg(required = true)]
        spectra: Vec<PathBuf>,
    },
    /// Canopy structure from point clouds.
    Lidar {
        #[arg(long, value_enum)]
        crop: CropArg,
        /// Allometry table; defaults to the configured or built-in one.
        #[arg(long)]
        allometry: Option<PathBuf>,
        /// Square tile edge, m.
        #[arg(long)]
        tile_size: Option<f64>,
        #[arg(required = true)]
        clouds: Vec<PathBuf>,
    },
    /// Retrieval sensitivity sweeps.
    Sweep {
        #[arg(value_enum)]
        kind: SweepArg,
        #[command(flatten)]
        scene: SceneArgs,
        /// True moisture, m³/m³.
        #[arg(long, conflicts_with = "truth")]
        vwc: Option<f64>,
        /// Truth sidecar written by `simulate`.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Effective beamwidths to try, deg.
        #[arg(long, value_delimiter = ',')]
        beamwidths_deg: Option<Vec<f64>>,
        /// Sub-bands to try, as `low-high` in MHz.
        #[arg(long, value_delimiter = ',')]
        bands_mhz: Option<Vec<String>>,
        #[arg(required = true)]
        spectra: Vec<PathBuf>,
    },
    /// CSV data and SVG charts.
    Plot {
        #[command(subcommand)]
        what: PlotCommand,
    },
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    /// Canopy descriptor file or `bare`, `corn`, `soybean`; defaults to the
    /// configured canopy.
    #[arg(long)]
    pub canopy: Option<String>,
    /// Platform altitude, m; defaults to each spectrum's metadata.
    #[arg(long)]
    pub altitude: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum PlotCommand {
    /// RCS spectra in dBsm.
    Rcs {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Coherent and incoherent ground RCS against incidence angle.
    Incidence {
        #[arg(long)]
        vwc: f64,
        #[arg(long)]
        canopy: Option<String>,
        #[arg(long, default_value_t = 6.0)]
        altitude: f64,
        #[arg(long, default_value_t = 550e6)]
        frequency: f64,
        #[arg(long, default_value_t = 10.0)]
        max_deg: f64,
    },
    /// Simulated and measured spectra of a retrieval report.
    Fit { report: PathBuf },
    /// Any numeric CSV table.
    Table {
        file: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CropArg {
    Corn,
    Soybean,
}

impl From<CropArg> for CropKind {
    fn from(c: CropArg) -> Self {
        match c {
            CropArg::Corn => CropKind::Corn,
            CropArg::Soybean => CropKind::Soybean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepArg {
    Beamwidth,
    Bandwidth,
    Altitude,
    CanopyAblation,
}

impl From<SweepArg> for SweepKind {
    fn from(k: SweepArg) -> Self {
        match k {
            SweepArg::Beamwidth => SweepKind::Beamwidth,
            SweepArg::Bandwidth => SweepKind::Bandwidth,
            SweepArg::Altitude => SweepKind::Altitude,
            SweepArg::CanopyAblation => SweepKind::CanopyAblation,
        }
    }
}

/// Parses `low-high` in MHz into Hz.
fn parse_band(s: &str) -> Result<(f64, f64)> {
    let bad = || CliError::input(format!("band {s:?} is not `low-high` in MHz"));
    let (a, b) = s.split_once('-').ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok((lo * 1e6, hi * 1e6))
}

fn print_written(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

/// Resolved configuration and output directory for one invocation.
pub fn context(cli: &Cli) -> Result<(RunConfig, OutputDir)> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let dir = cli
        .output_dir
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((cfg, OutputDir::create(dir)?))
}

pub fn run(cli: Cli) -> Result<()> {
    let (cfg, out) = context(&cli)?;
    match cli.command {
        Command::Simulate { scene } => {
            let spec = SceneSpec::load(&scene)?;
            let base = scene.parent().unwrap_or(Path::new("."));
            let o = simulate::simulate(&cfg, &spec, base, &out)?;
            print_written(&o.files);
            print_written(&[o.truth]);
        }
        Command::Calibrate {
            plate_side,
            ranges,
            name,
            scans,
        } => {
            let p = pipeline::calibrate(&cfg, &scans, plate_side, ranges.as_deref(), &out, &name)?;
            print_written(&[p]);
        }
        Command::Rcs {
            calibration,
            altitude,
            scans,
        } => {
            let cal = calibration
                .or_else(|| cfg.calibration.clone())
                .ok_or_else(|| CliError::input("no calibration file: pass --calibration or set it in the config"))?;
            print_written(&pipeline::rcs(&cfg, &scans, &cal, altitude, &out)?);
        }
        Command::Retrieve { scene, spectra } => {
            let canopy = cfg.canopy(scene.canopy.as_deref())?;
            for (path, rep) in pipeline::retrieve(&cfg, &spectra, &canopy, scene.altitude, &out)? {
                println!(
                    "{}: vwc={:.4} soil_eps={:.3} canopy_eps={:.3}",
                    path.display(),
                    rep.vwc,
                    rep.soil_permittivity.real_part(),
                    rep.canopy_permittivity.real_part()
                );
            }
        }
        Command::Lidar {
            crop,
            allometry,
            tile_size,
            clouds,
        } => {
            let mut cfg = cfg;
            if let Some(a) = allometry {
                cfg.lidar.allometry = Some(a);
            }
            if tile_size.is_some() {
                cfg.lidar.tile_size = tile_size;
            }
            for o in pipeline::lidar(&cfg, &clouds, crop.into(), &out)? {
                print_written(&[o.structure]);
                print_written(&o.descriptor.into_iter().collect::<Vec<_>>());
            }
        }
        Command::Sweep {
            kind,
            scene,
            vwc,
            truth,
            beamwidths_deg,
            bands_mhz,
            spectra,
        } => {
            let canopy = cfg.canopy(scene.canopy.as_deref())?;
            let truth = match (vwc, truth) {
                (Some(v), _) => Some(v),
                (None, Some(p)) => Some(
                    TruthRecord::load(&p)?
                        .vwc()
                        .ok_or_else(|| CliError::input(format!("{}: not a ground scene truth file", p.display())))?,
                ),
                (None, None) => None,
            };
            let bands = bands_mhz
                .map(|b| b.iter().map(|s| parse_band(s)).collect::<Result<Vec<_>>>())
                .transpose()?;
            let spectra = spectra
                .iter()
                .map(|p| pipeline::load_spectrum(p, scene.altitude))
                .collect::<Result<Vec<_>>>()?;
            let inputs = SweepInputs {
                spectra,
                truth,
                beamwidths_deg,
                bands,
            };
            let o = sweep::run_sweep(&cfg, kind.into(), &inputs, &canopy, &out)?;
            print_written(&[o.csv, o.svg]);
        }
        Command::Plot { what } => {
            let written = match what {
                PlotCommand::Rcs { files } => plot::plot_spectra(&files, &out)?,
                PlotCommand::Incidence {
                    vwc,
                    canopy,
                    altitude,
                    frequency,
                    max_deg,
                } => {
                    let canopy = cfg.canopy(canopy.as_deref())?;
                    plot::plot_incidence(&cfg, vwc, &canopy, altitude, frequency, max_deg, &out)?
                }
                PlotCommand::Fit { report } => plot::plot_fit(&report, &out)?,
                PlotCommand::Table { file, x, y } => vec![plot::plot_table(&file, &x, &y, &out)?],
            };
            print_written(&written);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bands_parse_in_megahertz() {
        assert_eq!(parse_band("800-900").unwrap(), (800e6, 900e6));
        assert!(parse_band("800").is_err());
    }

    #[test]
    fn command_line_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
