//! `sweep`: retrieval sensitivity tables with a chart of each.

use std::path::PathBuf;

use soilscan_core::canopy::CanopyDescriptor;
use soilscan_core::em::SoilMoisture;
use soilscan_core::ground::RcsSpectrum;
use soilscan_core::retrieval::{
    sweep_altitude, sweep_bandwidth, sweep_canopy_ablation, sweep_effective_beamwidth,
};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::OutputDir;
use crate::svg::{render, Chart, Series};
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Beamwidth,
    Bandwidth,
    Altitude,
    CanopyAblation,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Beamwidth => "beamwidth",
            SweepKind::Bandwidth => "bandwidth",
            SweepKind::Altitude => "altitude",
            SweepKind::CanopyAblation => "canopy-ablation",
        }
    }
}

/// Measured spectra with the altitude each was taken from.
#[derive(Debug, Clone)]
pub struct SweepInputs {
    pub spectra: Vec<(RcsSpectrum, f64)>,
    pub truth: Option<f64>,
    /// Effective beamwidths to try, deg.
    pub beamwidths_deg: Option<Vec<f64>>,
    /// Sub-bands to try, Hz.
    pub bands: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub table: Table,
    pub csv: PathBuf,
    pub svg: PathBuf,
}

/// 0.5° to 5° in 0.25° steps.
pub fn default_beamwidths_deg() -> Vec<f64> {
    (0..=18).map(|k| 0.5 + 0.25 * k as f64).collect()
}

/// The full band followed by adjacent 100 MHz windows across it.
pub fn default_bands(cfg: &RunConfig) -> Vec<(f64, f64)> {
    let (lo, hi) = (cfg.band.low_hz, cfg.band.high_hz);
    let mut bands = vec![(lo, hi)];
    let mut start = lo;
    while start + 100e6 <= hi + 1.0 {
        bands.push((start, start + 100e6));
        start += 100e6;
    }
    bands
}

fn single(inputs: &SweepInputs, kind: SweepKind) -> Result<&(RcsSpectrum, f64)> {
    match inputs.spectra.as_slice() {
        [one] => Ok(one),
        s => Err(CliError::input(format!(
            "{} sweep takes exactly one spectrum, got {}",
            kind.name(),
            s.len()
        ))),
    }
}

fn truth(inputs: &SweepInputs, kind: SweepKind) -> Result<SoilMoisture> {
    let v = inputs
        .truth
        .ok_or_else(|| CliError::input(format!("{} sweep needs the true moisture (--vwc or --truth)", kind.name())))?;
    Ok(SoilMoisture::new(v)?)
}

fn line(label: &str, xs: &[f64], ys: &[f64]) -> Series {
    Series {
        label: label.into(),
        points: xs.iter().copied().zip(ys.iter().copied()).collect(),
    }
}

pub fn run_sweep(
    cfg: &RunConfig,
    kind: SweepKind,
    inputs: &SweepInputs,
    canopy: &CanopyDescriptor,
    out: &OutputDir,
) -> Result<SweepOutput> {
    let soil = cfg.soil_template();
    let search = &cfg.search;
    let (table, chart) = match kind {
        SweepKind::Beamwidth => {
            let (m, alt) = single(inputs, kind)?;
            let degs = inputs.beamwidths_deg.clone().unwrap_or_else(default_beamwidths_deg);
            let rads: Vec<f64> = degs.iter().map(|d| d.to_radians()).collect();
            let rows = sweep_effective_beamwidth(m, canopy, &soil, &cfg.view.at(*alt), search, &rads, truth(inputs, kind)?)?;
            let mut t = Table::new(&["effective_beamwidth_deg", "vwc", "vwc_error"]);
            for r in &rows {
                t.push(vec![r.effective_beamwidth.to_degrees(), r.vwc, r.vwc_error]);
            }
            let chart = Chart {
                title: "Retrieval error against assumed effective beamwidth".into(),
                x_label: "effective beamwidth (deg)".into(),
                y_label: "VWC error (m3/m3)".into(),
                series: vec![line("error", &t.column("effective_beamwidth_deg")?, &t.column("vwc_error")?)],
            };
            (t, chart)
        }
        SweepKind::Bandwidth => {
            let (m, alt) = single(inputs, kind)?;
            let bands = inputs.bands.clone().unwrap_or_else(|| default_bands(cfg));
            let rows = sweep_bandwidth(m, canopy, &soil, &cfg.view.at(*alt), search, &bands, truth(inputs, kind)?)?;
            let mut t = Table::new(&["low_hz", "high_hz", "frequencies_used", "vwc", "vwc_error", "soil_at_boundary"]);
            for r in &rows {
                t.push(vec![
                    r.low,
                    r.high,
                    r.frequencies_used as f64,
                    r.vwc,
                    r.vwc_error,
                    f64::from(u8::from(r.soil_at_boundary)),
                ]);
            }
            let centers: Vec<f64> = rows.iter().map(|r| 0.5 * (r.low + r.high) / 1e6).collect();
            let chart = Chart {
                title: "Retrieval error per frequency sub-band".into(),
                x_label: "band center (MHz)".into(),
                y_label: "VWC error (m3/m3)".into(),
                series: vec![line("error", &centers, &t.column("vwc_error")?)],
            };
            (t, chart)
        }
        SweepKind::Altitude => {
            if inputs.spectra.is_empty() {
                return Err(CliError::input("altitude sweep needs at least one spectrum"));
            }
            let scenes: Vec<_> = inputs.spectra.iter().map(|(m, a)| (cfg.view.at(*a), m.clone())).collect();
            let rows = sweep_altitude(&scenes, canopy, &soil, search)?;
            let mut t = Table::new(&["altitude_m", "vwc"]);
            for r in &rows {
                t.push(vec![r.altitude, r.vwc]);
            }
            let chart = Chart {
                title: "Retrieved moisture against altitude".into(),
                x_label: "altitude (m)".into(),
                y_label: "VWC (m3/m3)".into(),
                series: vec![line("retrieved", &t.column("altitude_m")?, &t.column("vwc")?)],
            };
            (t, chart)
        }
        SweepKind::CanopyAblation => {
            let (m, alt) = single(inputs, kind)?;
            let rows = sweep_canopy_ablation(m, canopy, &soil, &cfg.view.at(*alt), search, truth(inputs, kind)?)?;
            let mut t = Table::new(&["canopy_modeling", "vwc", "vwc_error"]);
            for r in &rows {
                t.push(vec![f64::from(u8::from(r.canopy_modeling)), r.vwc, r.vwc_error]);
            }
            let chart = Chart {
                title: "Retrieval error with and without the canopy term".into(),
                x_label: "canopy modeling (1 on, 0 off)".into(),
                y_label: "VWC error (m3/m3)".into(),
                series: vec![line("error", &t.column("canopy_modeling")?, &t.column("vwc_error")?)],
            };
            (t, chart)
        }
    };
    let name = kind.name().replace('-', "_");
    let csv = out.write(&format!("{name}_sweep.csv"), &table.to_csv())?;
    let svg = out.write(&format!("{name}_sweep.svg"), &render(&chart))?;
    Ok(SweepOutput { table, csv, svg })
}
