//! `plot`: CSV data and SVG charts for spectra, incidence curves, retrieval
//! fits and any numeric table.

use std::path::{Path, PathBuf};

use soilscan_core::canopy::CanopyDescriptor;
use soilscan_core::em::{topp_permittivity, ComplexPermittivity, SoilMoisture};
use soilscan_core::formats::load_rcs;
use soilscan_core::ground::{rcs_vs_incidence, to_db};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{stem_of, OutputDir};
use crate::pipeline::RetrievalReport;
use crate::svg::{render, Chart, Series};
use crate::table::Table;

/// Per-file dBsm tables and one chart overlaying every spectrum.
pub fn plot_spectra(files: &[PathBuf], out: &OutputDir) -> Result<Vec<PathBuf>> {
    if files.is_empty() {
        return Err(CliError::input("no input files given"));
    }
    let mut written = Vec::new();
    let mut series = Vec::new();
    for p in files {
        let rec = load_rcs(p).map_err(|e| CliError::from(e).at(p))?;
        let stem = stem_of(p, &[".csv", ".rcs"])?;
        let mut t = Table::new(&["frequency_hz", "rcs_dbsm"]);
        for (f, v) in rec.spectrum.iter() {
            t.push(vec![f, to_db(v)]);
        }
        written.push(out.write(&format!("{stem}.dbsm.csv"), &t.to_csv())?);
        series.push(Series {
            label: stem,
            points: t.rows.iter().map(|r| (r[0] / 1e6, r[1])).collect(),
        });
    }
    let chart = Chart {
        title: "Radar cross section".into(),
        x_label: "frequency (MHz)".into(),
        y_label: "RCS (dBsm)".into(),
        series,
    };
    written.push(out.write("rcs.svg", &render(&chart))?);
    Ok(written)
}

/// Coherent and diffuse ground RCS against incidence angle at one frequency.
pub fn plot_incidence(
    cfg: &RunConfig,
    vwc: f64,
    canopy: &CanopyDescriptor,
    altitude: f64,
    frequency_hz: f64,
    max_deg: f64,
    out: &OutputDir,
) -> Result<Vec<PathBuf>> {
    if !(max_deg > 0.0 && max_deg < 80.0) {
        return Err(CliError::input("maximum angle must lie in (0, 80) deg"));
    }
    let eps = topp_permittivity(SoilMoisture::new(vwc)?)?;
    let soil = cfg
        .soil
        .descriptor(ComplexPermittivity::with_loss_tangent(eps, cfg.search.soil_loss_tangent)?);
    let thetas: Vec<f64> = (0..=200).map(|k| (max_deg * k as f64 / 200.0).to_radians()).collect();
    let rows = rcs_vs_incidence(&soil, canopy, &cfg.view.at(altitude), frequency_hz, &thetas)?;
    let mut t = Table::new(&["incidence_deg", "coherent_dbsm", "incoherent_dbsm"]);
    for r in &rows {
        t.push(vec![r.theta_i.to_degrees(), to_db(r.coherent), to_db(r.incoherent)]);
    }
    let x = t.column("incidence_deg")?;
    let chart = Chart {
        title: format!("Ground RCS components at {} MHz", frequency_hz / 1e6),
        x_label: "incidence angle (deg)".into(),
        y_label: "RCS (dBsm)".into(),
        series: vec![
            Series {
                label: "coherent".into(),
                points: x.iter().copied().zip(t.column("coherent_dbsm")?).collect(),
            },
            Series {
                label: "incoherent".into(),
                points: x.iter().copied().zip(t.column("incoherent_dbsm")?).collect(),
            },
        ],
    };
    Ok(vec![
        out.write("incidence.csv", &t.to_csv())?,
        out.write("incidence.svg", &render(&chart))?,
    ])
}

/// Simulated against measured spectrum of a retrieval report.
pub fn plot_fit(report: &Path, out: &OutputDir) -> Result<Vec<PathBuf>> {
    let rep = RetrievalReport::load(report)?;
    let stem = stem_of(report, &[".toml", ".retrieval"])?;
    let mut t = Table::new(&["frequency_hz", "simulated_dbsm", "measured_dbsm"]);
    for r in &rep.fit {
        t.push(vec![r.frequency_hz, to_db(r.simulated_m2), to_db(r.measured_m2)]);
    }
    let mhz: Vec<f64> = rep.fit.iter().map(|r| r.frequency_hz / 1e6).collect();
    let chart = Chart {
        title: format!("Retrieval fit, VWC {:.3}", rep.vwc),
        x_label: "frequency (MHz)".into(),
        y_label: "RCS (dBsm)".into(),
        series: vec![
            Series {
                label: "simulated".into(),
                points: mhz.iter().copied().zip(t.column("simulated_dbsm")?).collect(),
            },
            Series {
                label: "measured".into(),
                points: mhz.iter().copied().zip(t.column("measured_dbsm")?).collect(),
            },
        ],
    };
    Ok(vec![
        out.write(&format!("{stem}.fit.csv"), &t.to_csv())?,
        out.write(&format!("{stem}.fit.svg"), &render(&chart))?,
    ])
}

/// Chart of columns `ys` against column `x` of a CSV table.
pub fn plot_table(file: &Path, x: &str, ys: &[String], out: &OutputDir) -> Result<PathBuf> {
    let t = Table::load(file)?;
    let xs = t.column(x)?;
    let series = ys
        .iter()
        .map(|y| {
            Ok(Series {
                label: y.clone(),
                points: xs.iter().copied().zip(t.column(y)?).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let stem = stem_of(file, &[".csv"])?;
    let chart = Chart {
        title: stem.clone(),
        x_label: x.into(),
        y_label: ys.join(", "),
        series,
    };
    out.write(&format!("{stem}.svg"), &render(&chart))
}
