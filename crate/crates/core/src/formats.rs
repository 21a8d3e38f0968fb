//! Plain-text file formats.
//!
//! All numbers are written with Rust's shortest round-trip formatting, so a
//! write followed by a read reproduces every value bit for bit. Comment
//! lines start with `#`; metadata comments have the form `# key=value`.
//!
//! A-scan:
//!
//! ```text
//! # sample_rate_hz=14000000000
//! # altitude_m=6
//! # location=plot-3
//! 0.0012
//! -0.0031
//! ```
//!
//! Calibration factor:
//!
//! ```text
//! # plate_side_m=0.9
//! # reference_ranges_m=6,6.5,7
//! # scan_count=3
//! # valid_band_hz=200000000,900000000
//! frequency_hz,c_value
//! 200000000,0.0153
//! ```
//!
//! RCS spectrum (the metadata lines are optional):
//!
//! ```text
//! # altitude_m=6
//! # location=plot-3
//! frequency_hz,rcs_m2
//! 200000000,1.52
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::em::FrequencyGrid;
use crate::error::{Error, Result};
use crate::ground::RcsSpectrum;
use crate::radar::{AScan, CalibrationFactor};

pub const CALIBRATION_HEADER: &str = "frequency_hz,c_value";
pub const RCS_HEADER: &str = "frequency_hz,rcs_m2";

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: String::new(),
        line,
        message: message.into(),
    }
}

/// Attaches `path` to a parse error produced by one of the `parse_*`
/// functions.
pub fn with_path(err: Error, path: &Path) -> Error {
    match err {
        Error::Parse { line, message, .. } => Error::Parse {
            path: path.display().to_string(),
            line,
            message,
        },
        other => other,
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn number(text: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| parse_error(line, format!("{what}: cannot parse {:?} as a number", text.trim())))?;
    if !v.is_finite() {
        return Err(parse_error(line, format!("{what}: {v} is not finite")));
    }
    Ok(v)
}

fn number_list(text: &str, line: usize, what: &str) -> Result<Vec<f64>> {
    text.split(',').map(|t| number(t, line, what)).collect()
}

/// Splits `# key=value`; `None` for plain comments.
fn metadata(line: &str) -> Option<(&str, &str)> {
    let body = line.strip_prefix('#')?.trim();
    let (k, v) = body.split_once('=')?;
    Some((k.trim(), v.trim()))
}

pub fn format_ascan(scan: &AScan) -> String {
    let mut out = String::with_capacity(scan.len() * 12 + 80);
    let _ = writeln!(out, "# sample_rate_hz={}", scan.sample_rate);
    let _ = writeln!(out, "# altitude_m={}", scan.altitude_est);
    let _ = writeln!(out, "# location={}", scan.location);
    for s in &scan.samples {
        let _ = writeln!(out, "{s}");
    }
    out
}

pub fn parse_ascan(text: &str) -> Result<AScan> {
    let mut sample_rate = None;
    let mut altitude = None;
    let mut location = String::new();
    let mut samples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            match metadata(line) {
                Some(("sample_rate_hz", v)) => sample_rate = Some(number(v, n, "sample_rate_hz")?),
                Some(("altitude_m", v)) => altitude = Some(number(v, n, "altitude_m")?),
                Some(("location", v)) => location = v.to_string(),
                _ => {}
            }
            continue;
        }
        samples.push(number(line, n, "sample")?);
    }
    let sample_rate = sample_rate.ok_or_else(|| parse_error(0, "missing `# sample_rate_hz=` header"))?;
    let altitude = altitude.ok_or_else(|| parse_error(0, "missing `# altitude_m=` header"))?;
    AScan::new(samples, sample_rate, altitude, location)
}

pub fn load_ascan(path: &Path) -> Result<AScan> {
    parse_ascan(&read_text(path)?).map_err(|e| with_path(e, path))
}

pub fn format_calibration(cal: &CalibrationFactor) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# plate_side_m={}", cal.plate_side);
    let ranges: Vec<String> = cal.reference_ranges.iter().map(|r| r.to_string()).collect();
    let _ = writeln!(out, "# reference_ranges_m={}", ranges.join(","));
    let _ = writeln!(out, "# scan_count={}", cal.scan_count);
    let _ = writeln!(out, "# valid_band_hz={},{}", cal.valid_band.0, cal.valid_band.1);
    let _ = writeln!(out, "{CALIBRATION_HEADER}");
    for (f, c) in cal.grid.iter().zip(&cal.values) {
        let _ = writeln!(out, "{f},{c}");
    }
    out
}

/// Rows of a two-column CSV body after its header line.
fn parse_table(
    text: &str,
    header: &str,
    mut on_meta: impl FnMut(&str, &str, usize) -> Result<()>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut seen_header = false;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if let Some((k, v)) = metadata(line) {
                on_meta(k, v, n)?;
            }
            continue;
        }
        if !seen_header {
            if line != header {
                return Err(parse_error(n, format!("expected header `{header}`, found {line:?}")));
            }
            seen_header = true;
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| parse_error(n, format!("expected two comma-separated values, found {line:?}")))?;
        if b.contains(',') {
            return Err(parse_error(n, format!("expected two comma-separated values, found {line:?}")));
        }
        xs.push(number(a, n, "frequency")?);
        ys.push(number(b, n, "value")?);
    }
    if !seen_header {
        return Err(parse_error(0, format!("missing header `{header}`")));
    }
    if xs.is_empty() {
        return Err(parse_error(0, "no data rows"));
    }
    Ok((xs, ys))
}

pub fn parse_calibration(text: &str) -> Result<CalibrationFactor> {
    let mut plate_side = None;
    let mut ranges = None;
    let mut count = None;
    let mut band = None;
    let (freqs, values) = parse_table(text, CALIBRATION_HEADER, |k, v, n| {
        match k {
            "plate_side_m" => plate_side = Some(number(v, n, k)?),
            "reference_ranges_m" => ranges = Some(number_list(v, n, k)?),
            "scan_count" => {
                count = Some(
                    v.parse::<usize>()
                        .map_err(|_| parse_error(n, format!("scan_count: cannot parse {v:?}")))?,
                )
            }
            "valid_band_hz" => {
                let b = number_list(v, n, k)?;
                if b.len() != 2 {
                    return Err(parse_error(n, "valid_band_hz needs two values"));
                }
                band = Some((b[0], b[1]));
            }
            _ => {}
        }
        Ok(())
    })?;
    let missing = |key: &str| parse_error(0, format!("missing `# {key}=` header"));
    let cal = CalibrationFactor {
        grid: FrequencyGrid::from_frequencies(freqs)?,
        values,
        valid_band: band.ok_or_else(|| missing("valid_band_hz"))?,
        plate_side: plate_side.ok_or_else(|| missing("plate_side_m"))?,
        reference_ranges: ranges.ok_or_else(|| missing("reference_ranges_m"))?,
        scan_count: count.ok_or_else(|| missing("scan_count"))?,
    };
    cal.validate()?;
    Ok(cal)
}

pub fn load_calibration(path: &Path) -> Result<CalibrationFactor> {
    parse_calibration(&read_text(path)?).map_err(|e| with_path(e, path))
}

/// An RCS spectrum with the optional acquisition metadata carried in its
/// file.
#[derive(Debug, Clone, PartialEq)]
pub struct RcsRecord {
    pub spectrum: RcsSpectrum,
    /// m.
    pub altitude: Option<f64>,
    pub location: Option<String>,
}

pub fn format_rcs(record: &RcsRecord) -> String {
    let mut out = String::new();
    if let Some(a) = record.altitude {
        let _ = writeln!(out, "# altitude_m={a}");
    }
    if let Some(l) = &record.location {
        let _ = writeln!(out, "# location={l}");
    }
    let _ = writeln!(out, "{RCS_HEADER}");
    for (f, v) in record.spectrum.iter() {
        let _ = writeln!(out, "{f},{v}");
    }
    out
}

pub fn parse_rcs(text: &str) -> Result<RcsRecord> {
    let mut altitude = None;
    let mut location = None;
    let (freqs, values) = parse_table(text, RCS_HEADER, |k, v, n| {
        match k {
            "altitude_m" => altitude = Some(number(v, n, k)?),
            "location" => location = Some(v.to_string()),
            _ => {}
        }
        Ok(())
    })?;
    Ok(RcsRecord {
        spectrum: RcsSpectrum::new(FrequencyGrid::from_frequencies(freqs)?, values)?,
        altitude,
        location,
    })
}

pub fn load_rcs(path: &Path) -> Result<RcsRecord> {
    parse_rcs(&read_text(path)?).map_err(|e| with_path(e, path))
}
