//! Sensitivity sweeps: repeat the retrieval while varying one modeling
//! choice and tabulate the resulting moisture.

use serde::Serialize;

use super::{retrieve, SearchConfig};
use crate::canopy::CanopyDescriptor;
use crate::em::SoilMoisture;
use crate::error::Result;
use crate::ground::{RcsSpectrum, SoilDescriptor, ViewGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamwidthRow {
    /// rad.
    pub effective_beamwidth: f64,
    pub vwc: f64,
    pub vwc_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandRow {
    /// Hz.
    pub low: f64,
    /// Hz.
    pub high: f64,
    pub frequencies_used: usize,
    pub vwc: f64,
    pub vwc_error: f64,
    pub soil_at_boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AltitudeRow {
    /// m.
    pub altitude: f64,
    pub vwc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AblationRow {
    pub canopy_modeling: bool,
    pub vwc: f64,
    pub vwc_error: f64,
}

/// Retrieval error as a function of the assumed effective beamwidth.
pub fn sweep_effective_beamwidth(
    measured: &RcsSpectrum,
    canopy: &CanopyDescriptor,
    soil_template: &SoilDescriptor,
    view: &ViewGeometry,
    cfg: &SearchConfig,
    beamwidths: &[f64],
    truth: SoilMoisture,
) -> Result<Vec<BeamwidthRow>> {
    beamwidths
        .iter()
        .map(|&theta| {
            let v = view.with_effective_beamwidth(theta);
            let r = retrieve(measured, canopy, soil_template, &v, cfg)?;
            Ok(BeamwidthRow {
                effective_beamwidth: theta,
                vwc: r.vwc.value(),
                vwc_error: (r.vwc.value() - truth.value()).abs(),
            })
        })
        .collect()
}

/// Retrieval error per frequency sub-band.
pub fn sweep_bandwidth(
    measured: &RcsSpectrum,
    canopy: &CanopyDescriptor,
    soil_template: &SoilDescriptor,
    view: &ViewGeometry,
    cfg: &SearchConfig,
    bands: &[(f64, f64)],
    truth: SoilMoisture,
) -> Result<Vec<BandRow>> {
    bands
        .iter()
        .map(|&(low, high)| {
            let c = cfg.clone().with_sub_band(low, high);
            let r = retrieve(measured, canopy, soil_template, view, &c)?;
            Ok(BandRow {
                low,
                high,
                frequencies_used: r.diagnostics.frequencies_used,
                vwc: r.vwc.value(),
                vwc_error: (r.vwc.value() - truth.value()).abs(),
                soil_at_boundary: r.diagnostics.soil_at_boundary,
            })
        })
        .collect()
}

/// Retrieved moisture for the same ground seen from several altitudes; each
/// spectrum is paired with the view it was measured from.
pub fn sweep_altitude(
    scenes: &[(ViewGeometry, RcsSpectrum)],
    canopy: &CanopyDescriptor,
    soil_template: &SoilDescriptor,
    cfg: &SearchConfig,
) -> Result<Vec<AltitudeRow>> {
    scenes
        .iter()
        .map(|(view, measured)| {
            let r = retrieve(measured, canopy, soil_template, view, cfg)?;
            Ok(AltitudeRow {
                altitude: view.altitude,
                vwc: r.vwc.value(),
            })
        })
        .collect()
}

/// Retrieval with and without the canopy term.
pub fn sweep_canopy_ablation(
    measured: &RcsSpectrum,
    canopy: &CanopyDescriptor,
    soil_template: &SoilDescriptor,
    view: &ViewGeometry,
    cfg: &SearchConfig,
    truth: SoilMoisture,
) -> Result<Vec<AblationRow>> {
    [true, false]
        .iter()
        .map(|&on| {
            let mut c = cfg.clone();
            c.canopy_modeling = on;
            let r = retrieve(measured, canopy, soil_template, view, &c)?;
            Ok(AblationRow {
                canopy_modeling: on,
                vwc: r.vwc.value(),
                vwc_error: (r.vwc.value() - truth.value()).abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::{topp_permittivity, ComplexPermittivity, FrequencyGrid};
    use crate::ground::{effective_area, scene_rcs};

    fn scene(view: &ViewGeometry, canopy: &CanopyDescriptor) -> (RcsSpectrum, SoilMoisture) {
        let vwc = SoilMoisture::new(0.18).unwrap();
        let eps = topp_permittivity(vwc).unwrap();
        let soil = SoilDescriptor::new(ComplexPermittivity::with_loss_tangent(eps, 0.15).unwrap());
        let grid = FrequencyGrid::linspace(2e8, 9e8, 71).unwrap();
        (scene_rcs(canopy, &soil, view, &grid).unwrap(), vwc)
    }

    fn corn() -> CanopyDescriptor {
        CanopyDescriptor::typical_corn(ComplexPermittivity::with_loss_tangent(20.0, 0.3).unwrap())
    }

    fn template() -> SoilDescriptor {
        SoilDescriptor::new(ComplexPermittivity::VACUUM)
    }

    #[test]
    fn beamwidth_curve_bottoms_out_at_the_generating_value() {
        let view = ViewGeometry::new(6.0);
        let (m, vwc) = scene(&view, &corn());
        let thetas: Vec<f64> = (2..=40).map(|k| (0.25 * k as f64).to_radians()).collect();
        let rows =
            sweep_effective_beamwidth(&m, &corn(), &template(), &view, &SearchConfig::default(), &thetas, vwc)
                .unwrap();
        assert!(rows.iter().all(|r| r.vwc_error.is_finite()));
        let best = rows
            .iter()
            .min_by(|a, b| a.vwc_error.total_cmp(&b.vwc_error))
            .unwrap();
        assert!((best.effective_beamwidth.to_degrees() - 2.0).abs() <= 0.25);
        // the modeled level peaks at θ = β_c, so growth is monotone only up to there
        let tail: Vec<f64> = rows
            .iter()
            .filter(|r| (2.0..=4.5).contains(&r.effective_beamwidth.to_degrees()))
            .map(|r| r.vwc_error)
            .collect();
        assert!(tail.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn altitude_rows_agree_and_area_scales() {
        let a = ViewGeometry::new(6.0);
        let b = ViewGeometry::new(12.0);
        assert!((effective_area(&b) / effective_area(&a) - 4.0).abs() < 1e-12);
        let scenes = [(a, scene(&a, &corn()).0), (b, scene(&b, &corn()).0)];
        let rows = sweep_altitude(&scenes, &corn(), &template(), &SearchConfig::default()).unwrap();
        assert!((rows[0].vwc - rows[1].vwc).abs() < 0.015);
    }

    #[test]
    fn ablation_reports_both_modes() {
        let view = ViewGeometry::new(6.0);
        let (m, vwc) = scene(&view, &corn());
        let rows = sweep_canopy_ablation(&m, &corn(), &template(), &view, &SearchConfig::default(), vwc).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[1].vwc_error >= rows[0].vwc_error);
    }

    #[test]
    fn full_band_is_no_worse_than_top_band() {
        let view = ViewGeometry::new(6.0);
        let (m, vwc) = scene(&view, &corn());
        let rows = sweep_bandwidth(
            &m,
            &corn(),
            &template(),
            &view,
            &SearchConfig::default(),
            &[(2e8, 9e8), (8e8, 9e8)],
            vwc,
        )
        .unwrap();
        assert!(rows[0].vwc_error <= rows[1].vwc_error);
        assert_eq!(rows[0].frequencies_used, 71);
    }
}
