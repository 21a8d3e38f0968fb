//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as ProptestConfig, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use soilscan_cli::config::RunConfig;
use soilscan_cli::output::OutputDir;
use soilscan_cli::pipeline;
use soilscan_cli::simulate::{simulate, GroundScene, PlateScene, SceneSpec};
use soilscan_core::canopy::{
    disk_forward_amplitude, cylinder_amplitude, orientation_average_im_with, CanopyDescriptor, CylinderGeometry,
    DiskGeometry, Orientation, OrientationDistribution,
};
use soilscan_core::em::{
    fresnel_reflectivity, topp_permittivity, topp_vwc, ComplexPermittivity, FrequencyGrid, SoilMoisture,
};
use soilscan_core::ground::{
    coherent_rcs, effective_area, incoherent_rcs, scene_rcs, to_db, RcsSpectrum, SoilDescriptor, ViewGeometry,
};
use soilscan_core::radar::{isolate_ground_return, plate_rcs, GateConfig};
use soilscan_core::retrieval::{
    apply_multiplicative_noise, sweep_bandwidth, sweep_canopy_ablation, sweep_effective_beamwidth, AxisGrid,
    Retriever, SearchConfig,
};
use soilscan_core::scene::RadarSimulator;
use soilscan_lidar::synth::{generate_field, FieldSpec};
use soilscan_lidar::{estimate_structure, AllometryEntry, LaiForm, StructureConfig, Tile};

type Check = Result<(bool, String), String>;

fn lossy(re: f64, tan: f64) -> ComplexPermittivity {
    ComplexPermittivity::with_loss_tangent(re, tan).unwrap()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// A scratch directory holding one plate calibration, through which ground
/// scenes are simulated, gated and calibrated exactly as the command line
/// does it.
struct Lab {
    _dir: tempfile::TempDir,
    root: PathBuf,
    cfg: RunConfig,
    out: OutputDir,
    calibration: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Crop {
    Bare,
    Corn,
    Soybean,
}

impl Crop {
    fn keyword(self) -> &'static str {
        match self {
            Crop::Bare => "bare",
            Crop::Corn => "corn",
            Crop::Soybean => "soybean",
        }
    }
}

impl Lab {
    fn new() -> Result<Self, String> {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let root = dir.path().to_path_buf();
        let cfg = RunConfig {
            seed: 2024,
            ..RunConfig::default()
        };
        let out = OutputDir::create(root.join("out")).map_err(|e| e.message)?;
        let plates = SceneSpec::Plate(PlateScene {
            name: "plate".into(),
            side: 0.9,
            ranges: linspace(6.0, 9.0, 7),
            noise_rms: 0.0,
        });
        let sim = simulate(&cfg, &plates, &root, &out).map_err(|e| e.message)?;
        let calibration = pipeline::calibrate(&cfg, &sim.files, 0.9, None, &out, "calibration.csv").map_err(|e| e.message)?;
        Ok(Lab {
            _dir: dir,
            root,
            cfg,
            out,
            calibration,
        })
    }

    fn with_seed(&self, seed: u64) -> RunConfig {
        RunConfig { seed, ..self.cfg.clone() }
    }

    /// Scene specification for `crop` over soil at `vwc`.
    fn scene(name: &str, vwc: f64, crop: Crop, canopy_eps: f64, altitudes: &[f64]) -> GroundScene {
        GroundScene {
            name: name.into(),
            vwc,
            soil_loss_tangent: 0.15,
            canopy: crop.keyword().into(),
            canopy_permittivity: Some(canopy_eps),
            altitudes: altitudes.to_vec(),
            noise_rms: 0.0,
            roughness_height: None,
            effective_beamwidth_deg: None,
        }
    }

    /// Simulated scans turned into RCS files; returns the spectrum files.
    fn measure(&self, scene: GroundScene, seed: u64) -> Result<Vec<PathBuf>, String> {
        let sim = simulate(&self.with_seed(seed), &SceneSpec::Ground(scene), &self.root, &self.out).map_err(|e| e.message)?;
        pipeline::rcs(&self.cfg, &sim.files, &self.calibration, None, &self.out).map_err(|e| e.message)
    }

    fn spectrum(&self, path: &Path) -> Result<(RcsSpectrum, f64), String> {
        pipeline::load_spectrum(path, None).map_err(|e| e.message)
    }

    fn canopy(&self, crop: Crop) -> CanopyDescriptor {
        self.cfg.canopy(Some(crop.keyword())).unwrap()
    }

    fn soil_template(&self) -> SoilDescriptor {
        self.cfg.soil_template()
    }
}

fn criterion_1(lab: &Lab) -> Check {
    let probe = SceneSpec::Plate(PlateScene {
        name: "probe".into(),
        side: 0.9,
        ranges: vec![7.3],
        noise_rms: 0.0,
    });
    let sim = simulate(&lab.with_seed(99), &probe, &lab.root, &lab.out).map_err(|e| e.message)?;
    let files = pipeline::rcs(&lab.cfg, &sim.files, &lab.calibration, None, &lab.out).map_err(|e| e.message)?;
    let (s, _) = lab.spectrum(&files[0])?;
    let worst = s
        .iter()
        .filter(|(f, _)| (300e6..=800e6).contains(f))
        .map(|(f, v)| (to_db(v) - to_db(plate_rcs(0.9, f))).abs())
        .fold(0.0, f64::max);
    Ok((worst <= 1.0, format!("plate at 7.3 m, worst deviation {worst:.4} dB over 300-800 MHz (limit 1 dB)")))
}

fn criterion_2() -> Check {
    let view = ViewGeometry::new(6.0);
    let area = effective_area(&view);
    let mut margin = f64::INFINITY;
    for vwc in linspace(0.03, 0.45, 15) {
        let eps = topp_permittivity(SoilMoisture::new(vwc).unwrap()).unwrap();
        let soil = SoilDescriptor::new(lossy(eps, 0.15));
        // every angle strictly below 2 degrees on a 0.01 degree grid
        for k in 0..200 {
            let theta = (k as f64 * 0.01).to_radians();
            let coh = coherent_rcs(&soil, 550e6, theta, area);
            let inc = incoherent_rcs(&soil, 550e6, theta, area).map_err(|e| e.to_string())?;
            margin = margin.min(to_db(coh) - to_db(inc));
        }
    }
    Ok((margin >= 10.0, format!("smallest coherent minus incoherent below 2 deg: {margin:.2} dB (need >= 10 dB)")))
}

fn criterion_3(lab: &Lab) -> Check {
    let mut scenes = Vec::new();
    for (crop, n) in [(Crop::Bare, 7), (Crop::Corn, 7), (Crop::Soybean, 6)] {
        for (k, vwc) in linspace(0.03, 0.26, n).into_iter().enumerate() {
            let alt = [6.0, 7.0, 8.0][k % 3];
            scenes.push((crop, vwc, alt));
        }
    }
    let step = lab.cfg.search.soil_grid.step();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    let mut worst_eps = 0.0f64;
    let mut worst_vwc = 0.0f64;
    let mut failures = Vec::new();
    pool.install(|| -> Result<(), String> {
        for (i, &(crop, vwc, alt)) in scenes.iter().enumerate() {
            let name = format!("loop{i}");
            let spectra = lab.measure(Lab::scene(&name, vwc, crop, 22.0, &[alt]), 100 + i as u64)?;
            let reports = pipeline::retrieve(&lab.cfg, &spectra, &lab.canopy(crop), None, &lab.out).map_err(|e| e.message)?;
            let rep = &reports[0].1;
            let truth = topp_permittivity(SoilMoisture::new(vwc).unwrap()).unwrap();
            let d = (rep.soil_permittivity.real_part() - truth).abs();
            worst_eps = worst_eps.max(d);
            worst_vwc = worst_vwc.max((rep.vwc - vwc).abs());
            if d > step {
                failures.push(format!("{} vwc {vwc:.3}", crop.keyword()));
            }
        }
        Ok(())
    })?;
    Ok((
        failures.is_empty(),
        format!(
            "20 scenes, worst permittivity error {worst_eps:.4} vs grid step {step:.4}, worst VWC error {worst_vwc:.4}{}",
            if failures.is_empty() { String::new() } else { format!("; off-grid: {}", failures.join(", ")) }
        ),
    ))
}

fn criterion_4() -> Check {
    let grid = FrequencyGrid::linspace(200e6, 900e6, 100).unwrap();
    let view = ViewGeometry::new(6.0);
    let cfg = SearchConfig::default();
    let template = SoilDescriptor::new(ComplexPermittivity::VACUUM);
    let eps_c = lossy(22.0, 0.3);
    let mut per_scene = Vec::new();
    for (label, canopy) in [
        ("corn", CanopyDescriptor::typical_corn(eps_c)),
        ("soybean", CanopyDescriptor::typical_soybean(eps_c)),
    ] {
        let ret = Retriever::new(grid.frequencies(), &canopy, &template, &view, &cfg).map_err(|e| e.to_string())?;
        for (k, vwc) in linspace(0.03, 0.26, 6).into_iter().enumerate() {
            let eps = topp_permittivity(SoilMoisture::new(vwc).unwrap()).unwrap();
            let clean = scene_rcs(&canopy, &SoilDescriptor::new(lossy(eps, 0.15)), &view, &grid).map_err(|e| e.to_string())?;
            let errors: Vec<f64> = (0..100u64)
                .into_par_iter()
                .map(|draw| {
                    let mut rng = ChaCha8Rng::seed_from_u64(1_000 * k as u64 + draw + if label == "corn" { 0 } else { 500 });
                    let m = apply_multiplicative_noise(&clean, 1.0, &mut rng).unwrap();
                    (ret.retrieve(&m).unwrap().vwc.value() - vwc).abs()
                })
                .collect();
            per_scene.push((label, vwc, errors.iter().sum::<f64>() / errors.len() as f64));
        }
    }
    let mean = per_scene.iter().map(|s| s.2).sum::<f64>() / per_scene.len() as f64;
    let worst = per_scene.iter().copied().max_by(|a, b| a.2.total_cmp(&b.2)).unwrap();
    Ok((
        mean <= 0.02,
        format!(
            "mean |VWC error| {:.2}% over {} canopied scenes x 100 draws (limit 2%); worst scene {} at {:.0}% VWC: {:.2}%",
            100.0 * mean,
            per_scene.len(),
            worst.0,
            100.0 * worst.1,
            100.0 * worst.2
        ),
    ))
}

fn criterion_5(lab: &Lab) -> Check {
    let mut worst = 0.0f64;
    let mut n = 0;
    for (i, crop) in [Crop::Bare, Crop::Corn, Crop::Soybean].into_iter().enumerate() {
        for (j, vwc) in [0.06, 0.15, 0.24].into_iter().enumerate() {
            let name = format!("alt{i}{j}");
            let spectra = lab.measure(Lab::scene(&name, vwc, crop, 22.0, &[6.0, 8.0]), 300 + 10 * i as u64 + j as u64)?;
            let reports = pipeline::retrieve(&lab.cfg, &spectra, &lab.canopy(crop), None, &lab.out).map_err(|e| e.message)?;
            worst = worst.max((reports[0].1.vwc - reports[1].1.vwc).abs());
            n += 1;
        }
    }
    Ok((worst < 0.015, format!("{n} scenes at 6 m and 8 m, largest VWC difference {:.3}% (limit 1.5%)", 100.0 * worst)))
}

fn criterion_6(lab: &Lab) -> Check {
    let full = (lab.cfg.band.low_hz, lab.cfg.band.high_hz);
    let top = (lab.cfg.band.high_hz - 100e6, lab.cfg.band.high_hz);
    let mut canopied_ok = true;
    let mut canopied = Vec::new();
    let mut bare_gap = 0.0f64;
    for (i, crop) in [Crop::Bare, Crop::Corn, Crop::Soybean].into_iter().enumerate() {
        for (j, vwc) in [0.06, 0.15, 0.24].into_iter().enumerate() {
            let name = format!("band{i}{j}");
            let spectra = lab.measure(Lab::scene(&name, vwc, crop, 22.0, &[6.0]), 400 + 10 * i as u64 + j as u64)?;
            let (m, alt) = lab.spectrum(&spectra[0])?;
            let rows = sweep_bandwidth(
                &m,
                &lab.canopy(crop),
                &lab.soil_template(),
                &lab.cfg.view.at(alt),
                &lab.cfg.search,
                &[full, top],
                SoilMoisture::new(vwc).unwrap(),
            )
            .map_err(|e| e.to_string())?;
            let (e_full, e_top) = (rows[0].vwc_error, rows[1].vwc_error);
            if crop == Crop::Bare {
                bare_gap = bare_gap.max((e_full - e_top).abs());
            } else {
                canopied_ok &= e_full <= e_top;
                canopied.push(format!("{:.2}/{:.2}", 100.0 * e_full, 100.0 * e_top));
            }
        }
    }
    Ok((
        canopied_ok && bare_gap < 0.005,
        format!(
            "canopied full/top-100-MHz errors (%): {}; largest bare gap {:.3}% (limit 0.5%)",
            canopied.join(" "),
            100.0 * bare_gap
        ),
    ))
}

fn criterion_7(lab: &Lab) -> Check {
    // mature corn with wet, dense foliage over moist soil
    let spectra = lab.measure(Lab::scene("dense", 0.2, Crop::Corn, 35.0, &[6.0]), 500)?;
    let (m, alt) = lab.spectrum(&spectra[0])?;
    let rows = sweep_canopy_ablation(
        &m,
        &lab.canopy(Crop::Corn),
        &lab.soil_template(),
        &lab.cfg.view.at(alt),
        &lab.cfg.search,
        SoilMoisture::new(0.2).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    let (on, off) = (rows[0].vwc_error, rows[1].vwc_error);
    Ok((
        off >= 2.0 * on && off > 0.0,
        format!("VWC error {:.3}% with the canopy term, {:.3}% without (need at least 2x)", 100.0 * on, 100.0 * off),
    ))
}

fn criterion_8(lab: &Lab) -> Check {
    let degs: Vec<f64> = (0..=36).map(|k| 0.5 + 0.125 * k as f64).collect();
    let rads: Vec<f64> = degs.iter().map(|d| d.to_radians()).collect();
    let mut minima = Vec::new();
    for (i, crop) in [Crop::Corn, Crop::Soybean, Crop::Bare].into_iter().enumerate() {
        let spectra = lab.measure(Lab::scene(&format!("beam{i}"), 0.18, crop, 22.0, &[6.0]), 600 + i as u64)?;
        let (m, alt) = lab.spectrum(&spectra[0])?;
        let rows = sweep_effective_beamwidth(
            &m,
            &lab.canopy(crop),
            &lab.soil_template(),
            &lab.cfg.view.at(alt),
            &lab.cfg.search,
            &rads,
            SoilMoisture::new(0.18).unwrap(),
        )
        .map_err(|e| e.to_string())?;
        let best = rows
            .iter()
            .min_by(|a, b| a.vwc_error.total_cmp(&b.vwc_error))
            .unwrap()
            .effective_beamwidth
            .to_degrees();
        minima.push((crop.keyword(), best));
    }
    let ok = minima.iter().all(|m| (m.1 - 2.0).abs() <= 0.25);
    let shown: Vec<String> = minima.iter().map(|(c, b)| format!("{c} {b:.3} deg")).collect();
    Ok((ok, format!("error minimum for scenes made at 2 deg: {} (tolerance 0.25 deg)", shown.join(", "))))
}

fn criterion_9() -> Check {
    let size = 10.0;
    let tile = Tile::square(0.0, 0.0, size).unwrap();
    let allometry = AllometryEntry {
        crop_kind: soilscan_core::canopy::CropKind::Corn,
        leaf_area: 0.05,
        leaf_width: 0.08,
        stalk_radius: 0.012,
    };
    let cases = [
        ("corn", FieldSpec { tile, ..FieldSpec::corn(7) }),
        ("soybean", FieldSpec { tile, ..FieldSpec::soybean(8) }),
        ("random leaves", FieldSpec { tile, ..FieldSpec::random_disks(3.0, 9) }),
    ];
    let results: Vec<Result<(String, bool), String>> = cases
        .par_iter()
        .map(|(label, spec)| {
            let field = generate_field(spec).map_err(|e| e.to_string())?;
            let crop = match spec.layout {
                soilscan_lidar::synth::Layout::Rows(c) => c,
                soilscan_lidar::synth::Layout::RandomDisks => soilscan_core::canopy::CropKind::Corn,
            };
            let entry = AllometryEntry { crop_kind: crop, ..allometry };
            let est = estimate_structure(&field.cloud, &spec.tile, crop, &entry, &StructureConfig::default())
                .map_err(|e| e.to_string())?;
            let t = &field.truth;
            let rel = |a: f64, b: f64| (a - b).abs() / b;
            let mut ok = est.lai_form == LaiForm::Integrated && rel(est.lai, t.lai) <= 0.15;
            let mut line = format!("{label}: LAI {:+.1}%", 100.0 * (est.lai / t.lai - 1.0));
            if matches!(spec.layout, soilscan_lidar::synth::Layout::Rows(_)) {
                let spacing = est.row_spacing.unwrap_or(f64::NAN);
                ok &= rel(spacing, t.row_spacing) <= 0.05;
                ok &= rel(est.height, t.canopy_height) <= 0.05;
                ok &= rel(est.plant_density, t.plant_density) <= 0.15;
                line.push_str(&format!(
                    ", spacing {:+.1}%, height {:+.1}%, density {:+.1}%",
                    100.0 * (spacing / t.row_spacing - 1.0),
                    100.0 * (est.height / t.canopy_height - 1.0),
                    100.0 * (est.plant_density / t.plant_density - 1.0)
                ));
            }
            Ok((line, ok))
        })
        .collect();
    let mut ok = true;
    let mut lines = Vec::new();
    for r in results {
        let (line, pass) = r?;
        ok &= pass;
        lines.push(line);
    }
    Ok((
        ok,
        format!("10 m tiles at 40000 pulses/m2; {} (limits 5%, 5%, 15%, 15%)", lines.join("; ")),
    ))
}

/// Runs one property with proptest; returns a failure description.
fn property<S: Strategy>(
    name: &str,
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Option<String> {
    let mut runner = TestRunner::new(ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    });
    runner.run(&strategy, test).err().map(|e| format!("{name}: {e}"))
}

fn criterion_10() -> Check {
    let mut failures = Vec::new();
    let mut count = 0;
    let mut check = |r: Option<String>| {
        count += 1;
        failures.extend(r);
    };

    check(property(
        "forward amplitude has positive imaginary part",
        128,
        (2.0f64..40.0, 0.01f64..1.0, 2e8f64..9e8, 0.0f64..std::f64::consts::TAU, 0.0f64..std::f64::consts::FRAC_PI_2, 0.0f64..0.5),
        |(re, tan, f, psi, delta, theta)| {
            let eps = lossy(re, tan);
            let o = Orientation::new(psi, delta);
            let stalk = CylinderGeometry::new(0.012, 2.0, eps).unwrap();
            let leaf = DiskGeometry::new(0.04, 3e-4, eps).unwrap();
            prop_assert!(cylinder_amplitude(&stalk, f, theta, o).unwrap().im > 0.0);
            prop_assert!(disk_forward_amplitude(&leaf, f, theta, o).unwrap().im > 0.0);
            Ok(())
        },
    ));
    check(property("fresnel reflectivity lies in [0, 1]", 256, (1.0f64..81.0, 0.0f64..40.0), |(re, im)| {
        let g = fresnel_reflectivity(ComplexPermittivity::new(re, im).unwrap());
        prop_assert!((0.0..=1.0).contains(&g));
        Ok(())
    }));
    check(property("fresnel reflectivity grows with permittivity", 256, (1.0f64..81.0, 1.0f64..81.0), |(a, b)| {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-9);
        let g = |e| fresnel_reflectivity(ComplexPermittivity::lossless(e).unwrap());
        prop_assert!(g(hi) > g(lo));
        Ok(())
    }));
    check(property("topp round trip", 256, 0.02f64..0.5, |vwc| {
        let eps = topp_permittivity(SoilMoisture::new(vwc).unwrap()).unwrap();
        prop_assert!((topp_vwc(eps).value() - vwc).abs() < 1e-6);
        Ok(())
    }));
    check(property("scene RCS scales with altitude squared", 64, (3.0f64..20.0, 3.0f64..20.0, 3.0f64..30.0), |(r1, r2, eps)| {
        let grid = FrequencyGrid::linspace(2e8, 9e8, 36).unwrap();
        let canopy = CanopyDescriptor::typical_corn(lossy(20.0, 0.3));
        let soil = SoilDescriptor::new(lossy(eps, 0.15));
        let a = scene_rcs(&canopy, &soil, &ViewGeometry::new(r1), &grid).unwrap();
        let b = scene_rcs(&canopy, &soil, &ViewGeometry::new(r2), &grid).unwrap();
        let expect = (r2 / r1).powi(2);
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((y / x - expect).abs() < 1e-9 * expect);
        }
        Ok(())
    }));
    check(property("argmin ignores a common spectrum scale", 24, (3.0f64..35.0, 5.0f64..35.0, 3.0f64..20.0, 0u64..1000), |(es, ec, r2, seed)| {
        let cfg = SearchConfig {
            soil_grid: AxisGrid::new(2.0, 40.0, 60).unwrap(),
            canopy_grid: AxisGrid::new(1.5, 40.0, 40).unwrap(),
            ..SearchConfig::default()
        };
        let grid = FrequencyGrid::linspace(2e8, 9e8, 36).unwrap();
        let corn = |e| CanopyDescriptor::typical_corn(lossy(e, 0.3));
        let template = SoilDescriptor::new(ComplexPermittivity::VACUUM);
        let (v1, v2) = (ViewGeometry::new(6.0), ViewGeometry::new(r2));
        let clean = scene_rcs(&corn(ec), &SoilDescriptor::new(lossy(es, 0.15)), &v1, &grid).unwrap();
        let noisy = apply_multiplicative_noise(&clean, 1.0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let scaled = noisy.scaled((r2 / 6.0).powi(2)).unwrap();
        let a = Retriever::new(grid.frequencies(), &corn(20.0), &template, &v1, &cfg).unwrap().retrieve(&noisy).unwrap();
        let rb = Retriever::new(grid.frequencies(), &corn(20.0), &template, &v2, &cfg).unwrap();
        let b = rb.retrieve(&scaled).unwrap();
        let cell = |d: &soilscan_core::retrieval::SearchDiagnostics| (d.soil_index, d.canopy_index);
        if cell(&a.diagnostics) != cell(&b.diagnostics) {
            let p = rb.prepare(&scaled).unwrap();
            let ra = rb.cell_residual(a.diagnostics.soil_index, a.diagnostics.canopy_index, &p);
            let rr = rb.cell_residual(b.diagnostics.soil_index, b.diagnostics.canopy_index, &p);
            prop_assert!((ra - rr).abs() <= 1e-9 * ra);
        }
        Ok(())
    }));
    check(property("gate moves with the trace", 32, (5.0f64..9.0, 1usize..40, 0u64..1000), |(range, shift, seed)| {
        let sim = RadarSimulator { noise_rms: 1e-4, ..RadarSimulator::default() };
        let canopy = CanopyDescriptor::typical_corn(lossy(20.0, 0.3));
        let soil = SoilDescriptor::new(lossy(10.0, 0.15));
        let base = sim
            .ground_scan(&canopy, &soil, &ViewGeometry::new(range), "p", &mut ChaCha8Rng::seed_from_u64(seed))
            .unwrap();
        let g0 = isolate_ground_return(&base, &GateConfig::default()).unwrap();
        let mut shifted = base.clone();
        shifted.samples = std::iter::repeat(0.0).take(shift).chain(base.samples.iter().copied()).collect();
        let g = isolate_ground_return(&shifted, &GateConfig::default()).unwrap();
        prop_assert_eq!(g.start_index, g0.start_index + shift);
        prop_assert_eq!(&g.samples, &g0.samples);
        Ok(())
    }));
    check(property("orientation quadrature refinement changes under 1%", 64, (2.0f64..40.0, 2e8f64..9e8, 0.0f64..0.5), |(re, f, theta)| {
        let leaf = DiskGeometry::new(0.04, 3e-4, lossy(re, 0.3)).unwrap();
        let amp = |o| disk_forward_amplitude(&leaf, f, theta, o);
        let dist = OrientationDistribution::Uniform;
        let coarse = orientation_average_im_with(amp, &dist, 32).unwrap();
        let fine = orientation_average_im_with(amp, &dist, 128).unwrap();
        prop_assert!(((coarse - fine) / fine).abs() < 0.01);
        Ok(())
    }));

    Ok((
        failures.is_empty(),
        if failures.is_empty() {
            format!("{count} property suites hold")
        } else {
            format!("{} of {count} failed: {}", failures.len(), failures.join("; "))
        },
    ))
}

fn criterion_11() -> Check {
    let grid = FrequencyGrid::linspace(200e6, 900e6, 100).unwrap();
    let view = ViewGeometry::new(6.0);
    let canopy = CanopyDescriptor::typical_corn(lossy(22.0, 0.3));
    let eps = topp_permittivity(SoilMoisture::new(0.18).unwrap()).unwrap();
    let m = scene_rcs(&canopy, &SoilDescriptor::new(lossy(eps, 0.15)), &view, &grid).map_err(|e| e.to_string())?;
    let cfg = SearchConfig {
        parallel: false,
        ..SearchConfig::default()
    };
    let start = Instant::now();
    let r = Retriever::new(grid.frequencies(), &canopy, &SoilDescriptor::new(ComplexPermittivity::VACUUM), &view, &cfg)
        .and_then(|ret| ret.retrieve(&m))
        .map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let cells = r.diagnostics.cells_evaluated;
    Ok((
        took < Duration::from_secs(60) && cells == 250_000 && r.diagnostics.frequencies_used == 100,
        format!("{cells} cells x {} bins single-threaded in {:.2} s (limit 60 s)", r.diagnostics.frequencies_used, took.as_secs_f64()),
    ))
}

fn main() {
    // honor `cargo test -- --list` and name filters from the default harness
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }

    type Criterion<'a> = (u32, &'a str, Duration, Box<dyn Fn() -> Check + 'a>);
    let lab = Lab::new();
    let lab = match &lab {
        Ok(l) => Some(l),
        Err(e) => {
            println!("setup failed: {e}");
            None
        }
    };
    let needs_lab = |f: fn(&Lab) -> Check| -> Box<dyn Fn() -> Check + '_> {
        Box::new(move || match lab {
            Some(l) => f(l),
            None => Err("calibration setup failed".into()),
        })
    };
    let criteria: Vec<Criterion> = vec![
        (1, "plate calibration round-trip", Duration::from_secs(10), needs_lab(criterion_1)),
        (2, "coherent dominance below 2 deg", Duration::from_secs(1), Box::new(criterion_2)),
        (3, "end-to-end noiseless inversion", Duration::from_secs(300), needs_lab(criterion_3)),
        (4, "noise robustness", Duration::from_secs(900), Box::new(criterion_4)),
        (5, "altitude consistency", Duration::MAX, needs_lab(criterion_5)),
        (6, "bandwidth ablation direction", Duration::MAX, needs_lab(criterion_6)),
        (7, "canopy ablation direction", Duration::MAX, needs_lab(criterion_7)),
        (8, "effective-beamwidth sweep", Duration::MAX, needs_lab(criterion_8)),
        (9, "lidar suite", Duration::from_secs(120), Box::new(criterion_9)),
        (10, "property suites", Duration::from_secs(120), Box::new(criterion_10)),
        (11, "grid-search runtime budget", Duration::from_secs(60), Box::new(criterion_11)),
    ];

    let mut failed = 0;
    for (n, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (pass, detail) = match outcome {
            Ok((pass, detail)) if took <= budget => (pass, detail),
            Ok((_, detail)) => (false, format!("{detail}; over the {:.0} s budget", budget.as_secs_f64())),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {n:>2} {}: {name}: {detail} [{:.1} s]",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
