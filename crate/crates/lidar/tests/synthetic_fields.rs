//! Structure estimates on ray-cast synthetic crop tiles with known layout.

use soilscan_core::canopy::CropKind;
use soilscan_lidar::density::{plant_density_corn, plant_density_soybean, SoybeanDensityConfig};
use soilscan_lidar::estimate::{allometry_for, default_allometry};
use soilscan_lidar::lai::{LaiConfig, LaiForm};
use soilscan_lidar::synth::{generate_field, FieldSpec, SyntheticField};
use soilscan_lidar::*;

fn rel(estimate: f64, truth: f64) -> f64 {
    (estimate / truth - 1.0).abs()
}

fn estimate(field: &SyntheticField, spec: &FieldSpec, crop: CropKind) -> CanopyStructureEstimate {
    let allometry = allometry_for(&default_allometry(), crop).unwrap();
    estimate_structure(&field.cloud, &spec.tile, crop, &allometry, &StructureConfig::default()).unwrap()
}

fn segmentation(field: &SyntheticField, tile: &Tile) -> (PointCloud, CanopyHeightModel, RowSegmentation) {
    let normalized = normalize_ground(&field.cloud, &Default::default()).unwrap();
    let chm = build_chm(&normalized, tile).unwrap();
    let rows = detect_rows(&chm, &Default::default()).unwrap();
    (normalized, chm, rows)
}

#[test]
fn corn_rows_height_count_and_lai() {
    let spec = FieldSpec::corn(11);
    let field = generate_field(&spec).unwrap();
    let e = estimate(&field, &spec, CropKind::Corn);
    let t = &field.truth;
    assert_eq!(e.row_axis, Some(RowAxis::X));
    assert!(rel(e.row_spacing.unwrap(), t.row_spacing) < 0.05, "{e:?}");
    assert!(rel(e.height, t.canopy_height) < 0.05, "{} vs {}", e.height, t.canopy_height);
    assert!(rel(e.plant_density, t.plant_density) < 0.10, "{} vs {}", e.plant_density, t.plant_density);
    assert!(rel(e.lai, t.lai) < 0.15, "{} vs {}", e.lai, t.lai);
    assert!((e.leaf_density_per_area - e.lai / e.leaf_area).abs() < 1e-9);
}

#[test]
fn row_axis_follows_a_quarter_turn() {
    let spec = FieldSpec::corn(12);
    let field = generate_field(&spec).unwrap();
    let (_, _, rows) = segmentation(&field, &spec.tile);
    let turned = SyntheticField {
        cloud: field.cloud.swapped_axes(),
        truth: field.truth.clone(),
    };
    let (_, _, turned_rows) = segmentation(&turned, &spec.tile);
    assert_eq!(rows.axis, RowAxis::X);
    assert_eq!(turned_rows.axis, RowAxis::Y);
    assert!(rel(turned_rows.spacing, rows.spacing) < 0.01);
    assert!(rel(rows.spacing, 0.76) < 0.05);

    let along_y = FieldSpec {
        row_axis: RowAxis::Y,
        ..FieldSpec::corn(13)
    };
    let field = generate_field(&along_y).unwrap();
    let (_, _, rows) = segmentation(&field, &along_y.tile);
    assert_eq!(rows.axis, RowAxis::Y);
    assert!(rel(rows.spacing, 0.76) < 0.05);
}

#[test]
fn doubling_corn_planting_doubles_the_count() {
    // narrow rows double the stand while the in-row spacing stays above
    // the minimum stem separation; each plant keeps the same foliage
    let count = |row_spacing: f64| {
        let spec = FieldSpec {
            row_spacing,
            leaf_area_index: 3.0 * 0.76 / row_spacing,
            ..FieldSpec::corn(14)
        };
        let field = generate_field(&spec).unwrap();
        let (normalized, _, rows) = segmentation(&field, &spec.tile);
        assert!(rel(rows.spacing, row_spacing) < 0.05);
        let d = plant_density_corn(&normalized, &rows, &spec.tile, &Default::default()).unwrap();
        (d.density, field.truth.plant_density)
    };
    let (wide, wide_truth) = count(0.76);
    let (narrow, narrow_truth) = count(0.38);
    assert!(rel(wide, wide_truth) < 0.10, "{wide} vs {wide_truth}");
    assert!(rel(narrow_truth / wide_truth, 2.0) < 0.02);
    assert!(rel(narrow / wide, 2.0) < 0.15, "{narrow} / {wide}");
}

#[test]
fn soybean_plant_spacing_and_kernel_sensitivity() {
    let spec = FieldSpec::soybean(21);
    let field = generate_field(&spec).unwrap();
    let (_, chm, rows) = segmentation(&field, &spec.tile);
    let count = |kernel_length: f64| {
        let cfg = SoybeanDensityConfig {
            kernel_length,
            ..Default::default()
        };
        plant_density_soybean(&chm, &rows, &spec.tile, &cfg).unwrap()
    };
    let base = count(0.1);
    let gaps: Vec<f64> = base
        .rows
        .iter()
        .flat_map(|r| r.plants.windows(2).map(|w| w[1].center - w[0].center).collect::<Vec<_>>())
        .collect();
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    assert!(rel(mean_gap, spec.plant_spacing) < 0.10, "{mean_gap}");
    for length in [0.05, 0.2] {
        let other = count(length);
        assert!(
            rel(other.plants as f64, base.plants as f64) < 0.15,
            "{length}: {} vs {}",
            other.plants,
            base.plants
        );
    }
    let e = estimate(&field, &spec, CropKind::Soybean);
    assert!(rel(e.height, field.truth.canopy_height) < 0.05);
    assert!(rel(e.plant_density, field.truth.plant_density) < 0.15);
    assert!(rel(e.lai, field.truth.lai) < 0.15);
}

#[test]
fn height_survives_subsampling_and_bare_ground() {
    let spec = FieldSpec::corn(31);
    let field = generate_field(&spec).unwrap();
    let height = |cloud: &PointCloud| {
        let normalized = normalize_ground(cloud, &Default::default()).unwrap();
        canopy_height(&build_chm(&normalized, &spec.tile).unwrap())
    };
    let full = height(&field.cloud);
    let half = height(&field.cloud.subsampled(2));
    let quarter = height(&field.cloud.subsampled(4));
    // fewer returns per cell lower the per-cell maximum over a ragged leaf
    // surface, so the height sags gently as the cloud thins
    assert!(quarter <= half && half <= full, "{quarter} {half} {full}");
    assert!(rel(quarter, full) < 0.10, "{quarter} vs {full}");

    let half_bare = FieldSpec {
        planted: Some(Tile::new(-2.0, -2.0, 5.0, 10.0).unwrap()),
        ..spec.clone()
    };
    let half_field = generate_field(&half_bare).unwrap();
    let normalized = normalize_ground(&half_field.cloud, &Default::default()).unwrap();
    let chm = build_chm(&normalized, &spec.tile).unwrap();
    let vegetated = canopy_height(&chm);
    let truth = half_field.truth.canopy_height;
    assert!(rel(vegetated, truth) < 0.05, "{vegetated} vs {truth}");
    // the plain raster mean is dragged down by the bare half
    assert!(chm.mean() < 0.7 * vegetated);
}

#[test]
fn random_leaf_lai_and_subsampling() {
    let spec = FieldSpec::random_disks(3.0, 41);
    let field = generate_field(&spec).unwrap();
    let normalized = normalize_ground(&field.cloud, &Default::default()).unwrap();
    let cfg = LaiConfig::default();
    assert_eq!(cfg.form, LaiForm::Integrated);
    let full = estimate_lai(&normalized, &spec.tile, &cfg).unwrap();
    assert!(rel(full.lai, 3.0) < 0.15, "{}", full.lai);
    assert!(rel(full.lai, field.truth.lai) < 0.15);
    let half = estimate_lai(&normalized.subsampled(2), &spec.tile, &cfg).unwrap();
    assert!(rel(half.lai, full.lai) < 0.10, "{} vs {}", half.lai, full.lai);
}

#[test]
fn counts_do_not_depend_on_position_and_runs_repeat() {
    let spec = FieldSpec::corn(51);
    let field = generate_field(&spec).unwrap();
    let e = estimate(&field, &spec, CropKind::Corn);
    let (dx, dy) = (512.0, -256.0);
    let moved_tile = Tile::new(spec.tile.x0 + dx, spec.tile.y0 + dy, spec.tile.width, spec.tile.height).unwrap();
    let moved = field.cloud.translated(dx, dy, 0.0);
    let allometry = allometry_for(&default_allometry(), CropKind::Corn).unwrap();
    let m = estimate_structure(&moved, &moved_tile, CropKind::Corn, &allometry, &StructureConfig::default()).unwrap();
    let counts = |e: &CanopyStructureEstimate| e.rows.iter().map(|r| r.plants).collect::<Vec<_>>();
    assert_eq!(counts(&e), counts(&m));
    assert_eq!(e.plant_density, m.plant_density);

    let again = estimate(&generate_field(&spec).unwrap(), &spec, CropKind::Corn);
    assert_eq!(e, again);
}
