use std::f64::consts::PI;

use gmtkit_core::hausdorff::{
    box_counts, cover_sum, dimension_estimate, dimension_estimate_ifs, dyadic_scales, isodiametric_check, lebesgue_measure,
    linear_image_measure_check, lipschitz_image_bound_check, omega, premeasure_delta, IfsSystem, PointCloud,
    Similarity,
};
use gmtkit_core::{Error, Lattice, RasterSet};
use rand::Rng;

mod common;
use common::{close, rng};

fn uniform_line(n: usize, seed: u64) -> PointCloud {
    let mut r = rng(seed);
    let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![r.gen_range(0.0..1.0)]).collect();
    PointCloud::from_points(&pts).unwrap()
}

fn grid_square(per_axis: usize) -> PointCloud {
    let h = 1.0 / per_axis as f64;
    let pts: Vec<Vec<f64>> = (0..per_axis * per_axis)
        .map(|k| vec![((k / per_axis) as f64 + 0.5) * h, ((k % per_axis) as f64 + 0.5) * h])
        .collect();
    PointCloud::from_points(&pts).unwrap()
}

#[test]
fn omega_values() {
    assert!(close(omega(1.0).unwrap(), 2.0, 1e-13));
    assert!(close(omega(0.0).unwrap(), 1.0, 1e-13));
    assert!(close(omega(3.0).unwrap(), 4.0 * PI / 3.0, 1e-13));
    // Γ(5/2) = 3√π/4 gives ω_3 another way
    assert!(close(omega(3.0).unwrap(), PI.powf(1.5) / (0.75 * PI.sqrt()), 1e-13));
    assert!(matches!(omega(-1.0), Err(Error::Domain(_))));
}

#[test]
fn uniform_interval_premeasure_near_length() {
    let c = uniform_line(1000, 10);
    for delta in [0.1, 0.05, 0.02, 0.01] {
        let v = premeasure_delta(&c, 1.0, delta).unwrap();
        assert!((0.9..=1.3).contains(&v), "delta {delta}: {v}");
    }
}

#[test]
fn premeasure_is_monotone_in_delta() {
    let c = uniform_line(500, 11);
    let deltas = [0.5, 0.2, 0.1, 0.03, 0.01, 1e-3, 1e-4];
    for s in [0.5, 1.0, 1.5] {
        let vals: Vec<f64> = deltas.iter().map(|d| premeasure_delta(&c, s, *d).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-12), "s {s}: {vals:?}");
    }
}

#[test]
fn scaling_law() {
    let c = uniform_line(1000, 12);
    let base = premeasure_delta(&c, 1.0, 0.1).unwrap();
    let doubled = premeasure_delta(&c.scaled(2.0), 1.0, 0.2).unwrap();
    assert!((doubled - 2.0 * base).abs() <= 0.05 * 2.0 * base);
}

#[test]
fn translation_changes_little_at_fine_scales() {
    let c = grid_square(128);
    let moved = c.translated(&[0.0123, 0.0456]);
    for delta in [0.2, 0.05] {
        let a = premeasure_delta(&c, 2.0, delta).unwrap();
        let b = premeasure_delta(&moved, 2.0, delta).unwrap();
        assert!((a - b).abs() <= 0.1 * a, "delta {delta}: {a} vs {b}");
    }
}

#[test]
fn singleton_premeasure() {
    let c = PointCloud::from_points(&[vec![0.25, 0.5]]).unwrap();
    for s in [0.5, 1.0, 2.0] {
        let bound = omega(s).unwrap() / 2f64.powf(s);
        assert!(premeasure_delta(&c, s, 1.0).unwrap() <= bound + 1e-15);
        assert!(premeasure_delta(&c, s, 1e-6).unwrap() < 1e-5);
    }
}

#[test]
fn empty_cloud_has_zero_premeasure() {
    let c = PointCloud::new(2, Vec::new()).unwrap();
    assert_eq!(premeasure_delta(&c, 1.0, 0.1).unwrap(), 0.0);
}

#[test]
fn box_counts_of_dense_interval_and_square() {
    let pts: Vec<Vec<f64>> = (0..4096).map(|i| vec![(i as f64 + 0.5) / 4096.0]).collect();
    let line = PointCloud::from_points(&pts).unwrap();
    for (k, c) in (1..=8).zip(box_counts(&line, &dyadic_scales(1, 8)).unwrap()) {
        assert!(c.abs_diff(1 << k) <= 1, "k {k}: {c}");
    }
    let sq = grid_square(256);
    for (k, c) in (1..=6).zip(box_counts(&sq, &dyadic_scales(1, 6)).unwrap()) {
        assert_eq!(c, 1 << (2 * k));
    }
}

#[test]
fn square_dimension_is_two() {
    // shifted grids see (2^k + 1)^2 boxes, so stay at scales where that layer is thin
    let est = dimension_estimate(&grid_square(512), &dyadic_scales(4, 8)).unwrap();
    assert!((est.slope - 2.0).abs() <= 0.05, "{}", est.slope);
}

#[test]
fn finite_set_dimension_is_zero() {
    let mut r = rng(13);
    let pts: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 / 20.0 + r.gen_range(0.0..0.01)]).collect();
    let c = PointCloud::from_points(&pts).unwrap();
    // min gap > 0.04 > 2^-5
    let est = dimension_estimate(&c, &dyadic_scales(6, 12)).unwrap();
    assert_eq!(est.slope, 0.0);
    assert!(est.degenerate);
    assert_eq!(est.r2, 0.0);
}

#[test]
fn cantor_dimension() {
    let est = dimension_estimate_ifs(&IfsSystem::cantor(12), &dyadic_scales(3, 10)).unwrap();
    assert!((est.slope - 2f64.ln() / 3f64.ln()).abs() <= 0.02);
    assert!(est.counts.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn sierpinski_style_ifs_dimension() {
    // three maps of ratio 1/2: log 3 / log 2
    let maps = vec![
        Similarity::scaling(0.5, vec![0.0, 0.0]),
        Similarity::scaling(0.5, vec![0.5, 0.0]),
        Similarity::scaling(0.5, vec![0.25, 0.5]),
    ];
    let ifs = IfsSystem::new(maps, 0).unwrap();
    let est = dimension_estimate_ifs(&ifs, &dyadic_scales(3, 8)).unwrap();
    assert!((est.slope - 3f64.ln() / 2f64.ln()).abs() <= 0.05, "{}", est.slope);
}

#[test]
fn ifs_needs_contractions() {
    assert!(IfsSystem::new(vec![Similarity::scaling(1.2, vec![0.0])], 3).is_err());
    assert!(IfsSystem::new(vec![Similarity::scaling(0.5, vec![0.0])], 3).is_err());
}

#[test]
fn cantor_cover_sums_split_at_the_dimension() {
    let c = IfsSystem::cantor(14).generate().unwrap();
    let d = 2f64.ln() / 3f64.ln();
    let deltas = [0.1, 0.03, 0.01, 0.003, 0.001];
    let sums = |s: f64| -> Vec<f64> { deltas.iter().map(|x| cover_sum(&c, s, *x).unwrap()).collect() };
    let above = sums(d + 0.2);
    let below = sums(d - 0.2);
    assert!(above.windows(2).all(|w| w[1] < w[0]), "{above:?}");
    assert!(below.windows(2).all(|w| w[1] > w[0]), "{below:?}");
    // the premeasure keeps growing below the dimension
    let pre: Vec<f64> = deltas.iter().map(|x| premeasure_delta(&c, d - 0.2, *x).unwrap()).collect();
    assert!(pre.windows(2).all(|w| w[1] >= w[0]) && pre[4] > 2.0 * pre[0], "{pre:?}");
}

#[test]
fn raster_measures() {
    let lat = Lattice::over_box(&[0.0, 0.0], &[1.0, 1.0], 0.01).unwrap();
    assert!(close(lebesgue_measure(&RasterSet::full(lat.clone())), 1.0, 1e-12));
    assert_eq!(lebesgue_measure(&RasterSet::new(lat.clone(), vec![false; lat.len()]).unwrap()), 0.0);
    let lat = Lattice::over_box(&[-1.0, -1.0], &[1.0, 1.0], 0.01).unwrap();
    let ball = RasterSet::from_fn(lat, |x| x[0] * x[0] + x[1] * x[1] <= 1.0);
    assert!(close(lebesgue_measure(&ball), omega(2.0).unwrap(), 0.02));
}

#[test]
fn linear_images() {
    let lat = Lattice::over_box(&[0.0, 0.0], &[1.0, 1.0], 0.01).unwrap();
    let sq = RasterSet::full(lat);
    let id = linear_image_measure_check(&sq, &[1.0, 0.0, 0.0, 1.0]).unwrap();
    assert_eq!(id.lhs, id.rhs);
    let stretch = linear_image_measure_check(&sq, &[2.0, 0.0, 0.0, 1.0]).unwrap();
    assert!(close(stretch.rhs, 2.0, 1e-12) && close(stretch.lhs, 2.0, 0.02));
    let shear = linear_image_measure_check(&sq, &[1.0, 0.7, 0.0, 1.0]).unwrap();
    assert!(close(shear.lhs, 1.0, 0.02));
    assert!(matches!(linear_image_measure_check(&sq, &[1.0, 2.0, 2.0, 4.0]), Err(Error::SingularMap)));
}

#[test]
fn isodiametric_bounds() {
    let lat = Lattice::over_box(&[0.0, 0.0], &[1.0, 1.0], 0.01).unwrap();
    let sq = isodiametric_check(&RasterSet::full(lat.clone())).unwrap();
    assert!(close(sq.lhs, 1.0, 1e-12));
    assert!(sq.lhs <= sq.rhs && close(sq.rhs, PI / 2.0, 0.05));
    let mut one = vec![false; lat.len()];
    one[0] = true;
    let c = isodiametric_check(&RasterSet::new(lat, one).unwrap()).unwrap();
    assert!(c.lhs <= c.rhs);
    let mut ratios = Vec::new();
    for h in [0.05, 0.02, 0.005] {
        let lat = Lattice::over_box(&[-1.0, -1.0], &[1.0, 1.0], h).unwrap();
        let ball = RasterSet::from_fn(lat, |x| x[0] * x[0] + x[1] * x[1] <= 0.81);
        let c = isodiametric_check(&ball).unwrap();
        assert!(c.lhs <= c.rhs);
        ratios.push(c.lhs / c.rhs);
    }
    assert!(ratios.windows(2).all(|w| w[1] > w[0]) && ratios[2] > 0.98, "{ratios:?}");
}

#[test]
fn lipschitz_images() {
    let line = uniform_line(1000, 14);
    let id = lipschitz_image_bound_check(|x: &[f64]| x.to_vec(), 1.0, &line, 1.0, 0.1).unwrap();
    assert_eq!(id.lhs, id.rhs);
    let half = lipschitz_image_bound_check(|x: &[f64]| vec![0.5 * x[0]], 0.5, &line, 1.0, 0.1).unwrap();
    assert!(half.lhs <= half.rhs + 1e-12);
    assert!(close(half.lhs, 0.5 * premeasure_delta(&line, 1.0, 0.1).unwrap(), 0.05));
    let sq = grid_square(100);
    let proj = lipschitz_image_bound_check(|x: &[f64]| vec![x[0]], 1.0, &sq, 1.0, 0.1).unwrap();
    assert!(proj.lhs <= proj.rhs);
    assert!(lipschitz_image_bound_check(|x: &[f64]| x.to_vec(), -1.0, &sq, 1.0, 0.1).is_err());
}
