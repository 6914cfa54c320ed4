use std::f64::consts::PI;

use gmtkit_core::area::{
    area_formula_with_multiplicity, cauchy_binet, change_of_variables, curve_length, graph_area, graph_area_on,
    image_measure_linear, j_linear, jacobian_integral, jacobian_integral_box, jacobian_l1_check, multiplicity,
    surface_measure, surface_measure_box, LinearMap, MultiplicityOptions, YGrid, CURVE_ORDER, CURVE_PANELS,
};
use gmtkit_core::{Error, GridFunction, Lattice, ParametricMap, RasterSet};
use rand::Rng;

mod common;
use common::{close, rng};

fn random_map(r: &mut impl Rng, n: usize, k: usize) -> LinearMap {
    LinearMap::new((0..n * k).map(|_| r.gen_range(-2.0..2.0)).collect(), n, k).unwrap()
}

/// Product of Givens rotations with random angles: an orthogonal `n×n`.
fn random_orthogonal(r: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut u = vec![0.0; n * n];
    for i in 0..n {
        u[i * n + i] = 1.0;
    }
    for i in 0..n {
        for j in i + 1..n {
            let (c, s) = {
                let t: f64 = r.gen_range(0.0..2.0 * PI);
                (t.cos(), t.sin())
            };
            for col in 0..n {
                let (a, b) = (u[i * n + col], u[j * n + col]);
                u[i * n + col] = c * a - s * b;
                u[j * n + col] = s * a + c * b;
            }
        }
    }
    if r.gen_bool(0.5) {
        for col in 0..n {
            u[col] = -u[col];
        }
    }
    u
}

#[test]
fn cross_product_formula() {
    let (a, b, c, d, e, f) = (1.0, 2.0, -0.5, 3.0, 4.0, 0.25);
    let t = LinearMap::new(vec![a, b, c, d, e, f], 3, 2).unwrap();
    let expected = ((a * d - b * c).powi(2) + (c * f - e * d).powi(2) + (a * f - b * e).powi(2)).sqrt();
    assert!(close(j_linear(&t), expected, 1e-12));
    assert!(close(cauchy_binet(&t), expected, 1e-12));
}

#[test]
fn cauchy_binet_matches_gram_determinant() {
    let mut r = rng(51);
    for _ in 0..200 {
        let n = r.gen_range(1..=5);
        let k = r.gen_range(1..=n);
        let t = random_map(&mut r, n, k);
        let j = j_linear(&t);
        assert!((cauchy_binet(&t) - j).abs() <= 1e-10 * j.max(1.0));
    }
    let square = LinearMap::new(vec![2.0, 1.0, 1.0, 3.0], 2, 2).unwrap();
    assert!(close(j_linear(&square), 5.0, 1e-12));
}

#[test]
fn orthogonal_factors_leave_the_jacobian_unchanged() {
    let mut r = rng(52);
    for _ in 0..100 {
        let n = r.gen_range(1..=4);
        let k = r.gen_range(1..=n);
        let t = random_map(&mut r, n, k);
        let u = random_orthogonal(&mut r, n);
        let ut = t.left_multiply(&u).unwrap();
        assert!((j_linear(&ut) - j_linear(&t)).abs() <= 1e-10 * j_linear(&t).max(1.0));
    }
}

#[test]
fn linear_images_of_rasters() {
    let lat = Lattice::over_box(&[0.0, 0.0], &[1.0, 1.0], 0.01).unwrap();
    let sq = RasterSet::full(lat);
    let id = LinearMap::new(vec![1.0, 0.0, 0.0, 1.0], 2, 2).unwrap();
    assert!(close(image_measure_linear(&id, &sq).unwrap(), 1.0, 1e-12));
    let two = LinearMap::new(vec![2.0, 0.0, 0.0, 2.0], 2, 2).unwrap();
    assert!(close(image_measure_linear(&two, &sq).unwrap(), 4.0, 1e-12));
    let line = RasterSet::full(Lattice::over_box(&[0.0], &[1.0], 0.01).unwrap());
    let diag = LinearMap::new(vec![1.0, 1.0], 2, 1).unwrap();
    assert!(close(image_measure_linear(&diag, &line).unwrap(), 2f64.sqrt(), 1e-12));
    let flat = LinearMap::new(vec![1.0, 2.0, 2.0, 4.0], 2, 2).unwrap();
    assert!(matches!(image_measure_linear(&flat, &sq), Err(Error::SingularMap)));
}

#[test]
fn curve_lengths() {
    let helix = ParametricMap::helix(0.0, 1.0).unwrap();
    assert!(close(curve_length(&helix, CURVE_PANELS, CURVE_ORDER).unwrap(), 2f64.sqrt(), 1e-8));
    let arc = ParametricMap::circle(0.0, PI).unwrap();
    assert!(close(curve_length(&arc, CURVE_PANELS, CURVE_ORDER).unwrap(), PI, 1e-8));
    let seg = ParametricMap::linear(vec![3.0, -1.0, 2.0], 3, 1, vec![0.0], vec![2.0]).unwrap().injective(true);
    assert!(close(curve_length(&seg, 4, 2).unwrap(), 2.0 * 14f64.sqrt(), 1e-12));
    // finite differences stand in for a missing Jacobian
    let bare = ParametricMap::new("helix", 1, 3, vec![0.0], vec![1.0], |t| vec![t[0].cos(), t[0].sin(), t[0]])
        .unwrap()
        .injective(true);
    assert!(close(curve_length(&bare, CURVE_PANELS, CURVE_ORDER).unwrap(), 2f64.sqrt(), 1e-7));
}

#[test]
fn graph_areas() {
    let h = 1.0 / 256.0;
    let lat = Lattice::over_box(&[0.0, 0.0], &[1.0, 1.0], h).unwrap();
    assert!(close(graph_area(&GridFunction::constant(lat.clone(), 2.0).unwrap()).unwrap(), 1.0, 1e-12));
    let a = 1.5;
    let plane = GridFunction::from_fn(lat, |x| a * x[0]).unwrap();
    assert!(close(graph_area(&plane).unwrap(), (1.0 + a * a).sqrt(), 1e-9));

    let lat = Lattice::over_box(&[-1.0, -1.0], &[1.0, 1.0], 1.0 / 1024.0).unwrap();
    let f = GridFunction::from_fn(lat.clone(), |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
    let disk = RasterSet::from_fn(lat, |x| x[0] * x[0] + x[1] * x[1] < 1.0);
    // 2π ∫_0^1 √(1 + r²) r dr by a fine midpoint rule
    let m = 100_000;
    let oracle = 2.0 * PI * (0..m).map(|i| (i as f64 + 0.5) / m as f64).map(|r| (1.0 + r * r).sqrt() * r).sum::<f64>()
        / m as f64;
    assert!(close(graph_area_on(&f, &disk).unwrap(), oracle, 1e-3));
}

#[test]
fn surface_measures() {
    let sphere = ParametricMap::sphere().unwrap();
    assert!(close(surface_measure_box(&sphere, &[64, 64]).unwrap(), 4.0 * PI, 1e-3));
    let polar = ParametricMap::polar(1.0).unwrap();
    assert!(close(surface_measure_box(&polar, &[64, 64]).unwrap(), PI, 1e-6));

    let t = LinearMap::new(vec![1.0, 2.0, 0.0, 1.0, 3.0, -1.0], 3, 2).unwrap();
    let phi = ParametricMap::linear(t.matrix().to_vec(), 3, 2, vec![0.0, 0.0], vec![1.0, 1.0]).unwrap().injective(true);
    let lat = Lattice::over_box(&[0.0, 0.0], &[1.0, 1.0], 0.05).unwrap();
    let disk = RasterSet::from_fn(lat, |x| (x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2) < 0.16);
    let expected = image_measure_linear(&t, &disk).unwrap();
    assert!(close(surface_measure(&phi, &disk).unwrap(), expected, 1e-8));

    let fold = ParametricMap::fold(2, 1.0).unwrap();
    let lat = Lattice::over_box(&[0.0], &[1.0], 0.01).unwrap();
    assert!(surface_measure(&fold, &RasterSet::full(lat)).is_err());
}

#[test]
fn surface_measure_ignores_rigid_motions_of_parameters() {
    let g = |u: f64, v: f64| vec![u, v, (u * v).sin() + u * u];
    let base = ParametricMap::new("g", 2, 3, vec![0.0, 0.0], vec![1.0, 2.0], move |x| g(x[0], x[1]))
        .unwrap()
        .injective(true);
    let shifted = ParametricMap::new("g", 2, 3, vec![3.0, -1.0], vec![4.0, 1.0], move |x| g(x[0] - 3.0, x[1] + 1.0))
        .unwrap()
        .injective(true);
    let swapped = ParametricMap::new("g", 2, 3, vec![0.0, 0.0], vec![2.0, 1.0], move |x| g(x[1], x[0]))
        .unwrap()
        .injective(true);
    let a = surface_measure_box(&base, &[64, 128]).unwrap();
    assert!(close(surface_measure_box(&shifted, &[64, 128]).unwrap(), a, 1e-8));
    assert!(close(surface_measure_box(&swapped, &[128, 64]).unwrap(), a, 1e-8));
}

#[test]
fn quadrature_converges_under_refinement() {
    let phi = ParametricMap::new("bowl", 2, 3, vec![0.0, 0.0], vec![1.0, 1.0], |x| {
        vec![x[0], x[1], (2.0 * x[0]).exp() * x[1].cos()]
    })
    .unwrap();
    let vals: Vec<f64> = [4, 8, 16].iter().map(|&c| jacobian_integral_box(&phi, &[c, c]).unwrap()).collect();
    let (d1, d2) = ((vals[1] - vals[0]).abs(), (vals[2] - vals[1]).abs());
    assert!(d2 * 3.0 <= d1, "{vals:?}");

    let lat = |h: f64| Lattice::over_box(&[0.0, 0.0], &[1.0, 1.0], h).unwrap();
    let vals: Vec<f64> =
        [0.25, 0.125, 0.0625].iter().map(|&h| jacobian_integral(&phi, &RasterSet::full(lat(h))).unwrap()).collect();
    let (d1, d2) = ((vals[1] - vals[0]).abs(), (vals[2] - vals[1]).abs());
    assert!(d2 * 3.0 <= d1, "{vals:?}");
}

#[test]
fn multiplicity_counts() {
    let opts = MultiplicityOptions::default();
    let sq = ParametricMap::square(-1.0, 1.0).unwrap();
    let p = multiplicity(&sq, &[0.25], &opts).unwrap();
    assert_eq!(p.count, Some(2));
    let mut roots: Vec<f64> = p.preimages.iter().map(|x| x[0]).collect();
    roots.sort_by(f64::total_cmp);
    assert!(close(roots[0], -0.5, 1e-9) && close(roots[1], 0.5, 1e-9));
    assert_eq!(multiplicity(&sq, &[-1.0], &opts).unwrap().count, Some(0));

    // sin(3x) = 1/2 at x = (π/6 + 2πj)/3 and (5π/6 + 2πj)/3
    let sine = ParametricMap::sine(3.0, 0.0, 2.0 * PI).unwrap();
    let p = multiplicity(&sine, &[0.5], &opts).unwrap();
    assert_eq!(p.count, Some(6));
    for x in &p.preimages {
        assert!(close((3.0 * x[0]).sin(), 0.5, 1e-9));
    }
}

#[test]
fn multiplicity_grows_with_the_set() {
    let opts = MultiplicityOptions::default();
    let mut last = 0;
    for b in [1.0, 2.0, 3.0, 4.0, 2.0 * PI] {
        let sine = ParametricMap::sine(3.0, 0.0, b).unwrap();
        let n = multiplicity(&sine, &[0.3], &opts).unwrap().count.unwrap();
        assert!(n >= last, "b {b}: {n} < {last}");
        last = n;
    }
    assert_eq!(last, 6);
}

#[test]
fn area_formula_in_one_dimension() {
    let opts = MultiplicityOptions::default();
    let sq = ParametricMap::square(-1.0, 1.0).unwrap();
    let grid = YGrid::new(vec![-0.5], vec![1.5], 256).unwrap();
    let c = area_formula_with_multiplicity(&sq, &[1024], &grid, &opts).unwrap();
    assert!(close(c.rhs, 2.0, 1e-6));
    assert!(close(c.lhs, 2.0, 1e-3));

    // each lap sweeps [0, height] once
    let height = 0.7;
    let fold = ParametricMap::fold(3, height).unwrap();
    let grid = YGrid::new(vec![-0.2], vec![1.0], 240).unwrap();
    let c = area_formula_with_multiplicity(&fold, &[300], &grid, &opts).unwrap();
    assert!(close(c.rhs, 3.0 * height, 1e-9));
    assert!(close(c.lhs, 3.0 * height, 2.0 * 1.2 / 240.0));
    // ∫N is bounded by Lip(Φ) Λ(E)
    assert!(c.lhs <= 3.0 * height + 1e-12);

    let two = ParametricMap::fold(2, 1.0).unwrap();
    let grid = YGrid::new(vec![-0.5], vec![1.5], 200).unwrap();
    let c = jacobian_l1_check(&two, &[200], &grid).unwrap();
    assert!(close(c.lhs, 2.0, 1e-9) && close(c.rhs, 2.0, 1e-9));
}

#[test]
fn injective_maps_count_image_measure() {
    let opts = MultiplicityOptions::default();
    let id = ParametricMap::identity(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
    let grid = YGrid::new(vec![-0.25, -0.25], vec![1.25, 1.25], 24).unwrap();
    let c = jacobian_l1_check(&id, &[8, 8], &grid).unwrap();
    assert!(close(c.rhs, 1.0, 1e-12) && close(c.lhs, 1.0, 1e-12));

    // annular sector r ∈ ]1/2, 1[, θ ∈ ]0, π/2[
    let sector = ParametricMap::polar(1.0).unwrap().with_domain(vec![0.5, 0.0], vec![1.0, 0.5 * PI]).unwrap();
    let expected = 3.0 * PI / 16.0;
    let grid = YGrid::around_image(&sector, 64, 48).unwrap();
    let c = area_formula_with_multiplicity(&sector, &[32, 32], &grid, &opts).unwrap();
    assert!(close(c.rhs, expected, 1e-8));
    assert!(close(c.lhs, expected, 0.03 * expected), "{}", c.lhs);
}

#[test]
fn change_of_variables_for_the_square_map() {
    let opts = MultiplicityOptions::default();
    let sq = ParametricMap::square(0.0, 1.0).unwrap();
    let grid = YGrid::new(vec![0.0], vec![1.0], 256).unwrap();
    let c = change_of_variables(&sq, &|x: &[f64]| x[0], &[256], &grid, &opts).unwrap();
    assert!(close(c.lhs, 2.0 / 3.0, 1e-9));
    assert!(close(c.rhs, 2.0 / 3.0, 1e-4));

    let unit = change_of_variables(&sq, &|_: &[f64]| 1.0, &[256], &grid, &opts).unwrap();
    let plain = area_formula_with_multiplicity(&sq, &[256], &grid, &opts).unwrap();
    assert!(close(unit.lhs, plain.rhs, 1e-12) && close(unit.rhs, plain.lhs, 1e-12));

    assert!(matches!(
        change_of_variables(&sq, &|_: &[f64]| -1.0, &[16], &grid, &opts),
        Err(Error::Domain(_))
    ));
    let helix = ParametricMap::helix(0.0, 1.0).unwrap();
    assert!(matches!(
        area_formula_with_multiplicity(&helix, &[16], &grid, &opts),
        Err(Error::Dimension(_))
    ));
}
