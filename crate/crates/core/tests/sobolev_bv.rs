use std::f64::consts::PI;

use gmtkit_core::smoothing::{mollify, Bump, MollifierKernel};
use gmtkit_core::sobolev_bv::{
    bmo_by_generation, bmo_seminorm, bv_norm, decompose_1d, dyadic_cubes, gns_check, lsc_check, morrey_check,
    perimeter, perimeter_calibration, poincare_cube_check, regime, sobolev_norm, tonelli_variation, variation_1d,
    variation_nd, Cube, Regime, VariationMethod, DEFAULT_JUMP_THRESHOLD,
};
use gmtkit_core::{Error, GridFunction, Lattice, RasterSet};
use rand::Rng;

mod common;
use common::{bump_field, cantor_function, close, rng, sup_abs};

fn unit_box(n: usize, h: f64) -> Lattice {
    Lattice::over_box(&vec![0.0; n], &vec![1.0; n], h).unwrap()
}

fn gradient_tv(f: &GridFunction) -> f64 {
    variation_nd(f, VariationMethod::GradientIntegral, 0).unwrap().tv
}

#[test]
fn sobolev_norms_of_simple_fields() {
    let lat = unit_box(2, 1.0 / 128.0);
    let zero = sobolev_norm(&GridFunction::constant(lat.clone(), 0.0).unwrap(), 2.0).unwrap();
    assert_eq!((zero.lp_norm, zero.grad_lp_norm, zero.sobolev_norm), (0.0, 0.0, 0.0));
    let lin = sobolev_norm(&GridFunction::from_fn(lat, |x| 3.0 * x[0] + 4.0 * x[1]).unwrap(), 2.0).unwrap();
    assert!(close(lin.grad_lp_norm, 5.0, 1e-9));
    assert!(close(lin.partial_norms[0], 3.0, 1e-9) && close(lin.partial_norms[1], 4.0, 1e-9));
    // ∫∫ (3x + 4y)² = 9/3 + 16/3 + 2·12/4
    assert!(close(lin.lp_norm, (25.0 / 3.0 + 6.0f64).sqrt(), 1e-3));
    assert_eq!(lin.p_star, None);
    let one = sobolev_norm(&GridFunction::constant(unit_box(2, 0.1), 1.0).unwrap(), 1.0).unwrap();
    assert_eq!(one.p_star, Some(2.0));
    assert!(sobolev_norm(&GridFunction::constant(unit_box(2, 0.1), 1.0).unwrap(), 0.5).is_err());
}

#[test]
fn sobolev_triangle_inequality() {
    let mut r = rng(41);
    let lat = unit_box(2, 1.0 / 32.0);
    for _ in 0..50 {
        let f = GridFunction::new(lat.clone(), (0..lat.len()).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap();
        let g = bump_field(&mut r, &lat);
        let p = r.gen_range(1.0..4.0);
        let sum = sobolev_norm(&f.combine(1.0, &g, 1.0).unwrap(), p).unwrap();
        let (a, b) = (sobolev_norm(&f, p).unwrap(), sobolev_norm(&g, p).unwrap());
        assert!(sum.lp_norm <= a.lp_norm + b.lp_norm + 1e-12);
        assert!(sum.sobolev_norm <= a.sobolev_norm + b.sobolev_norm + 1e-12);
    }
}

#[test]
fn regime_dispatch_is_total() {
    for n in 1..=4 {
        for p in [1.0, 1.5, 2.0, 3.0, 4.0, 7.5] {
            let expected = if p < n as f64 {
                Regime::Gns
            } else if p == n as f64 {
                Regime::Bmo
            } else {
                Regime::Morrey
            };
            assert_eq!(regime(n, p).unwrap(), expected);
        }
    }
}

#[test]
fn gns_battery() {
    let mut r = rng(42);
    let plane = unit_box(2, 1.0 / 64.0);
    let cube = unit_box(3, 1.0 / 24.0);
    for i in 0..100 {
        let (lat, p) = match i % 3 {
            0 => (&plane, 1.0),
            1 => (&plane, 1.5),
            _ => (&cube, 2.0),
        };
        let c = gns_check(&bump_field(&mut r, lat), p).unwrap();
        assert!(c.holds(1e-12), "case {i}: {} > {}", c.lhs, c.rhs);
        if lat.ndim() == 3 {
            assert_eq!(c.constant, 4.0);
        }
    }
    let zero = gns_check(&GridFunction::constant(plane.clone(), 0.0).unwrap(), 1.0).unwrap();
    assert_eq!((zero.lhs, zero.rhs), (0.0, 0.0));
    let one = GridFunction::constant(plane, 1.0).unwrap();
    assert!(matches!(gns_check(&one, 1.0), Err(Error::InvalidInput(_))));
    assert!(matches!(gns_check(&one, 2.0), Err(Error::Regime { .. })));
}

#[test]
fn poincare_on_cubes() {
    let lat = unit_box(2, 1.0 / 128.0);
    let whole = Cube { lo: vec![0.0, 0.0], side: 1.0 };
    let c = poincare_cube_check(&GridFunction::constant(lat.clone(), 2.0).unwrap(), &whole, 2.0).unwrap();
    assert_eq!(c.lhs, 0.0);

    // ⟨a,x⟩ − mean has L² norm ‖a‖/√12 on the unit square
    let f = GridFunction::from_fn(lat.clone(), |x| x[0] - 2.0 * x[1]).unwrap();
    let c = poincare_cube_check(&f, &whole, 2.0).unwrap();
    let a = 5f64.sqrt();
    assert!(close(c.lhs, a / 12f64.sqrt(), 1e-3));
    assert!(close(c.rhs, 8f64.sqrt() * a, 1e-9));

    let mut r = rng(43);
    let small = unit_box(2, 1.0 / 64.0);
    for i in 0..100 {
        let f = bump_field(&mut r, &small);
        let side = r.gen_range(0.2..1.0);
        let q = Cube { lo: vec![r.gen_range(0.0..1.0 - side), r.gen_range(0.0..1.0 - side)], side };
        for p in [1.0, 2.0] {
            let c = poincare_cube_check(&f, &q, p).unwrap();
            assert!(c.holds(1e-12), "case {i} p {p}");
        }
    }
    let out = Cube { lo: vec![0.5, 0.5], side: 0.6 };
    assert!(matches!(poincare_cube_check(&f, &out, 2.0), Err(Error::OutsideDomain(_))));
}

#[test]
fn bmo_seminorms() {
    let lat = unit_box(2, 1.0 / 256.0);
    let cubes: Vec<Cube> = dyadic_cubes(&[0.0, 0.0], 1.0, 4).into_iter().flatten().collect();
    let c = GridFunction::constant(lat.clone(), 3.7).unwrap();
    assert_eq!(bmo_seminorm(&c, &cubes).unwrap(), 0.0);
    let mut r = rng(44);
    for _ in 0..10 {
        let f = GridFunction::new(lat.clone(), (0..lat.len()).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap();
        assert!(bmo_seminorm(&f, &cubes).unwrap() <= 2.0 * f.sup_norm());
        let g = bump_field(&mut r, &lat);
        assert!(bmo_seminorm(&g, &cubes).unwrap() <= 2.0 * g.sup_norm());
    }
    let log = GridFunction::from_fn(lat, |x| (x[0] * x[0] + x[1] * x[1]).sqrt().ln()).unwrap();
    let gens = bmo_by_generation(&log, 4).unwrap();
    let (lo, hi) = gens.iter().fold((f64::MAX, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    assert!(hi <= 1.15 * lo, "{gens:?}");
}

#[test]
fn morrey_batteries() {
    let mut r = rng(45);
    let line = unit_box(1, 1.0 / 512.0);
    let plane = unit_box(2, 1.0 / 64.0);
    for i in 0..40 {
        let (lat, p) = if i % 2 == 0 { (&line, 2.0) } else { (&plane, 4.0) };
        let m = morrey_check(&bump_field(&mut r, lat), p, 200, i).unwrap();
        assert!(m.worst_ratio <= 1.0, "case {i}: {}", m.worst_ratio);
        assert!(m.pairs > 190);
    }
    let c = morrey_check(&GridFunction::constant(plane.clone(), 1.0).unwrap(), 3.0, 50, 0).unwrap();
    assert_eq!(c.worst_ratio, 0.0);
    assert_eq!(c.constant, 12.0);
    assert!(matches!(morrey_check(&GridFunction::constant(plane, 1.0).unwrap(), 2.0, 5, 0), Err(Error::Regime { .. })));
}

#[test]
fn one_dimensional_variation() {
    assert_eq!(variation_1d(&[0.0, 0.25, 0.5, 1.0]).unwrap(), 1.0);
    assert_eq!(variation_1d(&[0.0, 0.0, 1.0, 1.0]).unwrap(), 1.0);
    let n = 100_000;
    let s: Vec<f64> = (0..=n).map(|i| (2.0 * PI * i as f64 / n as f64).sin()).collect();
    assert!(close(variation_1d(&s).unwrap(), 4.0, 1e-3));
    assert!(variation_1d(&[1.0]).is_err());
}

fn chi(lat: &Lattice, a: f64) -> GridFunction {
    GridFunction::from_fn(lat.clone(), |x| if x[0] > a { 1.0 } else { 0.0 }).unwrap()
}

#[test]
fn bv_norms() {
    let h = 1e-3;
    let lat = unit_box(1, h);
    for (a, b) in [(0.2, 0.7), (0.5, 0.55), (0.9, 0.1)] {
        let d = chi(&lat, a).combine(1.0, &chi(&lat, b), -1.0).unwrap();
        assert!(close(bv_norm(&d).unwrap(), 2.0 + (a - b).abs(), 2.0 * h));
    }
    assert_eq!(bv_norm(&GridFunction::constant(lat.clone(), 0.0).unwrap()).unwrap(), 0.0);
    assert!(close(bv_norm(&GridFunction::constant(lat.clone(), 1.0).unwrap()).unwrap(), 1.0, 1e-12));
    let mut r = rng(46);
    for _ in 0..50 {
        let f = GridFunction::new(lat.clone(), (0..lat.len()).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap();
        let g = chi(&lat, r.gen_range(0.0..1.0));
        let sum = bv_norm(&f.combine(1.0, &g, 1.0).unwrap()).unwrap();
        assert!(sum <= bv_norm(&f).unwrap() + bv_norm(&g).unwrap() + 1e-12);
    }
    assert!(matches!(bv_norm(&GridFunction::constant(unit_box(2, 0.1), 1.0).unwrap()), Err(Error::Dimension(_))));
}

#[test]
fn perimeters() {
    let h = 1.0 / 128.0;
    let lat = Lattice::over_box(&[-1.0, -1.0], &[1.0, 1.0], h).unwrap();
    let square = RasterSet::from_fn(lat.clone(), |x| x[0].abs() < 0.5 && x[1].abs() < 0.5);
    assert!(close(perimeter(&square), 4.0, 4.0 * h));
    assert_eq!(perimeter(&RasterSet::new(lat.clone(), vec![false; lat.len()]).unwrap()), 0.0);

    let h = 1.0 / 256.0;
    let lat = Lattice::over_box(&[-1.5, -1.5], &[1.5, 1.5], h).unwrap();
    let disk = RasterSet::from_fn(lat, |x| x[0] * x[0] + x[1] * x[1] <= 1.0);
    let raw = perimeter(&disk);
    // face counting measures the ℓ¹ length 8
    assert!(close(raw, 8.0, 0.02), "{raw}");
    let calibrated = raw / perimeter_calibration(h).unwrap();
    assert!(close(calibrated, 2.0 * PI, 0.01), "{calibrated}");
}

#[test]
fn variation_methods() {
    let lat = unit_box(2, 1.0 / 64.0);
    let lin = GridFunction::from_fn(lat.clone(), |x| 3.0 * x[0] - 4.0 * x[1]).unwrap();
    assert!(close(gradient_tv(&lin), 5.0, 1e-9));
    let c = GridFunction::constant(lat.clone(), 2.0).unwrap();
    for m in [VariationMethod::GradientIntegral, VariationMethod::Coarea] {
        assert_eq!(variation_nd(&c, m, 1).unwrap().tv, 0.0);
    }
    assert!(variation_nd(&c, VariationMethod::DivergenceSup, 1).unwrap().tv <= 1e-12);
    assert!(VariationMethod::parse("sideways").is_err());

    let mut r = rng(47);
    let small = unit_box(2, 1.0 / 40.0);
    for i in 0..50 {
        let f = bump_field(&mut r, &small);
        let rep = variation_nd(&f, VariationMethod::DivergenceSup, i).unwrap();
        assert!(rep.lower_bound);
        assert!(rep.tv <= gradient_tv(&f) * (1.0 + 1e-9), "case {i}");
    }
}

#[test]
fn coarea_agrees_with_gradient_integral_for_a_radial_bump() {
    let lat = Lattice::over_box(&[-1.0, -1.0], &[1.0, 1.0], 1.0 / 256.0).unwrap();
    let b = Bump { center: vec![0.05, -0.1], radius: 0.8 };
    let f = GridFunction::from_fn(lat, |x| b.value(x)).unwrap();
    let grad = gradient_tv(&f);
    let rep = variation_nd(&f, VariationMethod::Coarea, 0).unwrap();
    assert!((rep.tv - grad).abs() <= 0.02 * grad, "{} vs {grad}", rep.tv);
    let levels = rep.per_level.unwrap();
    assert_eq!(levels.len(), 64);
    assert!(levels.iter().all(|(_, p)| *p >= 0.0));
}

#[test]
fn tonelli_line_variations() {
    let h = 1.0 / 128.0;
    let lat = unit_box(2, h);
    assert_eq!(tonelli_variation(&GridFunction::constant(lat.clone(), 1.0).unwrap()).unwrap(), (0.0, 0.0));
    let (vx, vy) = tonelli_variation(&GridFunction::from_fn(lat.clone(), |x| x[0]).unwrap()).unwrap();
    assert!(close(vx, 1.0, h) && vy == 0.0);
    let b = Bump { center: vec![0.4, 0.5], radius: 0.35 };
    let f = GridFunction::from_fn(lat, |x| b.value(x)).unwrap();
    let (vx, vy) = tonelli_variation(&f).unwrap();
    let tv = gradient_tv(&f);
    assert!(vx.is_finite() && vy.is_finite());
    assert!(vx <= tv * 1.01 && vy <= tv * 1.01, "{vx} {vy} {tv}");
}

#[test]
fn lower_semicontinuity() {
    let lat = Lattice::over_box(&[-1.0], &[1.0], 1e-3).unwrap();
    let step = GridFunction::from_fn(lat.clone(), |x| if x[0] >= 0.0 { 1.0 } else { 0.0 }).unwrap();
    // mollified steps, padded back to the whole lattice by their end values
    let seq: Vec<GridFunction> = [0.2, 0.1, 0.05, 0.02]
        .iter()
        .map(|&eps| {
            let fe = mollify(&step, &MollifierKernel::standard(1, eps).unwrap()).unwrap();
            GridFunction::from_fn(lat.clone(), |x| fe.interpolate(x).unwrap_or(if x[0] > 0.0 { 1.0 } else { 0.0 }))
                .unwrap()
        })
        .collect();
    let rep = lsc_check(&seq, &step).unwrap();
    assert!(rep.variations.iter().all(|v| close(*v, 1.0, 1e-3)), "{:?}", rep.variations);
    assert!(rep.l1_distances.windows(2).all(|w| w[1] < w[0]));
    assert!(close(rep.tv_limit, 1.0, 1e-12) && rep.tv_limit <= rep.tv_liminf + 1e-3);

    let c = vec![step.clone(); 3];
    let rep = lsc_check(&c, &step).unwrap();
    assert_eq!(rep.tv_liminf, rep.tv_limit);

    let smooth = GridFunction::from_fn(lat.clone(), |x| x[0] * x[0]).unwrap();
    let wiggly: Vec<GridFunction> = [10.0, 20.0, 40.0, 80.0]
        .iter()
        .map(|&k| GridFunction::from_fn(lat.clone(), |x| x[0] * x[0] + (k * x[0]).sin() / k).unwrap())
        .collect();
    let rep = lsc_check(&wiggly, &smooth).unwrap();
    // ∫|2x + cos kx| over [−1,1] tends to the average over θ of ∫|2x + cos θ|
    let m = 1000;
    let oracle = (0..m * m)
        .map(|i| {
            let x = -1.0 + ((i / m) as f64 + 0.5) * 2.0 / m as f64;
            let t = ((i % m) as f64 + 0.5) * 2.0 * PI / m as f64;
            (2.0 * x + t.cos()).abs()
        })
        .sum::<f64>()
        * 2.0
        / (m * m) as f64;
    assert!(close(rep.tv_liminf, oracle, 0.01 * oracle), "{} vs {oracle}", rep.tv_liminf);
    assert!(rep.tv_liminf > rep.tv_limit + 0.2);

    let other = GridFunction::constant(unit_box(1, 0.01), 0.0).unwrap();
    assert!(matches!(lsc_check(&[other], &step), Err(Error::LatticeMismatch)));
}

#[test]
fn decomposition_of_smooth_data() {
    let lat = unit_box(1, 1e-3);
    let g = |x: f64| (3.0 * x).sin() + x * x;
    let f = GridFunction::from_fn(lat, |x| g(x[0])).unwrap();
    let dec = decompose_1d(&f, DEFAULT_JUMP_THRESHOLD).unwrap();
    assert!(dec.jump_locations.is_empty());
    assert_eq!(sup_abs(&dec.jump_part), 0.0);
    assert_eq!(sup_abs(&dec.cantor_part), 0.0);
    for (x, a) in dec.x.iter().zip(&dec.ac_part) {
        assert!(close(*a, g(*x) - g(dec.x[0]), 1e-9));
    }
}

#[test]
fn decomposition_finds_planted_jumps() {
    let h = 1e-3;
    let lat = unit_box(1, h);
    let spots = [0.13, 0.31, 0.47, 0.62, 0.88];
    let f = GridFunction::from_fn(lat, |x| {
        x[0].cos() + spots.iter().enumerate().filter(|(_, s)| x[0] > **s).map(|(i, _)| 0.5f64.powi(i as i32 + 1)).sum::<f64>()
    })
    .unwrap();
    let dec = decompose_1d(&f, DEFAULT_JUMP_THRESHOLD).unwrap();
    assert_eq!(dec.jump_locations.len(), spots.len());
    for ((loc, height), (i, s)) in dec.jump_locations.iter().zip(spots.iter().enumerate()) {
        assert!(close(*loc, *s, h));
        // a sampled jump also carries one increment of cos
        assert!(close(*height, 0.5f64.powi(i as i32 + 1), h), "{height}");
    }
    let total: f64 = spots.iter().enumerate().map(|(i, _)| 0.5f64.powi(i as i32 + 1)).sum();
    assert!(close(*dec.jump_part.last().unwrap(), total, 5.0 * h));
    let rebuilt = dec.reconstruct();
    let inc = f.values().windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    assert!(rebuilt.iter().zip(f.values()).all(|(a, b)| (a - b).abs() <= 2.0 * inc));
}

#[test]
fn cantor_function_is_purely_singular() {
    let lat = unit_box(1, 3f64.powi(-11));
    let f = GridFunction::from_fn(lat, |x| cantor_function(x[0], 9)).unwrap();
    let dec = decompose_1d(&f, DEFAULT_JUMP_THRESHOLD).unwrap();
    assert!(sup_abs(&dec.ac_part) <= 0.02);
    assert!(sup_abs(&dec.jump_part) <= 0.02);
    let rise = dec.cantor_part.last().unwrap() - dec.cantor_part[0];
    assert!(close(rise, 1.0, 0.02), "{rise}");
    assert!(decompose_1d(&f, 0.0).is_err());
}
