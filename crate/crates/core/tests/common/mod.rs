//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Calls `visit(labels, blocks)` for every set partition of `0..n`, as
/// restricted growth strings.
pub fn for_each_partition(n: usize, mut visit: impl FnMut(&[usize], usize)) {
    let mut a = vec![0usize; n];
    let mut maxes = vec![0usize; n];
    loop {
        let blocks = if n == 0 { 0 } else { maxes[n - 1] + 1 };
        visit(&a, blocks);
        let mut i = n;
        loop {
            if i <= 1 {
                return;
            }
            i -= 1;
            if a[i] <= maxes[i - 1] {
                a[i] += 1;
                maxes[i] = maxes[i - 1].max(a[i]);
                for j in i + 1..n {
                    a[j] = 0;
                    maxes[j] = maxes[i];
                }
                break;
            }
        }
    }
}

/// Cantor function, linear on each of the `2^depth` intervals kept after
/// `depth` steps.
pub fn cantor_function(x: f64, depth: u32) -> f64 {
    let (mut x, mut value, mut weight) = (x.clamp(0.0, 1.0), 0.0, 0.5);
    for _ in 0..depth {
        if x < 1.0 / 3.0 {
            x *= 3.0;
        } else if x <= 2.0 / 3.0 {
            return value + weight;
        } else {
            value += weight;
            x = 3.0 * x - 2.0;
        }
        weight *= 0.5;
    }
    value + 2.0 * weight * x
}

pub fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, t| m.max(t.abs()))
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Sum of one to three bumps of random sign, kept `radius + h` away from
/// the box boundary so the field vanishes on the outer samples.
pub fn bump_field(r: &mut impl rand::Rng, lat: &gmtkit_core::Lattice) -> gmtkit_core::GridFunction {
    use gmtkit_core::smoothing::Bump;
    let n = lat.ndim();
    let (lo, hi) = (lat.lower(0), lat.upper(0));
    let side = hi - lo;
    let bumps: Vec<(Bump, f64)> = (0..r.gen_range(1..=3))
        .map(|_| {
            let radius = side * r.gen_range(0.1..0.3);
            let margin = radius + lat.spacing();
            let center = (0..n).map(|_| r.gen_range(lo + margin..hi - margin)).collect();
            (Bump { center, radius }, r.gen_range(-2.0..2.0))
        })
        .collect();
    gmtkit_core::GridFunction::from_fn(lat.clone(), |x| bumps.iter().map(|(b, a)| a * b.value(x)).sum()).unwrap()
}
