//! Pointwise differentiation and density on sampled data: directional
//! derivatives, finite-difference gradients and Jacobians, pointwise
//! Lipschitz constants, set densities, approximate limits and Lebesgue
//! points.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, Lattice, RasterSet, ScalarField, VectorField};
use crate::linalg::{det, inverse, mat_vec};
use crate::map::ParametricMap;
use crate::num::{linear_fit, ln, median, norm, sqrt, trim_central};

/// Relative agreement demanded of successive Richardson extrapolants.
pub const RICHARDSON_TOL: f64 = 1e-6;

/// `(g(t) − g(−t)) / 2t` at `t = h, h/2, h/4`, extrapolated twice.
/// Returns the final extrapolant and the gap between the last two.
fn richardson<G: FnMut(f64) -> f64>(mut g: G, h: f64) -> (f64, f64) {
    let d: Vec<f64> = [h, h / 2.0, h / 4.0].iter().map(|&t| (g(t) - g(-t)) / (2.0 * t)).collect();
    let r1 = (4.0 * d[1] - d[0]) / 3.0;
    let r2 = (4.0 * d[2] - d[1]) / 3.0;
    ((16.0 * r2 - r1) / 15.0, (r2 - r1).abs())
}

/// Derivative of `t ↦ f(x + t v)` at `t = 0` from central differences at
/// steps `h, h/2, h/4` with Richardson extrapolation.
///
/// Fails with [`Error::NoLimit`] when the extrapolants disagree by more than
/// `1e-6·(1 + |value|)`.
pub fn directional_derivative<F: ScalarField + ?Sized>(f: &F, x: &[f64], v: &[f64], h: f64) -> Result<f64> {
    if x.len() != v.len() {
        return Err(Error::Dimension("point and direction differ in length".into()));
    }
    if v.iter().all(|c| *c == 0.0) {
        return Err(Error::InvalidInput("direction must be nonzero".into()));
    }
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step must be > 0, got {h}")));
    }
    let mut y = vec![0.0; x.len()];
    let (value, gap) = richardson(
        |t| {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = x[i] + t * v[i];
            }
            f.value(&y)
        },
        h,
    );
    if !value.is_finite() {
        return Err(Error::OutsideDomain("difference stencil left the domain of f".into()));
    }
    if gap > RICHARDSON_TOL * (1.0 + value.abs()) {
        return Err(Error::NoLimit(format!("difference quotients do not settle (gap {gap:.3e})")));
    }
    Ok(value)
}

/// Central differences inside, second-order one-sided differences on the
/// faces. Every extent must be at least 3.
pub fn gradient_fd(f: &GridFunction) -> Result<VectorField> {
    let lat = f.lattice();
    if lat.dims().iter().any(|&d| d < 3) {
        return Err(Error::InvalidInput("gradient needs at least 3 samples per axis".into()));
    }
    let h = lat.spacing();
    let strides = lat.strides();
    let vals = f.values();
    let mut comps = Vec::with_capacity(lat.ndim());
    for (a, &s) in strides.iter().enumerate() {
        let d = lat.dims()[a];
        let mut g = vec![0.0; lat.len()];
        for (flat, out) in g.iter_mut().enumerate() {
            let i = (flat / s) % d;
            *out = if i == 0 {
                (-3.0 * vals[flat] + 4.0 * vals[flat + s] - vals[flat + 2 * s]) / (2.0 * h)
            } else if i == d - 1 {
                (3.0 * vals[flat] - 4.0 * vals[flat - s] + vals[flat - 2 * s]) / (2.0 * h)
            } else {
                (vals[flat + s] - vals[flat - s]) / (2.0 * h)
            };
        }
        comps.push(g);
    }
    VectorField::new(lat.clone(), comps)
}

/// Finite-difference Jacobian of a map at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianEstimate {
    /// `n×k`, row-major.
    pub matrix: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    /// `det` of the matrix when `k = n`.
    pub det: Option<f64>,
}

/// Column `j` is the extrapolated central difference of `Φ` along `e_j`
/// with base step `step`.
pub fn jacobian_fd_step(phi: &ParametricMap, x: &[f64], step: f64) -> Result<JacobianEstimate> {
    let (k, n) = (phi.k(), phi.n());
    if x.len() != k {
        return Err(Error::Dimension(format!("point has {} coordinates, map expects {k}", x.len())));
    }
    if !(step > 0.0) {
        return Err(Error::Domain("step must be > 0".into()));
    }
    let mut matrix = vec![0.0; n * k];
    let mut y = x.to_vec();
    for j in 0..k {
        let samples: Vec<(Vec<f64>, Vec<f64>)> = [step, step / 2.0, step / 4.0]
            .iter()
            .map(|&t| {
                y[j] = x[j] + t;
                let plus = phi.eval(&y);
                y[j] = x[j] - t;
                let minus = phi.eval(&y);
                y[j] = x[j];
                (plus, minus)
            })
            .collect();
        if samples.iter().any(|(p, m)| p.len() != n || m.len() != n) {
            return Err(Error::Dimension(format!("map '{}' returned the wrong length", phi.name())));
        }
        for i in 0..n {
            let d: Vec<f64> = samples
                .iter()
                .zip([step, step / 2.0, step / 4.0])
                .map(|((p, m), t)| (p[i] - m[i]) / (2.0 * t))
                .collect();
            let r1 = (4.0 * d[1] - d[0]) / 3.0;
            let r2 = (4.0 * d[2] - d[1]) / 3.0;
            matrix[i * k + j] = (16.0 * r2 - r1) / 15.0;
        }
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("map '{}' is not finite near the point", phi.name())));
    }
    let det = (k == n).then(|| det(&matrix, n));
    Ok(JacobianEstimate { matrix, rows: n, cols: k, det })
}

/// [`jacobian_fd_step`] with a step of `1e-3` times the parameter box size.
pub fn jacobian_fd(phi: &ParametricMap, x: &[f64]) -> Result<JacobianEstimate> {
    let size = phi.lo().iter().zip(phi.hi()).fold(0.0f64, |m, (a, b)| m.max(b - a));
    jacobian_fd_step(phi, x, 1e-3 * size.min(1.0))
}

/// Best affine fit `f(y) ≈ c + g·(y − x)` over the samples in `B(x, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Differential {
    pub gradient: Vec<f64>,
    /// Root-mean-square misfit of the affine model.
    pub residual: f64,
}

pub fn differential(f: &GridFunction, x: &[f64], r: f64) -> Result<Differential> {
    let lat = f.lattice();
    let n = lat.ndim();
    let cells = lat.cells_in_ball(x, r)?;
    if cells.len() < n + 1 {
        return Err(Error::Resolution { requested: r, minimum: lat.spacing() * 2.0 });
    }
    // normal equations in the variables (c, g), offsets scaled by r
    let m = n + 1;
    let mut ata = vec![0.0; m * m];
    let mut atb = vec![0.0; m];
    let mut rows = Vec::with_capacity(cells.len());
    for &c in &cells {
        let p = lat.point(c);
        let mut row = Vec::with_capacity(m);
        row.push(1.0);
        row.extend(p.iter().zip(x).map(|(a, b)| (a - b) / r));
        let v = f.values()[c];
        for i in 0..m {
            atb[i] += row[i] * v;
            for j in 0..m {
                ata[i * m + j] += row[i] * row[j];
            }
        }
        rows.push((row, v));
    }
    let inv = inverse(&ata, m).ok_or(Error::SingularMap)?;
    let coef = mat_vec(&inv, m, m, &atb);
    let sse: f64 = rows
        .iter()
        .map(|(row, v)| {
            let fit: f64 = row.iter().zip(&coef).map(|(a, b)| a * b).sum();
            (fit - v) * (fit - v)
        })
        .sum();
    Ok(Differential {
        gradient: coef[1..].iter().map(|g| g / r).collect(),
        residual: sqrt(sse / rows.len() as f64),
    })
}

/// Pointwise Lipschitz constant estimated over shrinking shells.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzEstimate {
    pub radii: Vec<f64>,
    /// `max |f(y) − f(x)| / ‖y − x‖` over `r/2 < ‖y − x‖ ≤ r`.
    pub per_radius: Vec<f64>,
    /// Limsup estimate; `+∞` when flagged unbounded.
    pub value: f64,
    pub unbounded: bool,
}

/// Shell ratios at the lattice sample nearest to `x`. The estimate is
/// flagged unbounded when the ratios grow strictly as the radius shrinks and
/// their log–log slope against `1/r` exceeds 1/4.
pub fn pointwise_lipschitz(f: &GridFunction, x: &[f64], radii: &[f64]) -> Result<LipschitzEstimate> {
    check_radii(radii)?;
    let lat = f.lattice();
    let centre = lat.nearest(x).ok_or_else(|| Error::OutsideDomain("point outside the lattice".into()))?;
    let x0 = lat.point(centre);
    let f0 = f.values()[centre];
    let mut per_radius = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut best: Option<f64> = None;
        for c in lat.cells_in_ball(&x0, r)? {
            let d = crate::num::distance(&lat.point(c), &x0);
            if d > 0.5 * r {
                let q = (f.values()[c] - f0).abs() / d;
                best = Some(best.map_or(q, |b: f64| b.max(q)));
            }
        }
        per_radius.push(best.ok_or(Error::Resolution { requested: r, minimum: 2.0 * lat.spacing() })?);
    }
    let increasing = per_radius.windows(2).all(|w| w[1] > w[0]);
    let slope = if radii.len() >= 2 && per_radius.iter().all(|q| *q > 0.0) {
        let xs: Vec<f64> = radii.iter().map(|r| -ln(*r)).collect();
        let ys: Vec<f64> = per_radius.iter().map(|q| ln(*q)).collect();
        linear_fit(&xs, &ys).map_or(0.0, |fit| fit.slope)
    } else {
        0.0
    };
    let unbounded = increasing && slope > 0.25;
    let tail = &per_radius[per_radius.len() / 2..];
    let value = if unbounded { f64::INFINITY } else { tail.iter().fold(0.0f64, |m, q| m.max(*q)) };
    Ok(LipschitzEstimate { radii: radii.to_vec(), per_radius, value, unbounded })
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidInput("radius list is empty".into()));
    }
    if radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidInput("radii must be positive and strictly decreasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityClass {
    /// Tail ratios above 0.95.
    DensityOne,
    /// Tail ratios below 0.05.
    DensityZero,
    Boundary,
    /// Tail ratios spread by more than 0.15.
    Oscillating,
}

impl DensityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            DensityClass::DensityOne => "density-1",
            DensityClass::DensityZero => "density-0",
            DensityClass::Boundary => "boundary",
            DensityClass::Oscillating => "oscillating",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Mean of the tail ratios; `None` when they oscillate.
    pub limit: Option<f64>,
    pub classification: DensityClass,
}

/// Smallest radius accepted by the density routines, in cells.
pub const MIN_RADIUS_CELLS: f64 = 3.0;

/// Fraction of the sample points in `B(x, r)` satisfying `pred`.
fn ball_ratios<P: Fn(usize) -> bool>(lat: &Lattice, x: &[f64], radii: &[f64], pred: P) -> Result<Vec<f64>> {
    check_radii(radii)?;
    let min = MIN_RADIUS_CELLS * lat.spacing();
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        if r < min * (1.0 - 1e-12) {
            return Err(Error::Resolution { requested: r, minimum: min });
        }
        let cells = lat.cells_in_ball(x, r)?;
        let hits = cells.iter().filter(|&&c| pred(c)).count();
        out.push(hits as f64 / cells.len() as f64);
    }
    Ok(out)
}

fn tail(ratios: &[f64]) -> &[f64] {
    &ratios[ratios.len() / 2..]
}

/// `|E ∩ B(x, r)| / |B(x, r)|` per radius, with both measures counted in
/// sample points, plus a tail-based limit and classification.
pub fn density(set: &RasterSet, x: &[f64], radii: &[f64]) -> Result<DensityReport> {
    let ratios = ball_ratios(set.lattice(), x, radii, |c| set.contains(c))?;
    let t = tail(&ratios);
    let (lo, hi) = t.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| (l.min(*r), h.max(*r)));
    let mean = t.iter().sum::<f64>() / t.len() as f64;
    let (limit, classification) = if hi - lo > 0.15 {
        (None, DensityClass::Oscillating)
    } else if mean > 0.95 {
        (Some(mean), DensityClass::DensityOne)
    } else if mean < 0.05 {
        (Some(mean), DensityClass::DensityZero)
    } else {
        (Some(mean), DensityClass::Boundary)
    };
    Ok(DensityReport { radii: radii.to_vec(), ratios, limit, classification })
}

fn has_density_zero<P: Fn(usize) -> bool>(lat: &Lattice, x: &[f64], radii: &[f64], pred: P) -> Result<bool> {
    let ratios = ball_ratios(lat, x, radii, pred)?;
    Ok(tail(&ratios).iter().all(|r| *r < 0.05))
}

/// Whether every set `{|f − ℓ| ≥ ε}`, `ε ∈ eps`, has density 0 at `x`.
pub fn is_approx_limit(f: &GridFunction, x: &[f64], candidate: f64, eps: &[f64], radii: &[f64]) -> Result<bool> {
    for &e in eps {
        if !(e > 0.0) {
            return Err(Error::Domain("epsilon must be > 0".into()));
        }
        let vals = f.values();
        if !has_density_zero(f.lattice(), x, radii, |c| (vals[c] - candidate).abs() >= e)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxLimitReport {
    /// Median of the samples in the smallest ball.
    pub candidate: f64,
    pub value: Option<f64>,
    pub upper: f64,
    pub lower: f64,
}

/// Approximate limit at `x`: the candidate when it passes every `ε`,
/// otherwise decided by the approximate limsup and liminf found by
/// bisection on thresholds.
pub fn approx_limit(f: &GridFunction, x: &[f64], eps: &[f64], radii: &[f64]) -> Result<ApproxLimitReport> {
    if eps.is_empty() {
        return Err(Error::InvalidInput("epsilon list is empty".into()));
    }
    let lat = f.lattice();
    let vals = f.values();
    check_radii(radii)?;
    let smallest = radii[radii.len() - 1];
    let near: Vec<f64> = lat.cells_in_ball(x, smallest)?.iter().map(|&c| vals[c]).collect();
    let candidate = median(&near);
    let big: Vec<f64> = lat.cells_in_ball(x, radii[0])?.iter().map(|&c| vals[c]).collect();
    let (lo, hi) = big.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    let tol = eps.iter().fold(f64::INFINITY, |m, e| m.min(*e)) / 4.0;

    // {f > t} gets thinner as t grows; find the first t where it has density 0.
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let t = 0.5 * (a + b);
        if has_density_zero(lat, x, radii, |c| vals[c] > t)? {
            b = t;
        } else {
            a = t;
        }
    }
    let upper = b;
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let t = 0.5 * (a + b);
        if has_density_zero(lat, x, radii, |c| vals[c] < t)? {
            a = t;
        } else {
            b = t;
        }
    }
    let lower = a;

    let value = if is_approx_limit(f, x, candidate, eps, radii)? {
        Some(candidate)
    } else if upper - lower <= 4.0 * tol {
        Some(0.5 * (upper + lower))
    } else {
        None
    };
    Ok(ApproxLimitReport { candidate, value, upper, lower })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LebesguePointReport {
    pub radii: Vec<f64>,
    /// Ball averages of `|f − f(x)|`.
    pub averages: Vec<f64>,
    pub is_lebesgue: bool,
}

/// `f(x)` is the sample of the cell containing `x`. The point is accepted
/// when the last average is at most `max(1e-10, first/4)`.
pub fn lebesgue_point_check(f: &GridFunction, x: &[f64], radii: &[f64]) -> Result<LebesguePointReport> {
    check_radii(radii)?;
    let lat = f.lattice();
    let centre = lat.nearest(x).ok_or_else(|| Error::OutsideDomain("point outside the lattice".into()))?;
    let fx = f.values()[centre];
    let mut averages = Vec::with_capacity(radii.len());
    for &r in radii {
        let cells = lat.cells_in_ball(x, r)?;
        if cells.is_empty() {
            return Err(Error::Resolution { requested: r, minimum: lat.spacing() });
        }
        let s: f64 = cells.iter().map(|&c| (f.values()[c] - fx).abs()).sum();
        averages.push(s / cells.len() as f64);
    }
    let last = averages[averages.len() - 1];
    let is_lebesgue = last <= (0.25 * averages[0]).max(1e-10);
    Ok(LebesguePointReport { radii: radii.to_vec(), averages, is_lebesgue })
}

/// Samples per side used by [`approx_partials`].
pub const PARTIAL_REACH: usize = 8;

/// Per axis: the median of the central 80% of all pairwise difference
/// quotients along the lattice line through the sample nearest to `x`,
/// within `PARTIAL_REACH` cells on each side.
pub fn approx_partials(f: &GridFunction, x: &[f64]) -> Result<Vec<f64>> {
    let lat = f.lattice();
    let idx = lat.locate(x).ok_or_else(|| Error::OutsideDomain("point outside the lattice".into()))?;
    let h = lat.spacing();
    let strides = lat.strides();
    let centre = lat.index(&idx);
    let mut out = Vec::with_capacity(lat.ndim());
    for a in 0..lat.ndim() {
        let back = idx[a].min(PARTIAL_REACH);
        let fwd = (lat.dims()[a] - 1 - idx[a]).min(PARTIAL_REACH);
        if back + fwd < 2 {
            return Err(Error::InvalidInput(format!("axis {a} has too few samples")));
        }
        let line: Vec<(f64, f64)> = (0..=back + fwd)
            .map(|j| {
                let flat = centre - back * strides[a] + j * strides[a];
                (j as f64 * h, f.values()[flat])
            })
            .collect();
        let mut q = Vec::with_capacity(line.len() * line.len() / 2);
        for i in 0..line.len() {
            for j in i + 1..line.len() {
                q.push((line[j].1 - line[i].1) / (line[j].0 - line[i].0));
            }
        }
        out.push(median(&trim_central(&q, 0.8)));
    }
    Ok(out)
}

/// `‖v‖`-scaled directional derivative: `∂f/∂v` for unit `v`.
pub fn unit_directional_derivative<F: ScalarField + ?Sized>(f: &F, x: &[f64], v: &[f64], h: f64) -> Result<f64> {
    let l = norm(v);
    let u: Vec<f64> = v.iter().map(|c| c / l).collect();
    directional_derivative(f, x, &u, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_function_derivatives_are_exact() {
        let f = |x: &[f64]| 2.0 * x[0] - 3.0 * x[1];
        let d = directional_derivative(&f, &[0.3, 0.1], &[1.0, 2.0], 1e-2).unwrap();
        assert!((d + 4.0).abs() < 1e-12);
        assert!(directional_derivative(&f, &[0.0, 0.0], &[0.0, 0.0], 1e-2).is_err());
    }

    #[test]
    fn oscillation_has_no_derivative() {
        let f = |x: &[f64]| if x[0] == 0.0 { 0.0 } else { x[0] * crate::num::sin(ln(x[0].abs())) };
        let r = directional_derivative(&f, &[0.0], &[1.0], 1e-2);
        assert!(matches!(r, Err(Error::NoLimit(_))));
    }

    #[test]
    fn gradient_of_plane_is_constant() {
        let lat = Lattice::over_box(&[0.0, 0.0], &[1.0, 1.0], 0.1).unwrap();
        let f = GridFunction::from_fn(lat, |x| 1.0 + 0.5 * x[0] - 2.0 * x[1]).unwrap();
        let g = gradient_fd(&f).unwrap();
        assert!(g.components()[0].iter().all(|v| (v - 0.5).abs() < 1e-12));
        assert!(g.components()[1].iter().all(|v| (v + 2.0).abs() < 1e-12));
    }

    #[test]
    fn differential_recovers_plane() {
        let lat = Lattice::over_box(&[0.0, 0.0], &[1.0, 1.0], 0.05).unwrap();
        let f = GridFunction::from_fn(lat, |x| 3.0 * x[0] + x[1]).unwrap();
        let d = differential(&f, &[0.5, 0.5], 0.2).unwrap();
        assert!((d.gradient[0] - 3.0).abs() < 1e-10 && (d.gradient[1] - 1.0).abs() < 1e-10);
        assert!(d.residual < 1e-12);
    }

    #[test]
    fn radii_below_resolution_rejected() {
        let lat = Lattice::over_box(&[-1.0], &[1.0], 0.1).unwrap();
        let e = RasterSet::from_fn(lat, |x| x[0] >= 0.0);
        assert!(matches!(density(&e, &[0.0], &[0.5, 0.2]), Err(Error::Resolution { .. })));
    }
}
