//! Mollifiers, mollification, seeded test-function batteries, weak
//! derivatives and difference quotients.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, Lattice};
use crate::hausdorff::omega;
use crate::num::{composite_gauss, exp, powf, round, seeded_rng};
use crate::pointwise::gradient_fd;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `C(n) exp(1/(‖x‖² − 1))` inside the unit ball.
    Standard,
    /// `χ_B(0,1) / ω_n`.
    BallIndicator,
}

/// `φ_ε(x) = ε^{-n} φ(x/ε)` for one of the two kernel shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct MollifierKernel {
    pub kind: KernelKind,
    pub n: usize,
    pub eps: f64,
    /// Normalizing constant of the unscaled kernel.
    pub c_n: f64,
}

/// `∫_0^1 exp(1/(r² − 1)) r^{n−1} dr`.
fn radial_bump_moment(n: usize) -> f64 {
    composite_gauss(
        |r| if r < 1.0 { exp(1.0 / (r * r - 1.0)) * powf(r, (n - 1) as f64) } else { 0.0 },
        0.0,
        1.0,
        1,
        64,
    )
}

fn check_kernel_args(n: usize, eps: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::Dimension("kernel needs n >= 1".into()));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("epsilon must be > 0, got {eps}")));
    }
    Ok(())
}

impl MollifierKernel {
    /// Standard kernel with `C(n)` from 64-node radial Gauss–Legendre
    /// quadrature: `1/C(n) = n ω_n ∫_0^1 exp(1/(r²−1)) r^{n−1} dr`.
    pub fn standard(n: usize, eps: f64) -> Result<Self> {
        check_kernel_args(n, eps)?;
        let mass = n as f64 * omega(n as f64)? * radial_bump_moment(n);
        Ok(MollifierKernel { kind: KernelKind::Standard, n, eps, c_n: 1.0 / mass })
    }

    pub fn ball_indicator(n: usize, eps: f64) -> Result<Self> {
        check_kernel_args(n, eps)?;
        Ok(MollifierKernel { kind: KernelKind::BallIndicator, n, eps, c_n: 1.0 / omega(n as f64)? })
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        check_kernel_args(self.n, eps)?;
        Ok(MollifierKernel { eps, ..self.clone() })
    }

    /// The unscaled kernel `φ`.
    pub fn unscaled(&self, x: &[f64]) -> f64 {
        let s: f64 = x.iter().map(|v| v * v).sum();
        if s >= 1.0 {
            return 0.0;
        }
        match self.kind {
            KernelKind::Standard => self.c_n * exp(1.0 / (s - 1.0)),
            KernelKind::BallIndicator => self.c_n,
        }
    }

    /// `φ_ε(x)`.
    pub fn value(&self, x: &[f64]) -> f64 {
        let y: Vec<f64> = x.iter().map(|v| v / self.eps).collect();
        self.unscaled(&y) / powf(self.eps, self.n as f64)
    }

    /// Offsets (in cells) and weights of the discrete kernel at spacing `h`,
    /// in storage order. Weights are renormalized to sum to one.
    pub fn stencil(&self, h: f64) -> Result<Stencil> {
        let minimum = 2.0 * h;
        if self.eps < minimum * (1.0 - 1e-12) {
            return Err(Error::Resolution { requested: self.eps, minimum });
        }
        let reach = (self.eps / h) as i64;
        let n = self.n;
        let side = (2 * reach + 1) as usize;
        let total = side.pow(n as u32);
        let mut offsets = Vec::new();
        let mut weights = Vec::new();
        let mut x = vec![0.0; n];
        let mut off = vec![0i64; n];
        for flat in 0..total {
            let mut rest = flat;
            for a in (0..n).rev() {
                off[a] = (rest % side) as i64 - reach;
                rest /= side;
                x[a] = off[a] as f64 * h;
            }
            let w = self.value(&x);
            if w > 0.0 {
                offsets.push(off.clone());
                weights.push(w);
            }
        }
        let sum: f64 = crate::num::pairwise_sum(&weights);
        if !(sum > 0.0) {
            return Err(Error::Resolution { requested: self.eps, minimum });
        }
        for w in &mut weights {
            *w /= sum;
        }
        Ok(Stencil { offsets, weights })
    }
}

/// Discrete convolution kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    pub offsets: Vec<Vec<i64>>,
    pub weights: Vec<f64>,
}

/// Number of cells stripped from each face so that every remaining sample
/// is farther than `eps` from the boundary.
fn interior_margin(h: f64, eps: f64) -> usize {
    // first i with (i + 1/2) h > eps
    let m = (eps / h - 0.5).max(0.0);
    let mut i = m as usize;
    while (i as f64 + 0.5) * h <= eps * (1.0 + 1e-12) {
        i += 1;
    }
    i
}

/// Window of the lattice at distance `> eps` from its boundary.
pub fn shrunken_lattice(lat: &Lattice, eps: f64) -> Result<(Lattice, Vec<usize>)> {
    let m = interior_margin(lat.spacing(), eps);
    let n = lat.ndim();
    if lat.dims().iter().any(|&d| d <= 2 * m) {
        return Err(Error::Domain(format!("no samples farther than {eps} from the boundary")));
    }
    let offset = vec![m; n];
    let dims: Vec<usize> = lat.dims().iter().map(|d| d - 2 * m).collect();
    Ok((lat.window(&offset, &dims)?, offset))
}

/// `f_ε = f * φ_ε` on `Ω_ε`, by discrete convolution with fixed summation
/// order per output sample.
pub fn mollify(f: &GridFunction, kernel: &MollifierKernel) -> Result<GridFunction> {
    let lat = f.lattice();
    if kernel.n != lat.ndim() {
        return Err(Error::Dimension(format!("kernel is {}-dimensional, grid is {}", kernel.n, lat.ndim())));
    }
    let stencil = kernel.stencil(lat.spacing())?;
    let (out_lat, offset) = shrunken_lattice(lat, kernel.eps)?;
    let strides = lat.strides();
    let rel: Vec<i64> = stencil
        .offsets
        .iter()
        .map(|o| o.iter().zip(&strides).map(|(d, s)| d * *s as i64).sum())
        .collect();
    let vals = f.values();
    let mut out = Vec::with_capacity(out_lat.len());
    let mut idx = vec![0usize; lat.ndim()];
    for flat in 0..out_lat.len() {
        let local = out_lat.unravel(flat);
        for a in 0..idx.len() {
            idx[a] = local[a] + offset[a];
        }
        let centre = lat.index(&idx) as i64;
        // y = x − offset, the kernel being even
        let mut acc = 0.0;
        for (w, r) in stencil.weights.iter().zip(&rel) {
            acc += w * vals[(centre - r) as usize];
        }
        out.push(acc);
    }
    GridFunction::new(out_lat, out)
}

/// `D_i^s f(x) = (f(x − s e_i) − f(x)) / s` wherever `x − s e_i` is a
/// sample. `step` must be a nonzero integer multiple of the spacing.
pub fn difference_quotient(f: &GridFunction, axis: usize, step: f64) -> Result<GridFunction> {
    let lat = f.lattice();
    if axis >= lat.ndim() {
        return Err(Error::Dimension(format!("axis {axis} out of range")));
    }
    let h = lat.spacing();
    let m = round(step / h);
    if m == 0.0 || (step / h - m).abs() > 1e-9 * m.abs() {
        return Err(Error::InvalidInput(format!("step {step} is not a nonzero multiple of {h}")));
    }
    let shift = m.abs() as usize;
    if shift >= lat.dims()[axis] {
        return Err(Error::Domain("step exceeds the lattice".into()));
    }
    let mut offset = vec![0; lat.ndim()];
    let mut dims = lat.dims().to_vec();
    dims[axis] -= shift;
    if m > 0.0 {
        offset[axis] = shift;
    }
    let sub = lat.window(&offset, &dims)?;
    let stride = lat.strides()[axis];
    let mut idx = vec![0; lat.ndim()];
    let mut out = Vec::with_capacity(sub.len());
    for flat in 0..sub.len() {
        let local = sub.unravel(flat);
        for a in 0..idx.len() {
            idx[a] = local[a] + offset[a];
        }
        let here = lat.index(&idx);
        let there = if m > 0.0 { here - shift * stride } else { here + shift * stride };
        out.push((f.values()[there] - f.values()[here]) / (m * h));
    }
    GridFunction::new(sub, out)
}

/// Smooth bump `exp(1/(‖(x − c)/r‖² − 1))`, supported in `B(c, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Bump {
    fn scaled_sq(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>() / (self.radius * self.radius)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let s = self.scaled_sq(x);
        if s >= 1.0 {
            0.0
        } else {
            exp(1.0 / (s - 1.0))
        }
    }

    /// `∂φ/∂x_i`.
    pub fn partial(&self, x: &[f64], axis: usize) -> f64 {
        let s = self.scaled_sq(x);
        if s >= 1.0 {
            return 0.0;
        }
        let d = s - 1.0;
        -exp(1.0 / d) / (d * d) * 2.0 * (x[axis] - self.center[axis]) / (self.radius * self.radius)
    }
}

/// Seeded family of bumps standing in for `C_c^∞(Ω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunctionBattery {
    pub bumps: Vec<Bump>,
    pub seed: u64,
}

/// Members of the default battery.
pub const DEFAULT_BATTERY_SIZE: usize = 12;

impl TestFunctionBattery {
    pub fn new(centers: Vec<Vec<f64>>, radii: Vec<f64>, seed: u64) -> Result<Self> {
        if centers.len() != radii.len() {
            return Err(Error::Misaligned { expected: centers.len(), found: radii.len() });
        }
        if centers.is_empty() {
            return Err(Error::InvalidInput("battery is empty".into()));
        }
        let n = centers[0].len();
        if n == 0 || centers.iter().any(|c| c.len() != n) {
            return Err(Error::Dimension("battery centers differ in dimension".into()));
        }
        if radii.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::Domain("battery radii must be > 0".into()));
        }
        let bumps = centers.into_iter().zip(radii).map(|(center, radius)| Bump { center, radius }).collect();
        Ok(TestFunctionBattery { bumps, seed })
    }

    /// `count` bumps with radii in `[0.15, 0.45]·(shortest side)/2` and
    /// centers drawn so each support stays inside `[lo, hi]`.
    pub fn seeded(lo: &[f64], hi: &[f64], count: usize, seed: u64) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Dimension("battery box corners differ in length".into()));
        }
        let half = lo.iter().zip(hi).fold(f64::INFINITY, |m, (a, b)| m.min(b - a)) / 2.0;
        if !(half > 0.0) {
            return Err(Error::InvalidInput("battery box is empty".into()));
        }
        let mut rng = seeded_rng(seed);
        let mut centers = Vec::with_capacity(count);
        let mut radii = Vec::with_capacity(count);
        for _ in 0..count {
            let r = half * rng.gen_range(0.15..0.45);
            let c: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| rng.gen_range(a + r..b - r)).collect();
            centers.push(c);
            radii.push(r);
        }
        TestFunctionBattery::new(centers, radii, seed)
    }

    /// Default battery, with supports kept one cell clear of the faces.
    pub fn for_lattice(lat: &Lattice, seed: u64) -> Result<Self> {
        let h = lat.spacing();
        let lo: Vec<f64> = (0..lat.ndim()).map(|a| lat.lower(a) + h).collect();
        let hi: Vec<f64> = (0..lat.ndim()).map(|a| lat.upper(a) - h).collect();
        TestFunctionBattery::seeded(&lo, &hi, DEFAULT_BATTERY_SIZE, seed)
    }

    pub fn len(&self) -> usize {
        self.bumps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.bumps.is_empty()
    }

    /// Fails when a support leaves the lattice box.
    pub fn check_inside(&self, lat: &Lattice) -> Result<()> {
        for (k, b) in self.bumps.iter().enumerate() {
            if b.center.len() != lat.ndim() {
                return Err(Error::Dimension("battery and lattice differ in dimension".into()));
            }
            if lat.distance_to_boundary(&b.center) < b.radius {
                return Err(Error::OutsideDomain(format!("support of test function {k} escapes the domain")));
            }
        }
        Ok(())
    }
}

/// `∫ φ g` and `−∫ (∂φ/∂x_i) f` per battery member, by midpoint quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakPairing {
    pub with_candidate: Vec<f64>,
    pub with_function: Vec<f64>,
}

impl WeakPairing {
    pub fn residuals(&self) -> Vec<f64> {
        self.with_candidate.iter().zip(&self.with_function).map(|(a, b)| (a - b).abs()).collect()
    }
    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().fold(0.0f64, |m, r| m.max(*r))
    }
}

/// `−∫ (∂φ/∂x_i) f` for every battery member.
pub fn distributional_derivative(f: &GridFunction, axis: usize, battery: &TestFunctionBattery) -> Result<Vec<f64>> {
    let lat = f.lattice();
    if axis >= lat.ndim() {
        return Err(Error::Dimension(format!("axis {axis} out of range")));
    }
    battery.check_inside(lat)?;
    let pts: Vec<Vec<f64>> = (0..lat.len()).map(|c| lat.point(c)).collect();
    Ok(battery
        .bumps
        .iter()
        .map(|b| {
            let terms: Vec<f64> = pts.iter().zip(f.values()).map(|(p, v)| b.partial(p, axis) * v).collect();
            -crate::num::pairwise_sum(&terms) * lat.cell_volume()
        })
        .collect())
}

fn pair_with(g: &GridFunction, battery: &TestFunctionBattery) -> Vec<f64> {
    let lat = g.lattice();
    battery
        .bumps
        .iter()
        .map(|b| {
            let terms: Vec<f64> = (0..lat.len()).map(|c| b.value(&lat.point(c)) * g.values()[c]).collect();
            crate::num::pairwise_sum(&terms) * lat.cell_volume()
        })
        .collect()
}

pub fn weak_pairing(
    f: &GridFunction,
    g: &GridFunction,
    axis: usize,
    battery: &TestFunctionBattery,
) -> Result<WeakPairing> {
    if !f.lattice().same_as(g.lattice()) {
        return Err(Error::LatticeMismatch);
    }
    let with_function = distributional_derivative(f, axis, battery)?;
    Ok(WeakPairing { with_candidate: pair_with(g, battery), with_function })
}

/// `max_φ |∫ φ g + ∫ (∂φ/∂x_i) f|` over the battery.
pub fn weak_derivative_residual(
    f: &GridFunction,
    g: &GridFunction,
    axis: usize,
    battery: &TestFunctionBattery,
) -> Result<f64> {
    Ok(weak_pairing(f, g, axis, battery)?.max_residual())
}

/// Outcome of the search for a weak partial derivative on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakDerivativeVerdict {
    /// Finite-difference derivative with the jump cells zeroed.
    pub candidate: GridFunction,
    pub residual: f64,
    /// Residual of a smooth reference of the same amplitude.
    pub floor: f64,
    pub exists: bool,
    pub jump_cells: usize,
}

/// A residual above this multiple of the floor means no weak derivative.
pub const WEAK_FLOOR_FACTOR: f64 = 10.0;

/// Increments along `axis` exceeding this multiple of the median increment
/// are treated as jumps.
const JUMP_FACTOR: f64 = 8.0;

/// Builds the best grid candidate for `∂f/∂x_i` and compares its residual
/// with that of a smooth reference function on the same lattice.
pub fn weak_derivative_verdict(
    f: &GridFunction,
    axis: usize,
    battery: &TestFunctionBattery,
) -> Result<WeakDerivativeVerdict> {
    let lat = f.lattice();
    if axis >= lat.ndim() {
        return Err(Error::Dimension(format!("axis {axis} out of range")));
    }
    let grad = gradient_fd(f)?;
    let mut cand = grad.components()[axis].clone();
    let stride = lat.strides()[axis];
    let d = lat.dims()[axis];
    let vals = f.values();
    let incs: Vec<(usize, f64)> = (0..lat.len())
        .filter(|c| (c / stride) % d + 1 < d)
        .map(|c| (c, (vals[c + stride] - vals[c]).abs()))
        .collect();
    let med = crate::num::median(&incs.iter().map(|(_, v)| *v).collect::<Vec<_>>());
    let scale = f.sup_norm().max(f64::MIN_POSITIVE);
    let mut jump_cells = 0;
    for &(c, inc) in &incs {
        if inc > JUMP_FACTOR * med + 1e-12 * scale {
            cand[c] = 0.0;
            cand[c + stride] = 0.0;
            jump_cells += 1;
        }
    }
    let candidate = GridFunction::new(lat.clone(), cand)?;
    let residual = weak_derivative_residual(f, &candidate, axis, battery)?;

    let (lo, len) = (lat.lower(axis), lat.upper(axis) - lat.lower(axis));
    let w = 2.0 * core::f64::consts::PI / len;
    let reference = GridFunction::from_fn(lat.clone(), |x| scale * crate::num::sin(w * (x[axis] - lo)))?;
    let ref_grad = gradient_fd(&reference)?.component(axis);
    let floor = weak_derivative_residual(&reference, &ref_grad, axis, battery)?.max(1e-14 * scale);
    Ok(WeakDerivativeVerdict { candidate, residual, floor, exists: residual <= WEAK_FLOOR_FACTOR * floor, jump_cells })
}

/// `sup |∂_i(f_ε) − g_ε|` over the samples farther than `2ε` from the
/// boundary, with `∂_i` by [`gradient_fd`].
pub fn mollify_commutes_with_weak_derivative(
    f: &GridFunction,
    g: &GridFunction,
    axis: usize,
    kernel: &MollifierKernel,
) -> Result<f64> {
    if !f.lattice().same_as(g.lattice()) {
        return Err(Error::LatticeMismatch);
    }
    let fe = mollify(f, kernel)?;
    let ge = mollify(g, kernel)?;
    let dfe = gradient_fd(&fe)?.component(axis);
    // Ω_2ε inside Ω_ε
    let (inner, _) = shrunken_lattice(f.lattice(), 2.0 * kernel.eps)?;
    let mut worst = 0.0f64;
    for c in 0..inner.len() {
        let x = inner.point(c);
        let i = fe.lattice().nearest(&x).ok_or(Error::LatticeMismatch)?;
        worst = worst.max((dfe.values()[i] - ge.values()[i]).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_constant() {
        // ∫_{-1}^{1} exp(1/(x²−1)) dx ≈ 0.4439938161680794
        let k = MollifierKernel::standard(1, 1.0).unwrap();
        assert!((1.0 / k.c_n - 0.443_993_816_168_079_4).abs() < 1e-12);
    }

    #[test]
    fn under_resolved_kernel_rejected() {
        let lat = Lattice::over_box(&[0.0], &[1.0], 0.01).unwrap();
        let f = GridFunction::constant(lat, 1.0).unwrap();
        let k = MollifierKernel::standard(1, 0.015).unwrap();
        assert!(matches!(mollify(&f, &k), Err(Error::Resolution { .. })));
    }

    #[test]
    fn constant_is_reproduced() {
        let lat = Lattice::over_box(&[0.0, 0.0], &[1.0, 1.0], 0.02).unwrap();
        let f = GridFunction::constant(lat, 2.5).unwrap();
        let k = MollifierKernel::standard(2, 0.1).unwrap();
        let fe = mollify(&f, &k).unwrap();
        assert!(fe.values().iter().all(|v| (v - 2.5).abs() < 1e-14));
        // every output sample lies farther than ε from the boundary
        let l = fe.lattice();
        assert!((0..l.len()).all(|c| f.lattice().distance_to_boundary(&l.point(c)) > 0.1));
    }

    #[test]
    fn difference_quotient_sign_convention() {
        let lat = Lattice::over_box(&[0.0], &[1.0], 0.1).unwrap();
        let f = GridFunction::from_fn(lat, |x| 3.0 * x[0]).unwrap();
        let d = difference_quotient(&f, 0, 0.2).unwrap();
        assert_eq!(d.lattice().len(), 8);
        assert!(d.values().iter().all(|v| (v + 3.0).abs() < 1e-12));
        assert!(difference_quotient(&f, 0, 0.15).is_err());
    }

    #[test]
    fn escaping_support_rejected() {
        let lat = Lattice::over_box(&[0.0], &[1.0], 0.1).unwrap();
        let b = TestFunctionBattery::new(vec![vec![0.1]], vec![0.3], 0).unwrap();
        assert!(matches!(b.check_inside(&lat), Err(Error::OutsideDomain(_))));
    }
}
