//! `W^{1,p}` norms and the three embedding regimes: Gagliardo–Nirenberg–
//! Sobolev for `p < n`, cube Poincaré and BMO for `p = n`, Morrey for
//! `p > n`.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{lp_norm_of, GridFunction};
use crate::num::{powf, seeded_rng};
use crate::pointwise::gradient_fd;

#[derive(Debug, Clone, PartialEq)]
pub struct SobolevReport {
    pub p: f64,
    pub lp_norm: f64,
    /// `‖ ‖∇f‖ ‖_p` with the Euclidean norm of the gradient.
    pub grad_lp_norm: f64,
    /// `‖∂f/∂x_i‖_p` per axis.
    pub partial_norms: Vec<f64>,
    /// `‖f‖_p + Σ_i ‖∂f/∂x_i‖_p`.
    pub sobolev_norm: f64,
    /// `np/(n − p)` when `p < n`.
    pub p_star: Option<f64>,
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("exponent must be >= 1, got {p}")));
    }
    Ok(())
}

pub fn sobolev_norm(f: &GridFunction, p: f64) -> Result<SobolevReport> {
    check_p(p)?;
    let lat = f.lattice();
    let n = lat.ndim() as f64;
    let grad = gradient_fd(f)?;
    let w = lat.cell_volume();
    let partial_norms: Vec<f64> = grad.components().iter().map(|c| lp_norm_of(c, w, p)).collect();
    let lp_norm = f.lp_norm(p);
    Ok(SobolevReport {
        p,
        lp_norm,
        grad_lp_norm: lp_norm_of(&grad.norms(), w, p),
        sobolev_norm: lp_norm + partial_norms.iter().sum::<f64>(),
        partial_norms,
        p_star: (p < n).then(|| n * p / (n - p)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `p < n`
    Gns,
    /// `p = n`
    Bmo,
    /// `p > n`
    Morrey,
}

pub fn regime(n: usize, p: f64) -> Result<Regime> {
    check_p(p)?;
    let n = n as f64;
    Ok(if p < n {
        Regime::Gns
    } else if p == n {
        Regime::Bmo
    } else {
        Regime::Morrey
    })
}

/// Two sides of an inequality `lhs ≤ rhs` and the constant used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
}

impl InequalityCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

/// Largest `|f|` on the outermost layer of samples.
fn boundary_sup(f: &GridFunction) -> f64 {
    let lat = f.lattice();
    (0..lat.len())
        .filter(|&c| {
            let idx = lat.unravel(c);
            idx.iter().zip(lat.dims()).any(|(i, d)| *i == 0 || i + 1 == *d)
        })
        .fold(0.0f64, |m, c| m.max(f.values()[c].abs()))
}

/// `‖f‖_{p*} ≤ C(n,p) ‖∇f‖_p` with `C(n,1) = 1` and `C(n,p) = p(n−1)/(n−p)`.
pub fn gns_check(f: &GridFunction, p: f64) -> Result<InequalityCheck> {
    let n = f.lattice().ndim();
    if regime(n, p)? != Regime::Gns {
        return Err(Error::Regime { n, p, expected: "p < n (use the BMO or Morrey checks)" });
    }
    if boundary_sup(f) > 1e-12 * f.sup_norm().max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidInput("function does not vanish on the boundary of the box".into()));
    }
    let nf = n as f64;
    let p_star = nf * p / (nf - p);
    let constant = if p == 1.0 { 1.0 } else { p * (nf - 1.0) / (nf - p) };
    let grad = gradient_fd(f)?;
    let rhs = constant * lp_norm_of(&grad.norms(), f.lattice().cell_volume(), p);
    Ok(InequalityCheck { lhs: f.lp_norm(p_star), rhs, constant })
}

/// Closed cube `[lo, lo + side]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cube {
    pub lo: Vec<f64>,
    pub side: f64,
}

impl Cube {
    /// Samples whose centers lie in the cube; fails if the cube leaves the
    /// lattice box.
    fn cells(&self, f: &GridFunction) -> Result<Vec<usize>> {
        let lat = f.lattice();
        if self.lo.len() != lat.ndim() {
            return Err(Error::Dimension("cube and lattice differ in dimension".into()));
        }
        let h = lat.spacing();
        let slack = 1e-9 * h;
        let mut lo = Vec::with_capacity(lat.ndim());
        let mut hi = Vec::with_capacity(lat.ndim());
        for a in 0..lat.ndim() {
            if self.lo[a] < lat.lower(a) - slack || self.lo[a] + self.side > lat.upper(a) + slack {
                return Err(Error::OutsideDomain("cube escapes the domain".into()));
            }
            let first = crate::num::ceil((self.lo[a] - lat.origin()[a]) / h - 1e-9).max(0.0) as usize;
            let last = crate::num::floor((self.lo[a] + self.side - lat.origin()[a]) / h + 1e-9);
            if last < first as f64 {
                return Err(Error::Resolution { requested: self.side, minimum: h });
            }
            lo.push(first);
            hi.push((last as usize).min(lat.dims()[a] - 1));
        }
        let mut out = Vec::new();
        let mut idx = lo.clone();
        loop {
            out.push(lat.index(&idx));
            let mut a = idx.len();
            loop {
                if a == 0 {
                    return Ok(out);
                }
                a -= 1;
                if idx[a] < hi[a] {
                    idx[a] += 1;
                    let end = idx.len();
                    idx[a + 1..].copy_from_slice(&lo[a + 1..end]);
                    break;
                }
            }
        }
    }
}

/// `(∫_Q |f − f_Q|^p)^{1/p} ≤ (n^{p+1})^{1/p} ℓ (∫_Q ‖∇f‖^p)^{1/p}`.
pub fn poincare_cube_check(f: &GridFunction, cube: &Cube, p: f64) -> Result<InequalityCheck> {
    check_p(p)?;
    let cells = cube.cells(f)?;
    let vals = f.values();
    let mean = cube_mean(vals, &cells);
    let w = f.lattice().cell_volume();
    let dev: Vec<f64> = cells.iter().map(|&c| vals[c] - mean).collect();
    let norms = gradient_fd(f)?.norms();
    let grad: Vec<f64> = cells.iter().map(|&c| norms[c]).collect();
    let n = f.lattice().ndim() as f64;
    let constant = powf(powf(n, p + 1.0), 1.0 / p);
    Ok(InequalityCheck { lhs: lp_norm_of(&dev, w, p), rhs: constant * cube.side * lp_norm_of(&grad, w, p), constant })
}

/// Average of the samples, taken relative to the first one so constant data
/// gives its value back exactly.
fn cube_mean(vals: &[f64], cells: &[usize]) -> f64 {
    let base = vals[cells[0]];
    base + cells.iter().map(|&c| vals[c] - base).sum::<f64>() / cells.len() as f64
}

/// Mean oscillation `(1/|Q|) ∫_Q |f − f_Q|`, maximized over the cubes.
pub fn bmo_seminorm(f: &GridFunction, cubes: &[Cube]) -> Result<f64> {
    let vals = f.values();
    let mut worst = 0.0f64;
    for q in cubes {
        let cells = q.cells(f)?;
        let mean = cube_mean(vals, &cells);
        let osc = cells.iter().map(|&c| (vals[c] - mean).abs()).sum::<f64>() / cells.len() as f64;
        worst = worst.max(osc);
    }
    Ok(worst)
}

/// Dyadic subcubes of `[lo, lo + side]`, one list per generation
/// `0..generations`.
pub fn dyadic_cubes(lo: &[f64], side: f64, generations: usize) -> Vec<Vec<Cube>> {
    let n = lo.len();
    (0..generations)
        .map(|g| {
            let per_axis = 1usize << g;
            let s = side / per_axis as f64;
            let total = per_axis.pow(n as u32);
            (0..total)
                .map(|k| {
                    let mut rest = k;
                    let mut corner = Vec::with_capacity(n);
                    for &l in lo {
                        corner.push(l + (rest % per_axis) as f64 * s);
                        rest /= per_axis;
                    }
                    Cube { lo: corner, side: s }
                })
                .collect()
        })
        .collect()
}

/// BMO seminorm restricted to each dyadic generation of the lattice box.
pub fn bmo_by_generation(f: &GridFunction, generations: usize) -> Result<Vec<f64>> {
    let lat = f.lattice();
    let lo: Vec<f64> = (0..lat.ndim()).map(|a| lat.lower(a)).collect();
    let side = (0..lat.ndim()).map(|a| lat.upper(a) - lat.lower(a)).fold(f64::INFINITY, f64::min);
    dyadic_cubes(&lo, side, generations).iter().map(|g| bmo_seminorm(f, g)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorreyCheck {
    /// Largest `|f(z) − f(y)| / (C ‖z − y‖^{1−n/p} ‖∇f‖_p)` over the pairs.
    pub worst_ratio: f64,
    pub constant: f64,
    pub pairs: usize,
}

/// Morrey's estimate with `C = 2np/(p − n)` over `pairs` seeded sample
/// pairs.
pub fn morrey_check(f: &GridFunction, p: f64, pairs: usize, seed: u64) -> Result<MorreyCheck> {
    let lat = f.lattice();
    let n = lat.ndim();
    if regime(n, p)? != Regime::Morrey {
        return Err(Error::Regime { n, p, expected: "p > n" });
    }
    let nf = n as f64;
    let constant = 2.0 * nf * p / (p - nf);
    let grad = lp_norm_of(&gradient_fd(f)?.norms(), lat.cell_volume(), p);
    let mut rng = seeded_rng(seed);
    let mut worst = 0.0f64;
    let mut used = 0;
    for _ in 0..pairs {
        let a = rng.gen_range(0..lat.len());
        let b = rng.gen_range(0..lat.len());
        if a == b {
            continue;
        }
        used += 1;
        let diff = (f.values()[a] - f.values()[b]).abs();
        if diff == 0.0 {
            continue;
        }
        let r = crate::num::distance(&lat.point(a), &lat.point(b));
        let bound = constant * powf(r, 1.0 - nf / p) * grad;
        worst = worst.max(if bound > 0.0 { diff / bound } else { f64::INFINITY });
    }
    Ok(MorreyCheck { worst_ratio: worst, constant, pairs: used })
}
