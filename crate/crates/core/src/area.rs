//! Area formulas: the Jacobian of linear maps, Cauchy–Binet, lengths and
//! areas of parametrized curves, graphs and surfaces, multiplicity
//! functions and change of variables.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::check::Comparison;
use crate::error::{Error, Result};
use crate::grid::{GridFunction, RasterSet, ScalarField};
use crate::hausdorff::lebesgue_measure;
use crate::linalg::{det, inverse, mat_vec, qr_r_diagonal};
use crate::map::ParametricMap;
use crate::num::{combinations, composite_gauss, distance, norm, pairwise_sum, sqrt};
use crate::pointwise::{gradient_fd, jacobian_fd_step};

/// `T: R^k → R^n`, `n×k` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    matrix: Vec<f64>,
    n: usize,
    k: usize,
}

impl LinearMap {
    pub fn new(matrix: Vec<f64>, n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Dimension(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
        }
        if matrix.len() != n * k {
            return Err(Error::Misaligned { expected: n * k, found: matrix.len() });
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(LinearMap { matrix, n, k })
    }

    /// From `k` column vectors of length `n`.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let k = cols.len();
        let n = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::Dimension("columns differ in length".into()));
        }
        let mut m = vec![0.0; n * k];
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m[i * k + j] = c[i];
            }
        }
        LinearMap::new(m, n, k)
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }

    /// `U T` for an `n×n` matrix `U`.
    pub fn left_multiply(&self, u: &[f64]) -> Result<LinearMap> {
        if u.len() != self.n * self.n {
            return Err(Error::Misaligned { expected: self.n * self.n, found: u.len() });
        }
        LinearMap::new(crate::linalg::mat_mul(u, &self.matrix, self.n, self.n, self.k), self.n, self.k)
    }
}

/// `J(T) = √det(TᵀT)`, as `|Π R_ii|` from a Householder QR of `T`.
pub fn j_linear(t: &LinearMap) -> f64 {
    qr_r_diagonal(&t.matrix, t.n, t.k).iter().fold(1.0, |p, d| p * d).abs()
}

/// `√Σ_λ det(M_λ)²` over all `k`-row selections `λ`.
pub fn cauchy_binet(t: &LinearMap) -> f64 {
    let k = t.k;
    let mut squares = Vec::new();
    let mut minor = vec![0.0; k * k];
    for rows in combinations(t.n, k) {
        for (r, &i) in rows.iter().enumerate() {
            minor[r * k..(r + 1) * k].copy_from_slice(&t.matrix[i * k..(i + 1) * k]);
        }
        let d = det(&minor, k);
        squares.push(d * d);
    }
    sqrt(pairwise_sum(&squares))
}

/// `J(T) Λ^k(E)`.
pub fn image_measure_linear(t: &LinearMap, set: &RasterSet) -> Result<f64> {
    if set.lattice().ndim() != t.k {
        return Err(Error::Dimension("raster dimension differs from the domain of T".into()));
    }
    let j = j_linear(t);
    if j == 0.0 {
        return Err(Error::SingularMap);
    }
    Ok(j * lebesgue_measure(set))
}

/// `J(Φ)(x)` from the analytic Jacobian, or finite differences with base
/// step `step` when none is supplied.
pub fn jacobian_factor(phi: &ParametricMap, x: &[f64], step: f64) -> Result<f64> {
    let m = match phi.analytic_jacobian(x) {
        Some(m) => m,
        None => jacobian_fd_step(phi, x, step)?.matrix,
    };
    if m.len() != phi.n() * phi.k() {
        return Err(Error::Misaligned { expected: phi.n() * phi.k(), found: m.len() });
    }
    Ok(j_linear(&LinearMap::new(m, phi.n(), phi.k())?))
}

/// Panels of the default curve quadrature.
pub const CURVE_PANELS: usize = 128;
/// Gauss nodes per panel.
pub const CURVE_ORDER: usize = 8;

/// `∫_a^b ‖Φ'(t)‖ dt` by composite Gauss–Legendre with `panels × order`
/// nodes.
pub fn curve_length(phi: &ParametricMap, panels: usize, order: usize) -> Result<f64> {
    if phi.k() != 1 {
        return Err(Error::Dimension("curve length needs a one-parameter map".into()));
    }
    if !phi.is_injective() {
        return Err(Error::InvalidInput(format!("map '{}' is not flagged injective", phi.name())));
    }
    let (a, b) = (phi.lo()[0], phi.hi()[0]);
    let step = 1e-4 * (b - a);
    let mut failure = None;
    let len = composite_gauss(
        |t| match jacobian_factor(phi, &[t], step) {
            Ok(j) => j,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        a,
        b,
        panels.max(1),
        order.max(1),
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(len),
    }
}

/// `Σ h^k √(1 + ‖∇f‖²)` over all samples.
pub fn graph_area(f: &GridFunction) -> Result<f64> {
    let set = RasterSet::full(f.lattice().clone());
    graph_area_on(f, &set)
}

/// `Σ_{x ∈ E} h^k √(1 + ‖∇f(x)‖²)`.
pub fn graph_area_on(f: &GridFunction, set: &RasterSet) -> Result<f64> {
    if !f.lattice().same_as(set.lattice()) {
        return Err(Error::LatticeMismatch);
    }
    let norms = gradient_fd(f)?.norms();
    let terms: Vec<f64> = set.members().map(|c| sqrt(1.0 + norms[c] * norms[c])).collect();
    Ok(pairwise_sum(&terms) * f.lattice().cell_volume())
}

/// Midpoint sum of `g` over the parameter box split into `cells[a]`
/// intervals along axis `a`.
fn box_midpoint<G: FnMut(&[f64]) -> Result<f64>>(phi: &ParametricMap, cells: &[usize], mut g: G) -> Result<f64> {
    let k = phi.k();
    if cells.len() != k || cells.contains(&0) {
        return Err(Error::InvalidInput(format!("need {k} positive cell counts")));
    }
    let widths: Vec<f64> = (0..k).map(|a| (phi.hi()[a] - phi.lo()[a]) / cells[a] as f64).collect();
    let total: usize = cells.iter().product();
    let mut terms = Vec::with_capacity(total);
    let mut x = vec![0.0; k];
    for s in 0..total {
        let mut rest = s;
        for a in (0..k).rev() {
            x[a] = phi.lo()[a] + ((rest % cells[a]) as f64 + 0.5) * widths[a];
            rest /= cells[a];
        }
        terms.push(g(&x)?);
    }
    Ok(pairwise_sum(&terms) * widths.iter().product::<f64>())
}

/// `(4 S_{h/2} − S_h)/3` for the box midpoint sums of `g`.
fn box_richardson<G: FnMut(&[f64], f64) -> Result<f64>>(phi: &ParametricMap, cells: &[usize], mut g: G) -> Result<f64> {
    let fine: Vec<usize> = cells.iter().map(|c| 2 * c).collect();
    let h = (phi.hi()[0] - phi.lo()[0]) / cells[0].max(1) as f64;
    let coarse = box_midpoint(phi, cells, |x| g(x, h / 4.0))?;
    let refined = box_midpoint(phi, &fine, |x| g(x, h / 8.0))?;
    Ok((4.0 * refined - coarse) / 3.0)
}

/// `∫_Ω J(Φ)` over the whole parameter box, Richardson-refined.
pub fn jacobian_integral_box(phi: &ParametricMap, cells: &[usize]) -> Result<f64> {
    box_richardson(phi, cells, |x, step| jacobian_factor(phi, x, step))
}

/// [`surface_measure`] over the whole parameter box.
pub fn surface_measure_box(phi: &ParametricMap, cells: &[usize]) -> Result<f64> {
    if !phi.is_injective() {
        return Err(Error::InvalidInput(format!("map '{}' is not flagged injective", phi.name())));
    }
    jacobian_integral_box(phi, cells)
}

/// Midpoint sum of `J(Φ)` over `E` with each cell split into `2^k`
/// subcells per level of `refine`.
fn midpoint_jacobian(phi: &ParametricMap, set: &RasterSet, refine: u32) -> Result<f64> {
    let lat = set.lattice();
    let k = lat.ndim();
    let per_axis = 1usize << refine;
    let sub_h = lat.spacing() / per_axis as f64;
    let subs = per_axis.pow(k as u32);
    let step = sub_h / 4.0;
    let mut terms = Vec::with_capacity(set.count() * subs);
    let mut x = vec![0.0; k];
    for c in set.members() {
        let centre = lat.point(c);
        for s in 0..subs {
            let mut rest = s;
            for a in (0..k).rev() {
                let j = rest % per_axis;
                rest /= per_axis;
                x[a] = centre[a] - 0.5 * lat.spacing() + (j as f64 + 0.5) * sub_h;
            }
            terms.push(jacobian_factor(phi, &x, step)?);
        }
    }
    Ok(pairwise_sum(&terms) * crate::num::powf(sub_h, k as f64))
}

/// `∫_E J(Φ) dΛ^k` by midpoint sums at `h` and `h/2` combined as
/// `(4 S_{h/2} − S_h)/3`. `E` lives on a lattice over parameter space.
pub fn jacobian_integral(phi: &ParametricMap, set: &RasterSet) -> Result<f64> {
    if set.lattice().ndim() != phi.k() {
        return Err(Error::Dimension("raster dimension differs from the parameter dimension".into()));
    }
    let coarse = midpoint_jacobian(phi, set, 0)?;
    let fine = midpoint_jacobian(phi, set, 1)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `H^k(Φ(E)) = ∫_E J(Φ)` for a map flagged injective.
pub fn surface_measure(phi: &ParametricMap, set: &RasterSet) -> Result<f64> {
    if !phi.is_injective() {
        return Err(Error::InvalidInput(format!("map '{}' is not flagged injective", phi.name())));
    }
    jacobian_integral(phi, set)
}

/// Counts of preimage clusters across refinement depths.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityProfile {
    pub y: Vec<f64>,
    pub depths: Vec<u32>,
    pub counts: Vec<usize>,
    /// The count shared by the last two depths, when it stabilized.
    pub count: Option<usize>,
    /// Centroids of the preimage clusters at the final depth.
    pub preimages: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplicityOptions {
    /// Counts before this depth are never accepted as stable.
    pub min_depth: u32,
    pub max_depth: u32,
    /// Bounding boxes are widened by this fraction of their extent.
    pub inflate: f64,
}

impl Default for MultiplicityOptions {
    fn default() -> Self {
        MultiplicityOptions { min_depth: 8, max_depth: 30, inflate: 0.5 }
    }
}

/// Above this many live cells the refinement gives up.
const MAX_LIVE_CELLS: usize = 1 << 16;

/// Depths refined without any test: sampled bounding boxes of very coarse
/// cells can alias (a full turn of an angle samples to a single point).
const UNTESTED_DEPTHS: u32 = 3;

struct Cell {
    idx: Vec<u64>,
}

fn cell_flagged(phi: &ParametricMap, lo: &[f64], side: &[f64], idx: &[u64], y: &[f64], inflate: f64) -> bool {
    let k = lo.len();
    let n = y.len();
    let mut bmin = vec![f64::INFINITY; n];
    let mut bmax = vec![f64::NEG_INFINITY; n];
    let total = 3usize.pow(k as u32);
    let mut x = vec![0.0; k];
    for s in 0..total {
        let mut rest = s;
        for a in 0..k {
            let frac = (rest % 3) as f64 / 2.0;
            rest /= 3;
            x[a] = lo[a] + (idx[a] as f64 + frac) * side[a];
        }
        let v = phi.eval(&x);
        for i in 0..n {
            bmin[i] = bmin[i].min(v[i]);
            bmax[i] = bmax[i].max(v[i]);
        }
    }
    (0..n).all(|i| {
        let pad = inflate * (bmax[i] - bmin[i]) + 1e-12 * (1.0 + bmax[i].abs().max(bmin[i].abs()));
        y[i] >= bmin[i] - pad && y[i] <= bmax[i] + pad
    })
}

/// Connected groups of cells (touching faces, edges or corners).
fn clusters(cells: &[Cell]) -> Vec<Vec<usize>> {
    let m = cells.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..m {
        for j in i + 1..m {
            let touching = cells[i].idx.iter().zip(&cells[j].idx).all(|(a, b)| a.abs_diff(*b) <= 1);
            if touching {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..m {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, g)) => g.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

/// Gauss–Newton for `Φ(x) = y` with backtracking; a root is kept only if it
/// lies in the parameter box.
fn solve_preimage(phi: &ParametricMap, y: &[f64], mut x: Vec<f64>, extent: &[f64]) -> Result<Option<Vec<f64>>> {
    let (k, n) = (phi.k(), phi.n());
    let size = extent.iter().fold(0.0f64, |m, e| m.max(*e));
    let step = 1e-6 * size;
    let tol = 1e-10 * (1.0 + norm(y));
    let residual = |x: &[f64]| -> Vec<f64> { phi.eval(x).iter().zip(y).map(|(a, b)| a - b).collect() };
    let mut r = residual(&x);
    for _ in 0..ROOT_ITERATIONS {
        if norm(&r) <= tol {
            break;
        }
        let jac = match phi.analytic_jacobian(&x) {
            Some(m) => m,
            None => jacobian_fd_step(phi, &x, step)?.matrix,
        };
        // (JᵀJ) d = Jᵀ r
        let mut jtj = vec![0.0; k * k];
        let mut jtr = vec![0.0; k];
        for a in 0..k {
            for b in 0..k {
                jtj[a * k + b] = (0..n).map(|i| jac[i * k + a] * jac[i * k + b]).sum();
            }
            jtr[a] = (0..n).map(|i| jac[i * k + a] * r[i]).sum();
        }
        let Some(inv) = inverse(&jtj, k) else { return Ok(None) };
        let d = mat_vec(&inv, k, k, &jtr);
        let mut t = 1.0;
        let before = norm(&r);
        loop {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a - t * b).collect();
            let rt = residual(&trial);
            if norm(&rt) < before || t < 1e-6 {
                x = trial;
                r = rt;
                break;
            }
            t *= 0.5;
        }
    }
    let slack = 1e-9 * size;
    let inside = x.iter().zip(phi.lo()).zip(phi.hi()).all(|((v, a), b)| *v >= a - slack && *v <= b + slack);
    Ok((norm(&r) <= tol && inside).then_some(x))
}

const ROOT_ITERATIONS: usize = 60;

/// Whether `det DΦ` keeps one strict sign over the cell centers.
fn orientation_constant<'a>(
    phi: &ParametricMap,
    lo: &[f64],
    side: &[f64],
    cells: impl Iterator<Item = &'a [u64]>,
) -> Result<bool> {
    let k = lo.len();
    let (mut pos, mut neg) = (false, false);
    for idx in cells {
        let x: Vec<f64> = (0..k).map(|a| lo[a] + (idx[a] as f64 + 0.5) * side[a]).collect();
        let m = match phi.analytic_jacobian(&x) {
            Some(m) => m,
            None => jacobian_fd_step(phi, &x, 0.25 * side.iter().fold(f64::INFINITY, |m, s| m.min(*s)))?.matrix,
        };
        let d = det(&m, k);
        pos |= d > 0.0;
        neg |= d < 0.0;
        if pos && neg {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Preimage count of `y` under `Φ` on its parameter box: cells whose
/// (sampled, widened) image bounding box contains `y` are refined by
/// halving, and connected groups of surviving cells are counted. For
/// `k = n` a stable count also needs `det DΦ` of one sign on every group.
pub fn multiplicity(phi: &ParametricMap, y: &[f64], opts: &MultiplicityOptions) -> Result<MultiplicityProfile> {
    if y.len() != phi.n() {
        return Err(Error::Dimension(format!("y has {} coordinates, map has {}", y.len(), phi.n())));
    }
    let k = phi.k();
    let lo = phi.lo().to_vec();
    let extent: Vec<f64> = lo.iter().zip(phi.hi()).map(|(a, b)| b - a).collect();
    let mut live = vec![Cell { idx: vec![0; k] }];
    let mut depths = Vec::new();
    let mut counts = Vec::new();
    for depth in 0..=opts.max_depth {
        let scale = (1u64 << depth) as f64;
        let side: Vec<f64> = extent.iter().map(|e| e / scale).collect();
        if depth >= UNTESTED_DEPTHS {
            live.retain(|c| cell_flagged(phi, &lo, &side, &c.idx, y, opts.inflate));
        }
        let groups = clusters(&live);
        depths.push(depth);
        counts.push(groups.len());
        let mut stable = depth >= opts.min_depth && counts.len() >= 2 && counts[counts.len() - 2] == groups.len();
        if stable && k == phi.n() && depth < opts.max_depth {
            // near a fold two preimages share a cluster until the cells
            // resolve their gap
            for g in &groups {
                if !orientation_constant(phi, &lo, &side, g.iter().map(|&i| &live[i].idx[..]))? {
                    stable = false;
                    break;
                }
            }
        }
        if stable || depth == opts.max_depth || live.len() > MAX_LIVE_CELLS / (1 << k) {
            // a widened box can still hold y when y sits just off the image,
            // so each cluster must yield an actual root
            let mut preimages: Vec<Vec<f64>> = Vec::new();
            for g in &groups {
                let center = |i: usize| -> Vec<f64> {
                    (0..k).map(|a| lo[a] + (live[i].idx[a] as f64 + 0.5) * side[a]).collect()
                };
                let start = g
                    .iter()
                    .map(|&i| center(i))
                    .map(|x| (distance(&phi.eval(&x), y), x))
                    .min_by(|a, b| a.0.total_cmp(&b.0))
                    .map(|(_, x)| x)
                    .unwrap_or_default();
                if let Some(root) = solve_preimage(phi, y, start, &extent)? {
                    let near = |p: &Vec<f64>| p.iter().zip(&root).zip(&side).all(|((a, b), s)| (a - b).abs() <= 2.0 * s);
                    if !preimages.iter().any(near) {
                        preimages.push(root);
                    }
                }
            }
            return Ok(MultiplicityProfile {
                y: y.to_vec(),
                depths,
                count: stable.then_some(preimages.len()),
                counts,
                preimages,
            });
        }
        let mut next = Vec::with_capacity(live.len() << k);
        for c in &live {
            for child in 0..(1usize << k) {
                let idx = c.idx.iter().enumerate().map(|(a, i)| 2 * i + ((child >> a) & 1) as u64).collect();
                next.push(Cell { idx });
            }
        }
        live = next;
    }
    unreachable!("loop returns at max_depth")
}

/// Midpoints of a tensor grid over a box in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct YGrid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub per_axis: usize,
}

/// Default y-grid resolution for one-dimensional targets.
pub const Y_GRID_1D: usize = 256;
/// Default y-grid resolution per axis for planar targets.
pub const Y_GRID_2D: usize = 128;

impl YGrid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, per_axis: usize) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || lo.len() > 2 {
            return Err(Error::Dimension("y-grids are built for n = 1 or 2".into()));
        }
        if per_axis == 0 || lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidInput("invalid y-grid box".into()));
        }
        Ok(YGrid { lo, hi, per_axis })
    }

    /// Bounding box of `Φ` sampled on `samples` points per parameter axis.
    pub fn around_image(phi: &ParametricMap, samples: usize, per_axis: usize) -> Result<Self> {
        let n = phi.n();
        let k = phi.k();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        let total = (samples + 1).pow(k as u32);
        let mut x = vec![0.0; k];
        for s in 0..total {
            let mut rest = s;
            for a in 0..k {
                let t = (rest % (samples + 1)) as f64 / samples as f64;
                rest /= samples + 1;
                x[a] = phi.lo()[a] + t * (phi.hi()[a] - phi.lo()[a]);
            }
            let v = phi.eval(&x);
            for i in 0..n {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        YGrid::new(lo, hi, per_axis)
    }

    fn spacing(&self, a: usize) -> f64 {
        (self.hi[a] - self.lo[a]) / self.per_axis as f64
    }

    pub fn cell_measure(&self) -> f64 {
        (0..self.lo.len()).map(|a| self.spacing(a)).product()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        let n = self.lo.len();
        let total = self.per_axis.pow(n as u32);
        (0..total)
            .map(|s| {
                let mut rest = s;
                let mut p = vec![0.0; n];
                for a in (0..n).rev() {
                    p[a] = self.lo[a] + ((rest % self.per_axis) as f64 + 0.5) * self.spacing(a);
                    rest /= self.per_axis;
                }
                p
            })
            .collect()
    }
}

fn check_square(phi: &ParametricMap) -> Result<()> {
    if phi.k() != phi.n() {
        return Err(Error::Dimension("multiplicity integrals need k = n".into()));
    }
    Ok(())
}

/// `Σ_y (Σ_{x ∈ Φ⁻¹(y)} u(x)) Δy` over the grid.
fn preimage_integral<U: Fn(&[f64]) -> f64>(
    phi: &ParametricMap,
    grid: &YGrid,
    opts: &MultiplicityOptions,
    u: U,
) -> Result<f64> {
    let mut terms = Vec::new();
    for y in grid.points() {
        let prof = multiplicity(phi, &y, opts)?;
        if prof.count.is_none() {
            return Err(Error::NonStabilizing { depth: opts.max_depth });
        }
        terms.push(prof.preimages.iter().map(|x| u(x)).sum::<f64>());
    }
    Ok(pairwise_sum(&terms) * grid.cell_measure())
}

/// `lhs = ∫ N(Φ, Ω, y) dy` on the y-grid, `rhs = ∫_Ω J(Φ)` on the
/// parameter box.
pub fn area_formula_with_multiplicity(
    phi: &ParametricMap,
    cells: &[usize],
    grid: &YGrid,
    opts: &MultiplicityOptions,
) -> Result<Comparison> {
    check_square(phi)?;
    let lhs = preimage_integral(phi, grid, opts, |_| 1.0)?;
    Ok(Comparison::new(lhs, jacobian_integral_box(phi, cells)?))
}

/// `lhs = ∫_Ω u J(Φ)` on the parameter box, `rhs = ∫ Σ_{Φ(x) = y} u(x) dy`
/// on the y-grid with preimages taken from the multiplicity refinement.
pub fn change_of_variables<U: ScalarField + ?Sized>(
    phi: &ParametricMap,
    u: &U,
    cells: &[usize],
    grid: &YGrid,
    opts: &MultiplicityOptions,
) -> Result<Comparison> {
    check_square(phi)?;
    let lhs = box_richardson(phi, cells, |x, step| {
        let v = u.value(x);
        if !(v >= 0.0) {
            return Err(Error::Domain("u must be nonnegative and finite".into()));
        }
        Ok(v * jacobian_factor(phi, x, step)?)
    })?;
    let rhs = preimage_integral(phi, grid, opts, |x| u.value(x))?;
    Ok(Comparison::new(lhs, rhs))
}

/// `∫_Ω |det DΦ|` against `∫ N(Φ, Ω, y) dy` for `k = n`.
pub fn jacobian_l1_check(phi: &ParametricMap, cells: &[usize], grid: &YGrid) -> Result<Comparison> {
    area_formula_with_multiplicity(phi, cells, grid, &MultiplicityOptions::default())
}
