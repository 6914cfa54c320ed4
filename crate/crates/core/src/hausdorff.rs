//! Hausdorff premeasures, box-counting dimension and the Lebesgue-measure
//! transformation laws on point clouds, rasters and self-similar sets.
//!
//! Covers are dyadic boxes anchored at the coordinate origin. At level `j`
//! the boxes have side `2^-j` and diameter `√n·2^-j`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::check::Comparison;
use crate::error::{Error, Result};
use crate::grid::{Lattice, RasterSet};
use crate::linalg::{det, inverse, mat_vec};
use crate::num::{ceil, floor, gamma, linear_fit, ln, powf, sqrt};

/// Finest dyadic level ever used for covers.
const MAX_LEVEL: i32 = 48;

/// `ω_s = π^{s/2} / Γ(1 + s/2)`; the volume of the unit ball for integer `s`.
pub fn omega(s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(alloc::format!("omega needs s >= 0, got {s}")));
    }
    Ok(powf(PI, s / 2.0) / gamma(1.0 + s / 2.0))
}

/// Finite sample of a set in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    resolution: Option<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("point cloud needs n >= 1".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::Misaligned { expected: dim * (coords.len() / dim + 1), found: coords.len() });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("point coordinates must be finite".into()));
        }
        Ok(PointCloud { dim, coords, resolution: None })
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(1, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::Dimension("points differ in dimension".into()));
        }
        PointCloud::new(dim, points.concat())
    }

    /// Declares the scale below which the sample no longer resolves the set.
    pub fn with_resolution(mut self, resolution: f64) -> Self {
        self.resolution = Some(resolution);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }
    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Declared resolution, or twice the largest nearest-neighbour distance.
    pub fn resolution(&self) -> f64 {
        self.resolution.unwrap_or_else(|| 2.0 * self.max_nearest_neighbor_distance())
    }

    /// Image under `f`. The declared resolution is scaled by `lip` when given.
    pub fn map_points<F: Fn(&[f64]) -> Vec<f64>>(&self, f: F, lip: Option<f64>) -> Result<PointCloud> {
        let pts: Vec<Vec<f64>> = self.points().map(&f).collect();
        if pts.is_empty() {
            return Ok(PointCloud { dim: self.dim, coords: Vec::new(), resolution: None });
        }
        let mut out = PointCloud::from_points(&pts)?;
        if let Some(l) = lip {
            out.resolution = Some(l * self.resolution());
        }
        Ok(out)
    }

    pub fn translated(&self, v: &[f64]) -> PointCloud {
        let coords = self.coords.iter().enumerate().map(|(i, c)| c + v[i % self.dim]).collect();
        PointCloud { dim: self.dim, coords, resolution: self.resolution }
    }

    pub fn scaled(&self, t: f64) -> PointCloud {
        PointCloud {
            dim: self.dim,
            coords: self.coords.iter().map(|c| c * t).collect(),
            resolution: self.resolution.map(|r| r * t.abs()),
        }
    }

    fn max_nearest_neighbor_distance(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.point(a)[0].total_cmp(&self.point(b)[0]));
        let mut worst = 0.0f64;
        for (pos, &i) in order.iter().enumerate() {
            let p = self.point(i);
            let mut best = f64::INFINITY;
            for &j in order[pos + 1..].iter() {
                let q = self.point(j);
                if q[0] - p[0] >= best {
                    break;
                }
                best = best.min(crate::num::distance(p, q));
            }
            for &j in order[..pos].iter().rev() {
                let q = self.point(j);
                if p[0] - q[0] >= best {
                    break;
                }
                best = best.min(crate::num::distance(p, q));
            }
            worst = worst.max(best);
        }
        worst
    }
}

/// Point budget of [`IfsSystem::default_depth`].
pub const MAX_DEFAULT_POINTS: usize = 1 << 22;

/// One similarity `x ↦ ratio·R x + offset` of an IFS.
#[derive(Debug, Clone, PartialEq)]
pub struct Similarity {
    pub ratio: f64,
    pub offset: Vec<f64>,
    /// Orthogonal part, `n×n` row-major.
    pub rotation: Vec<f64>,
}

impl Similarity {
    pub fn scaling(ratio: f64, offset: Vec<f64>) -> Self {
        let n = offset.len();
        let mut rotation = vec![0.0; n * n];
        for i in 0..n {
            rotation[i * n + i] = 1.0;
        }
        Similarity { ratio, offset, rotation }
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let rx = mat_vec(&self.rotation, n, n, x);
        rx.iter().zip(&self.offset).map(|(r, b)| self.ratio * r + b).collect()
    }

    fn fixed_point(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = if i == j { 1.0 } else { 0.0 } - self.ratio * self.rotation[i * n + j];
            }
        }
        let inv = inverse(&a, n).ok_or(Error::SingularMap)?;
        Ok(mat_vec(&inv, n, n, &self.offset))
    }
}

/// Iterated function system of contracting similarities.
#[derive(Debug, Clone, PartialEq)]
pub struct IfsSystem {
    pub maps: Vec<Similarity>,
    pub depth: usize,
}

impl IfsSystem {
    pub fn new(maps: Vec<Similarity>, depth: usize) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::InvalidInput("an IFS needs at least two maps".into()));
        }
        let n = maps[0].dim();
        if n == 0 {
            return Err(Error::Dimension("IFS maps need a nonempty offset".into()));
        }
        for m in &maps {
            if !(m.ratio > 0.0 && m.ratio < 1.0) {
                return Err(Error::Domain(alloc::format!("ratio {} outside (0, 1)", m.ratio)));
            }
            if m.dim() != n || m.rotation.len() != n * n {
                return Err(Error::Dimension("IFS maps disagree in dimension".into()));
            }
            let rtr = crate::linalg::mat_mul(&transpose(&m.rotation, n), &m.rotation, n, n, n);
            for i in 0..n {
                for j in 0..n {
                    let e = if i == j { 1.0 } else { 0.0 };
                    if (rtr[i * n + j] - e).abs() > 1e-9 {
                        return Err(Error::InvalidInput("IFS rotation is not orthogonal".into()));
                    }
                }
            }
        }
        Ok(IfsSystem { maps, depth })
    }

    /// Middle-thirds Cantor set: `x/3` and `x/3 + 2/3`.
    pub fn cantor(depth: usize) -> Self {
        IfsSystem {
            maps: vec![Similarity::scaling(1.0 / 3.0, vec![0.0]), Similarity::scaling(1.0 / 3.0, vec![2.0 / 3.0])],
            depth,
        }
    }

    pub fn dim(&self) -> usize {
        self.maps[0].dim()
    }

    pub fn max_ratio(&self) -> f64 {
        self.maps.iter().fold(0.0f64, |m, s| m.max(s.ratio))
    }

    /// Smallest depth with `(max ratio)^depth < min_scale / 64`, cut back to
    /// keep at most [`MAX_DEFAULT_POINTS`] points but never below the depth
    /// with `(max ratio)^depth < min_scale / 4`.
    pub fn default_depth(&self, min_scale: f64) -> usize {
        let r = self.max_ratio();
        let below = |target: f64| {
            let mut depth = ceil(ln(target) / ln(r)).max(1.0) as usize;
            while powf(r, depth as f64) >= target {
                depth += 1;
            }
            depth
        };
        let floor_depth = below(min_scale / 4.0);
        let mut depth = below(min_scale / 64.0);
        while depth > floor_depth && powf(self.maps.len() as f64, depth as f64) > MAX_DEFAULT_POINTS as f64 {
            depth -= 1;
        }
        depth
    }

    /// All `maps.len()^depth` images of the first map's fixed point. The
    /// points lie on the attractor; the declared resolution is the largest
    /// depth-`depth` piece diameter.
    pub fn generate(&self) -> Result<PointCloud> {
        let seed = self.maps[0].fixed_point()?;
        let mut layer = vec![seed];
        for _ in 0..self.depth {
            let mut next = Vec::with_capacity(layer.len() * self.maps.len());
            for m in &self.maps {
                for p in &layer {
                    next.push(m.apply(p));
                }
            }
            layer = next;
        }
        let cloud = PointCloud::from_points(&layer)?;
        let diam = bounding_diagonal(&cloud);
        let res = powf(self.max_ratio(), self.depth as f64) * diam;
        Ok(cloud.with_resolution(res))
    }
}

fn transpose(a: &[f64], n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = a[i * n + j];
        }
    }
    t
}

fn bounding_diagonal(cloud: &PointCloud) -> f64 {
    let n = cloud.dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for p in cloud.points() {
        for a in 0..n {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let d: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| h - l).collect();
    crate::num::norm(&d)
}

/// Scales `2^-k` for `k` in `lo..=hi`, strictly decreasing.
pub fn dyadic_scales(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| powf(2.0, -(k as f64))).collect()
}

fn occupied_boxes(cloud: &PointCloud, side: f64, shift: f64) -> usize {
    if cloud.dim() <= 4 {
        let mut keys: Vec<[i64; 4]> = cloud
            .points()
            .map(|p| {
                let mut k = [0i64; 4];
                for (slot, x) in k.iter_mut().zip(p) {
                    *slot = floor((x + shift) / side) as i64;
                }
                k
            })
            .collect();
        keys.sort_unstable();
        keys.dedup();
        return keys.len();
    }
    let mut keys: BTreeSet<Vec<i64>> = BTreeSet::new();
    for p in cloud.points() {
        keys.insert(p.iter().map(|x| floor((x + shift) / side) as i64).collect());
    }
    keys.len()
}

/// Number of occupied origin-anchored boxes of side `δ` for each scale.
pub fn box_counts(cloud: &PointCloud, scales: &[f64]) -> Result<Vec<usize>> {
    check_scales(scales)?;
    Ok(scales.iter().map(|&d| occupied_boxes(cloud, d, 0.0)).collect())
}

/// Box counts averaged over `shifts` grids offset along the diagonal by
/// `i·δ/shifts`, `i = 0..shifts`.
pub fn shifted_box_counts(cloud: &PointCloud, scales: &[f64], shifts: usize) -> Result<Vec<f64>> {
    check_scales(scales)?;
    let shifts = shifts.max(1);
    Ok(scales
        .iter()
        .map(|&d| {
            let total: usize = (0..shifts).map(|i| occupied_boxes(cloud, d, d * i as f64 / shifts as f64)).sum();
            total as f64 / shifts as f64
        })
        .collect())
}

fn check_scales(scales: &[f64]) -> Result<()> {
    if scales.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(Error::Domain("scales must be positive".into()));
    }
    Ok(())
}

/// Dyadic level whose boxes have the largest diameter not exceeding `δ`.
fn level_for(dim: usize, delta: f64) -> i32 {
    let j = ceil(ln(sqrt(dim as f64) / delta) / core::f64::consts::LN_2) as i32;
    j.clamp(-MAX_LEVEL, MAX_LEVEL)
}

fn level_cover_sum(cloud: &PointCloud, s: f64, level: i32) -> Result<f64> {
    let side = powf(2.0, -(level as f64));
    let diam = sqrt(cloud.dim() as f64) * side;
    let count = occupied_boxes(cloud, side, 0.0);
    Ok(omega(s)? / powf(2.0, s) * count as f64 * powf(diam, s))
}

/// `(ω_s/2^s) Σ diam^s` for the single dyadic cover whose boxes have
/// diameter at most `δ` (and more than `δ/2`).
pub fn cover_sum(cloud: &PointCloud, s: f64, delta: f64) -> Result<f64> {
    check_premeasure_args(s, delta)?;
    if cloud.is_empty() {
        return Ok(0.0);
    }
    level_cover_sum(cloud, s, level_for(cloud.dim(), delta))
}

fn check_premeasure_args(s: f64, delta: f64) -> Result<()> {
    if !(delta > 0.0) {
        return Err(Error::Domain(alloc::format!("delta must be > 0, got {delta}")));
    }
    if !(s >= 0.0) {
        return Err(Error::Domain(alloc::format!("s must be >= 0, got {s}")));
    }
    Ok(())
}

/// Upper estimate of `H^s_δ`: the least dyadic cover sum over all levels
/// with box diameter `≤ δ` that the cloud still resolves. Nested admissible
/// levels make the value nonincreasing in `δ`. Below the cloud's resolution
/// the value saturates at the finest resolved level, since finer boxes only
/// see sampling gaps.
pub fn premeasure_delta(cloud: &PointCloud, s: f64, delta: f64) -> Result<f64> {
    check_premeasure_args(s, delta)?;
    if cloud.is_empty() {
        return Ok(0.0);
    }
    let res = cloud.resolution();
    let last = if res > 0.0 {
        (floor(-ln(res) / core::f64::consts::LN_2) as i32).min(MAX_LEVEL)
    } else {
        MAX_LEVEL
    };
    let first = level_for(cloud.dim(), delta).min(last);
    let mut best = level_cover_sum(cloud, s, first)?;
    for level in first + 1..=last {
        best = best.min(level_cover_sum(cloud, s, level)?);
    }
    Ok(best)
}

/// Box-counting slope and its regression data.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub scales: Vec<f64>,
    pub counts: Vec<f64>,
    pub r2: f64,
    /// All counts equal; the slope is 0 and carries no fit quality.
    pub degenerate: bool,
}

/// Grid offsets averaged per scale in [`dimension_estimate`].
pub const DEFAULT_SHIFTS: usize = 16;

/// Least-squares slope of `log N(δ)` against `log(1/δ)` over at least four
/// strictly decreasing scales, with `N` averaged over shifted grids.
pub fn dimension_estimate(cloud: &PointCloud, scales: &[f64]) -> Result<DimensionEstimate> {
    if scales.len() < 4 {
        return Err(Error::InvalidInput("dimension estimate needs at least 4 scales".into()));
    }
    if scales.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidInput("scales must be strictly decreasing".into()));
    }
    if cloud.is_empty() {
        return Err(Error::InvalidInput("empty point cloud".into()));
    }
    let counts = shifted_box_counts(cloud, scales, DEFAULT_SHIFTS)?;
    let xs: Vec<f64> = scales.iter().map(|d| -ln(*d)).collect();
    let ys: Vec<f64> = counts.iter().map(|c| ln(*c)).collect();
    let degenerate = counts.windows(2).all(|w| w[0] == w[1]);
    if degenerate {
        return Ok(DimensionEstimate {
            slope: 0.0,
            intercept: ys[0],
            scales: scales.to_vec(),
            counts,
            r2: 0.0,
            degenerate,
        });
    }
    let fit = linear_fit(&xs, &ys).ok_or_else(|| Error::InvalidInput("degenerate scales".into()))?;
    Ok(DimensionEstimate {
        slope: fit.slope,
        intercept: fit.intercept,
        scales: scales.to_vec(),
        counts,
        r2: fit.r2,
        degenerate,
    })
}

/// Dimension of an IFS attractor. A zero `ifs.depth` selects the default
/// depth for the finest scale.
pub fn dimension_estimate_ifs(ifs: &IfsSystem, scales: &[f64]) -> Result<DimensionEstimate> {
    let min_scale = scales.iter().fold(f64::INFINITY, |m, d| m.min(*d));
    let mut sys = ifs.clone();
    if sys.depth == 0 {
        sys.depth = ifs.default_depth(min_scale);
    }
    let cloud = sys.generate()?;
    dimension_estimate(&cloud, scales)
}

/// `Λ^n(E) ≈ (true cells)·hⁿ`.
pub fn lebesgue_measure(set: &RasterSet) -> f64 {
    set.count() as f64 * set.lattice().cell_volume()
}

/// Rasterizes `T(E)` at the same spacing and compares its measure with
/// `|det T|·Λⁿ(E)`. `t` is `n×n` row-major.
pub fn linear_image_measure_check(set: &RasterSet, t: &[f64]) -> Result<Comparison> {
    let lat = set.lattice();
    let n = lat.ndim();
    if t.len() != n * n {
        return Err(Error::Misaligned { expected: n * n, found: t.len() });
    }
    let d = det(t, n);
    let inv = match inverse(t, n) {
        Some(inv) if d != 0.0 => inv,
        _ => return Err(Error::SingularMap),
    };
    let h = lat.spacing();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for corner in 0..(1usize << n) {
        let c: Vec<f64> =
            (0..n).map(|a| if (corner >> a) & 1 == 1 { lat.upper(a) } else { lat.lower(a) }).collect();
        let y = mat_vec(t, n, n, &c);
        for a in 0..n {
            lo[a] = lo[a].min(y[a]);
            hi[a] = hi[a].max(y[a]);
        }
    }
    let lo: Vec<f64> = lo.iter().map(|v| floor(v / h) * h).collect();
    let dims: Vec<usize> = (0..n).map(|a| (ceil((hi[a] - lo[a]) / h) as usize).max(1)).collect();
    let image_lattice = Lattice::new(dims, lo.iter().map(|v| v + 0.5 * h).collect(), h)?;
    let mut count = 0usize;
    for flat in 0..image_lattice.len() {
        let y = image_lattice.point(flat);
        let x = mat_vec(&inv, n, n, &y);
        if let Some(i) = lat.nearest(&x) {
            if set.contains(i) {
                count += 1;
            }
        }
    }
    let lhs = count as f64 * lat.cell_volume();
    Ok(Comparison::new(lhs, d.abs() * lebesgue_measure(set)))
}

/// `(Λⁿ(E), ω_n (diam E / 2)ⁿ)` with the diameter taken over true cell
/// centers and padded by one cell diagonal.
pub fn isodiametric_check(set: &RasterSet) -> Result<Comparison> {
    if set.count() == 0 {
        return Err(Error::InvalidInput("isodiametric check needs a nonempty set".into()));
    }
    let lat = set.lattice();
    let n = lat.ndim();
    let strides = lat.strides();
    // Only cells with an outside face neighbour can realize the diameter.
    let boundary: Vec<Vec<f64>> = set
        .members()
        .filter(|&flat| {
            let idx = lat.unravel(flat);
            (0..n).any(|a| {
                idx[a] == 0
                    || idx[a] + 1 == lat.dims()[a]
                    || !set.contains(flat - strides[a])
                    || !set.contains(flat + strides[a])
            })
        })
        .map(|flat| lat.point(flat))
        .collect();
    let mut diam2 = 0.0f64;
    for i in 0..boundary.len() {
        for j in i + 1..boundary.len() {
            let d2: f64 = boundary[i].iter().zip(&boundary[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            diam2 = diam2.max(d2);
        }
    }
    let diam = sqrt(diam2) + lat.spacing() * sqrt(n as f64);
    let bound = omega(n as f64)? * powf(diam / 2.0, n as f64);
    Ok(Comparison::new(lebesgue_measure(set), bound))
}

/// `H^s_δ(f(E))` against `Lip(f)^s H^s_{δ}(E)`, the image evaluated at
/// `δ·L` (or `δ` when `L = 0`).
pub fn lipschitz_image_bound_check<F>(f: F, lip: f64, cloud: &PointCloud, s: f64, delta: f64) -> Result<Comparison>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if !(lip >= 0.0) {
        return Err(Error::Domain("Lipschitz constant must be >= 0".into()));
    }
    let image = cloud.map_points(f, if lip > 0.0 { Some(lip) } else { None })?;
    let source = premeasure_delta(cloud, s, delta)?;
    let image_delta = if lip > 0.0 { delta * lip } else { delta };
    let lhs = premeasure_delta(&image, s, image_delta)?;
    Ok(Comparison::new(lhs, powf(lip, s) * source))
}
