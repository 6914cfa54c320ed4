//! Uniform lattices and the sampled objects living on them.
//!
//! A [`Lattice`] is a box split into cubic cells of side `spacing`. Sample
//! `i` sits at the cell center `origin + i·spacing`, so cell `i` covers
//! `[origin + (i − ½)h, origin + (i + ½)h]` on every axis. Storage is
//! row-major with the last axis varying fastest.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num::{floor, pairwise_sum, powf, round};

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    dims: Vec<usize>,
    origin: Vec<f64>,
    spacing: f64,
}

impl Lattice {
    pub fn new(dims: Vec<usize>, origin: Vec<f64>, spacing: f64) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidInput("lattice needs at least one axis".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidInput("lattice extents must be >= 1".into()));
        }
        if origin.len() != dims.len() {
            return Err(Error::Dimension(format!(
                "origin has {} coordinates for {} axes",
                origin.len(),
                dims.len()
            )));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidInput(format!("spacing must be > 0, got {spacing}")));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidInput("origin must be finite".into()));
        }
        Ok(Lattice { dims, origin, spacing })
    }

    /// Cells of side `spacing` tiling the box `[lo, hi]`. Each extent
    /// `hi − lo` must be an integer multiple of the spacing (to 1e-9).
    pub fn over_box(lo: &[f64], hi: &[f64], spacing: f64) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Dimension("box corners differ in length".into()));
        }
        let mut dims = Vec::with_capacity(lo.len());
        for (a, b) in lo.iter().zip(hi) {
            let cells = (b - a) / spacing;
            let r = round(cells);
            if r < 1.0 || (cells - r).abs() > 1e-9 * r.max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "box side {} is not a positive multiple of spacing {spacing}",
                    b - a
                )));
            }
            dims.push(r as usize);
        }
        let origin = lo.iter().map(|a| a + 0.5 * spacing).collect();
        Lattice::new(dims, origin, spacing)
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn origin(&self) -> &[f64] {
        &self.origin
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn cell_volume(&self) -> f64 {
        powf(self.spacing, self.ndim() as f64)
    }

    /// Lower face of the box along `axis`.
    pub fn lower(&self, axis: usize) -> f64 {
        self.origin[axis] - 0.5 * self.spacing
    }
    /// Upper face of the box along `axis`.
    pub fn upper(&self, axis: usize) -> f64 {
        self.origin[axis] + (self.dims[axis] as f64 - 0.5) * self.spacing
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = alloc::vec![1; self.ndim()];
        for a in (0..self.ndim().saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.dims[a + 1];
        }
        s
    }

    pub fn index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (a, &i) in idx.iter().enumerate() {
            flat = flat * self.dims[a] + i;
        }
        flat
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = alloc::vec![0; self.ndim()];
        for a in (0..self.ndim()).rev() {
            idx[a] = flat % self.dims[a];
            flat /= self.dims[a];
        }
        idx
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.spacing
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.coord(a, i))
            .collect()
    }

    pub fn point_of(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().enumerate().map(|(a, &i)| self.coord(a, i)).collect()
    }

    /// Multi-index of the cell containing `x`, if `x` lies in the box.
    pub fn locate(&self, x: &[f64]) -> Option<Vec<usize>> {
        if x.len() != self.ndim() {
            return None;
        }
        let mut idx = Vec::with_capacity(self.ndim());
        for (a, &xa) in x.iter().enumerate() {
            let t = floor((xa - self.lower(a)) / self.spacing);
            if !(t >= 0.0) || t >= self.dims[a] as f64 {
                return None;
            }
            idx.push(t as usize);
        }
        Some(idx)
    }

    /// Flat index of the sample nearest to `x` (same as [`Lattice::locate`]).
    pub fn nearest(&self, x: &[f64]) -> Option<usize> {
        self.locate(x).map(|i| self.index(&i))
    }

    /// Distance from `x` to the boundary of the box (negative outside).
    pub fn distance_to_boundary(&self, x: &[f64]) -> f64 {
        let mut d = f64::INFINITY;
        for (a, &xa) in x.iter().enumerate() {
            d = d.min(xa - self.lower(a)).min(self.upper(a) - xa);
        }
        d
    }

    /// Whether the closed ball `B(x, r)` fits inside the box.
    pub fn contains_ball(&self, x: &[f64], r: f64) -> bool {
        self.distance_to_boundary(x) >= r - 1e-12 * self.spacing
    }

    /// Flat indices of samples `y` with `‖y − x‖ ≤ r`, in storage order.
    /// Fails when the ball leaves the box.
    pub fn cells_in_ball(&self, x: &[f64], r: f64) -> Result<Vec<usize>> {
        if !self.contains_ball(x, r) {
            return Err(Error::OutsideDomain(format!("ball of radius {r} leaves the lattice box")));
        }
        let n = self.ndim();
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        for a in 0..n {
            let l = crate::num::ceil((x[a] - r - self.origin[a]) / self.spacing - 1e-9).max(0.0);
            let u = floor((x[a] + r - self.origin[a]) / self.spacing + 1e-9);
            if u < 0.0 {
                return Ok(Vec::new());
            }
            lo.push(l as usize);
            hi.push((u as usize).min(self.dims[a] - 1));
        }
        let mut out = Vec::new();
        if lo.iter().zip(&hi).any(|(l, u)| l > u) {
            return Ok(out);
        }
        let r2 = r * r * (1.0 + 1e-12);
        let mut idx = lo.clone();
        loop {
            let mut d2 = 0.0;
            for a in 0..n {
                let d = self.coord(a, idx[a]) - x[a];
                d2 += d * d;
            }
            if d2 <= r2 {
                out.push(self.index(&idx));
            }
            // odometer
            let mut a = n;
            loop {
                if a == 0 {
                    return Ok(out);
                }
                a -= 1;
                if idx[a] < hi[a] {
                    idx[a] += 1;
                    idx[a + 1..n].copy_from_slice(&lo[a + 1..n]);
                    break;
                }
            }
        }
    }

    /// A rectangular block of this lattice starting at `offset`.
    pub fn window(&self, offset: &[usize], dims: &[usize]) -> Result<Lattice> {
        if offset.len() != self.ndim() || dims.len() != self.ndim() {
            return Err(Error::Dimension("window rank differs from lattice".into()));
        }
        for a in 0..self.ndim() {
            if offset[a] + dims[a] > self.dims[a] {
                return Err(Error::OutsideDomain("window exceeds lattice".into()));
            }
        }
        let origin = (0..self.ndim()).map(|a| self.coord(a, offset[a])).collect();
        Lattice::new(dims.to_vec(), origin, self.spacing)
    }

    /// True when both lattices have the same spacing and their sample points
    /// coincide where they overlap.
    pub fn is_aligned_with(&self, other: &Lattice) -> bool {
        if self.ndim() != other.ndim() || (self.spacing - other.spacing).abs() > 1e-12 * self.spacing
        {
            return false;
        }
        (0..self.ndim()).all(|a| {
            let shift = (other.origin[a] - self.origin[a]) / self.spacing;
            (shift - round(shift)).abs() < 1e-6
        })
    }

    pub(crate) fn same_as(&self, other: &Lattice) -> bool {
        self.dims == other.dims
            && self.is_aligned_with(other)
            && (0..self.ndim()).all(|a| (self.origin[a] - other.origin[a]).abs() < 1e-9 * self.spacing)
    }
}

/// Anything that can be evaluated at a point of `R^n`.
pub trait ScalarField {
    fn value(&self, x: &[f64]) -> f64;
}

impl<F: Fn(&[f64]) -> f64> ScalarField for F {
    fn value(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Real samples on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    lattice: Lattice,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(lattice: Lattice, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::Misaligned { expected: lattice.len(), found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("grid values must be finite".into()));
        }
        Ok(GridFunction { lattice, values })
    }

    /// Samples `f` at every lattice point.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(lattice: Lattice, f: F) -> Result<Self> {
        let values = (0..lattice.len()).map(|i| f(&lattice.point(i))).collect();
        GridFunction::new(lattice, values)
    }

    pub fn constant(lattice: Lattice, c: f64) -> Result<Self> {
        let n = lattice.len();
        GridFunction::new(lattice, alloc::vec![c; n])
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.lattice.index(idx)]
    }

    /// `Σ hⁿ f(x_i)`, the midpoint rule over the lattice box.
    pub fn integral(&self) -> f64 {
        pairwise_sum(&self.values) * self.lattice.cell_volume()
    }

    /// Discrete `L^p` norm with cell weight `hⁿ`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm_of(&self.values, self.lattice.cell_volume(), p)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<GridFunction> {
        GridFunction::new(self.lattice.clone(), self.values.iter().map(|v| f(*v)).collect())
    }

    /// `a·self + b·other` on a shared lattice.
    pub fn combine(&self, a: f64, other: &GridFunction, b: f64) -> Result<GridFunction> {
        if !self.lattice.same_as(&other.lattice) {
            return Err(Error::LatticeMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        GridFunction::new(self.lattice.clone(), values)
    }

    /// Copy of the samples inside a window of the lattice.
    pub fn restrict(&self, offset: &[usize], dims: &[usize]) -> Result<GridFunction> {
        let sub = self.lattice.window(offset, dims)?;
        let mut values = Vec::with_capacity(sub.len());
        let mut idx = alloc::vec![0; self.lattice.ndim()];
        for flat in 0..sub.len() {
            let local = sub.unravel(flat);
            for a in 0..idx.len() {
                idx[a] = local[a] + offset[a];
            }
            values.push(self.get(&idx));
        }
        GridFunction::new(sub, values)
    }

    /// `Σ hⁿ f g` over the samples the two (aligned) grids share.
    pub fn inner_product_on_overlap(&self, other: &GridFunction) -> Result<f64> {
        let (a, b) = (&self.lattice, &other.lattice);
        if !a.is_aligned_with(b) {
            return Err(Error::LatticeMismatch);
        }
        let n = a.ndim();
        let h = a.spacing();
        let mut lo_a = Vec::with_capacity(n);
        let mut lo_b = Vec::with_capacity(n);
        let mut len = Vec::with_capacity(n);
        for ax in 0..n {
            let shift = round((b.origin()[ax] - a.origin()[ax]) / h) as i64;
            let start_a = shift.max(0);
            let start_b = (-shift).max(0);
            let end_a = (a.dims()[ax] as i64).min(b.dims()[ax] as i64 + shift);
            if end_a <= start_a {
                return Ok(0.0);
            }
            lo_a.push(start_a as usize);
            lo_b.push(start_b as usize);
            len.push((end_a - start_a) as usize);
        }
        let block: usize = len.iter().product();
        let mut terms = Vec::with_capacity(block);
        let mut ia = alloc::vec![0; n];
        let mut ib = alloc::vec![0; n];
        let mut local = alloc::vec![0usize; n];
        for _ in 0..block {
            for ax in 0..n {
                ia[ax] = lo_a[ax] + local[ax];
                ib[ax] = lo_b[ax] + local[ax];
            }
            terms.push(self.get(&ia) * other.get(&ib));
            for ax in (0..n).rev() {
                local[ax] += 1;
                if local[ax] < len[ax] {
                    break;
                }
                local[ax] = 0;
            }
        }
        Ok(pairwise_sum(&terms) * a.cell_volume())
    }

    /// Multilinear interpolation between samples; `None` outside the hull of
    /// the sample points.
    pub fn interpolate(&self, x: &[f64]) -> Option<f64> {
        let lat = &self.lattice;
        let n = lat.ndim();
        if x.len() != n {
            return None;
        }
        let mut base = Vec::with_capacity(n);
        let mut frac = Vec::with_capacity(n);
        for a in 0..n {
            let t = (x[a] - lat.origin()[a]) / lat.spacing();
            let d = lat.dims()[a];
            if t < -1e-9 || t > (d - 1) as f64 + 1e-9 {
                return None;
            }
            if d == 1 {
                base.push(0);
                frac.push(0.0);
                continue;
            }
            let i = (floor(t).max(0.0) as usize).min(d - 2);
            base.push(i);
            frac.push((t - i as f64).clamp(0.0, 1.0));
        }
        let mut acc = 0.0;
        let mut idx = alloc::vec![0; n];
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            for a in 0..n {
                let up = (corner >> a) & 1 == 1;
                if up && lat.dims()[a] == 1 {
                    w = 0.0;
                    break;
                }
                idx[a] = base[a] + up as usize;
                w *= if up { frac[a] } else { 1.0 - frac[a] };
            }
            if w != 0.0 {
                acc += w * self.get(&idx);
            }
        }
        Some(acc)
    }
}

impl ScalarField for GridFunction {
    fn value(&self, x: &[f64]) -> f64 {
        self.interpolate(x).unwrap_or(f64::NAN)
    }
}

pub(crate) fn lp_norm_of(values: &[f64], weight: f64, p: f64) -> f64 {
    if p == f64::INFINITY {
        return values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let terms: Vec<f64> = values.iter().map(|v| powf(v.abs() / scale, p)).collect();
    scale * powf(pairwise_sum(&terms) * weight, 1.0 / p)
}

/// Per-axis components of a vector-valued grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    lattice: Lattice,
    components: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn new(lattice: Lattice, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.iter().any(|c| c.len() != lattice.len()) {
            return Err(Error::Misaligned {
                expected: lattice.len(),
                found: components.iter().map(Vec::len).find(|&l| l != lattice.len()).unwrap_or(0),
            });
        }
        Ok(VectorField { lattice, components })
    }
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }
    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }
    pub fn component(&self, axis: usize) -> GridFunction {
        GridFunction { lattice: self.lattice.clone(), values: self.components[axis].clone() }
    }
    pub fn at(&self, flat: usize) -> Vec<f64> {
        self.components.iter().map(|c| c[flat]).collect()
    }
    /// Pointwise Euclidean norms.
    pub fn norms(&self) -> Vec<f64> {
        (0..self.lattice.len())
            .map(|i| crate::num::norm(&self.at(i)))
            .collect()
    }
}

/// Boolean mask on a lattice; `true` cells belong to the set.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterSet {
    lattice: Lattice,
    mask: Vec<bool>,
}

impl RasterSet {
    pub fn new(lattice: Lattice, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != lattice.len() {
            return Err(Error::Misaligned { expected: lattice.len(), found: mask.len() });
        }
        Ok(RasterSet { lattice, mask })
    }

    /// Cell-center membership test.
    pub fn from_fn<F: Fn(&[f64]) -> bool>(lattice: Lattice, inside: F) -> Self {
        let mask = (0..lattice.len()).map(|i| inside(&lattice.point(i))).collect();
        RasterSet { lattice, mask }
    }

    pub fn full(lattice: Lattice) -> Self {
        let n = lattice.len();
        RasterSet { lattice, mask: alloc::vec![true; n] }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
    pub fn contains(&self, flat: usize) -> bool {
        self.mask[flat]
    }
    pub fn count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }
    pub fn complement(&self) -> RasterSet {
        RasterSet { lattice: self.lattice.clone(), mask: self.mask.iter().map(|m| !m).collect() }
    }
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, m)| **m).map(|(i, _)| i)
    }
    /// Indicator function as a grid function.
    pub fn indicator(&self) -> GridFunction {
        GridFunction {
            lattice: self.lattice.clone(),
            values: self.mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect(),
        }
    }
}
