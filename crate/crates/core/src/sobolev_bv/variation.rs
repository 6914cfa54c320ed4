//! Total variation of sampled functions, perimeter of rasters and the
//! coarea identity.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, Lattice, RasterSet};
use crate::num::{pairwise_sum, powf, seeded_rng};
use crate::pointwise::gradient_fd;
use crate::smoothing::TestFunctionBattery;

/// `Σ |f_{i+1} − f_i|`.
pub fn variation_1d(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InvalidInput("variation needs at least 2 samples".into()));
    }
    let incs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    Ok(pairwise_sum(&incs))
}

fn check_1d(f: &GridFunction) -> Result<()> {
    if f.lattice().ndim() != 1 {
        return Err(Error::Dimension("expected a one-dimensional grid".into()));
    }
    Ok(())
}

/// `‖f‖_{L¹} + V(f)` for a one-dimensional grid function.
pub fn bv_norm(f: &GridFunction) -> Result<f64> {
    check_1d(f)?;
    Ok(f.lp_norm(1.0) + variation_1d(f.values())?)
}

/// Count of face-adjacent sample pairs with different membership times
/// `h^{n−1}`: the ℓ¹ perimeter of the raster inside its lattice box.
pub fn perimeter(set: &RasterSet) -> f64 {
    let lat = set.lattice();
    perimeter_counts(set, &vec![0; lat.ndim()], lat.dims()) as f64 * face_area(lat)
}

/// [`perimeter`] restricted to faces between samples of a window.
pub fn perimeter_window(set: &RasterSet, offset: &[usize], dims: &[usize]) -> Result<f64> {
    let lat = set.lattice();
    lat.window(offset, dims)?;
    Ok(perimeter_counts(set, offset, dims) as f64 * face_area(lat))
}

fn face_area(lat: &Lattice) -> f64 {
    powf(lat.spacing(), (lat.ndim() - 1) as f64)
}

fn perimeter_counts(set: &RasterSet, offset: &[usize], dims: &[usize]) -> usize {
    let lat = set.lattice();
    let strides = lat.strides();
    let n = lat.ndim();
    let total: usize = dims.iter().product();
    let mut idx = vec![0usize; n];
    let mut count = 0;
    for k in 0..total {
        let mut rest = k;
        for a in (0..n).rev() {
            idx[a] = offset[a] + rest % dims[a];
            rest /= dims[a];
        }
        let c = lat.index(&idx);
        let inside = set.contains(c);
        for a in 0..n {
            if idx[a] + 1 < offset[a] + dims[a] && set.contains(c + strides[a]) != inside {
                count += 1;
            }
        }
    }
    count
}

/// Raw perimeter of a rasterized disk of radius `256h` divided by its
/// circumference: the ℓ¹ overestimate factor for round level sets.
pub fn perimeter_calibration(h: f64) -> Result<f64> {
    let r = 256.0 * h;
    let half = 300.0 * h;
    let lat = Lattice::over_box(&[-half, -half], &[half, half], h)?;
    let disk = RasterSet::from_fn(lat, |x| x[0] * x[0] + x[1] * x[1] <= r * r);
    Ok(perimeter(&disk) / (2.0 * core::f64::consts::PI * r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariationMethod {
    /// `Σ hⁿ ‖∇f‖`.
    GradientIntegral,
    /// `∫ P({f > t}) dt` over 64 levels with calibrated perimeters.
    Coarea,
    /// Best `∫ f div Φ` over a seeded family of unit-bounded fields; a
    /// lower bound.
    DivergenceSup,
}

impl VariationMethod {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gradient-integral" | "gradient" => Ok(VariationMethod::GradientIntegral),
            "coarea" => Ok(VariationMethod::Coarea),
            "divergence-sup" | "divergence" => Ok(VariationMethod::DivergenceSup),
            other => Err(Error::InvalidInput(format!("unknown variation method '{other}'"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VariationMethod::GradientIntegral => "gradient-integral",
            VariationMethod::Coarea => "coarea",
            VariationMethod::DivergenceSup => "divergence-sup",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationReport {
    pub tv: f64,
    pub method: VariationMethod,
    /// `(t, calibrated perimeter of {f > t})` for the coarea method.
    pub per_level: Option<Vec<(f64, f64)>>,
    /// True when `tv` is only a lower bound.
    pub lower_bound: bool,
}

/// Levels used by the coarea method.
pub const COAREA_LEVELS: usize = 64;
/// Fields tried by the divergence-sup method.
pub const DIVERGENCE_FIELDS: usize = 32;

pub fn variation_nd(f: &GridFunction, method: VariationMethod, seed: u64) -> Result<VariationReport> {
    let lat = f.lattice();
    match method {
        VariationMethod::GradientIntegral => {
            let norms = gradient_fd(f)?.norms();
            Ok(VariationReport {
                tv: pairwise_sum(&norms) * lat.cell_volume(),
                method,
                per_level: None,
                lower_bound: false,
            })
        }
        VariationMethod::Coarea => {
            let factor = if lat.ndim() == 1 { 1.0 } else { perimeter_calibration(lat.spacing())? };
            let (lo, hi) = f.values().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
            if hi == lo {
                return Ok(VariationReport { tv: 0.0, method, per_level: Some(Vec::new()), lower_bound: false });
            }
            let dt = (hi - lo) / (COAREA_LEVELS - 1) as f64;
            let mut levels = Vec::with_capacity(COAREA_LEVELS);
            for j in 0..COAREA_LEVELS {
                let t = lo + j as f64 * dt;
                let set = RasterSet::new(lat.clone(), f.values().iter().map(|v| *v > t).collect())?;
                levels.push((t, perimeter(&set) / factor));
            }
            let mut terms: Vec<f64> = levels.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * dt).collect();
            terms.push(0.0);
            Ok(VariationReport { tv: pairwise_sum(&terms), method, per_level: Some(levels), lower_bound: false })
        }
        VariationMethod::DivergenceSup => {
            let n = lat.ndim();
            let h = lat.spacing();
            let lo: Vec<f64> = (0..n).map(|a| lat.lower(a) + h).collect();
            let hi: Vec<f64> = (0..n).map(|a| lat.upper(a) - h).collect();
            let pts: Vec<Vec<f64>> = (0..lat.len()).map(|c| lat.point(c)).collect();
            let mut rng = seeded_rng(seed);
            let mut best = 0.0f64;
            for _ in 0..DIVERGENCE_FIELDS {
                // three signed bumps per component
                let comps: Vec<(TestFunctionBattery, Vec<f64>)> = (0..n)
                    .map(|_| {
                        let b = TestFunctionBattery::seeded(&lo, &hi, 3, rng.gen())?;
                        let signs = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
                        Ok((b, signs))
                    })
                    .collect::<Result<_>>()?;
                let fields: Vec<Vec<f64>> = comps
                    .iter()
                    .map(|(b, s)| pts.iter().map(|p| b.bumps.iter().zip(s).map(|(bump, sign)| sign * bump.value(p)).sum()).collect())
                    .collect();
                let sup = (0..pts.len()).map(|c| fields.iter().map(|phi| phi[c] * phi[c]).sum::<f64>()).fold(0.0f64, f64::max);
                // central-difference divergence, so that summing by parts
                // against the sampled gradient is exact
                let strides = lat.strides();
                let pairing: Vec<f64> = (0..pts.len())
                    .map(|c| {
                        let idx = lat.unravel(c);
                        let mut div = 0.0;
                        for (a, phi) in fields.iter().enumerate() {
                            let up = if idx[a] + 1 < lat.dims()[a] { phi[c + strides[a]] } else { 0.0 };
                            let down = if idx[a] > 0 { phi[c - strides[a]] } else { 0.0 };
                            div += (up - down) / (2.0 * h);
                        }
                        f.values()[c] * div
                    })
                    .collect();
                if sup > 0.0 {
                    let val = pairwise_sum(&pairing).abs() * lat.cell_volume() / crate::num::sqrt(sup);
                    best = best.max(val);
                }
            }
            Ok(VariationReport { tv: best, method, per_level: None, lower_bound: true })
        }
    }
}

/// `(∫ V_x dy, ∫ V_y dx)` for a function on a planar lattice: line
/// variations along each axis integrated across the other with weight `h`.
pub fn tonelli_variation(f: &GridFunction) -> Result<(f64, f64)> {
    let lat = f.lattice();
    if lat.ndim() != 2 {
        return Err(Error::Dimension("Tonelli variation needs a two-dimensional grid".into()));
    }
    let (nx, ny) = (lat.dims()[0], lat.dims()[1]);
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidInput("need at least 2 samples per axis".into()));
    }
    let h = lat.spacing();
    let vals = f.values();
    let mut vx = Vec::with_capacity(ny);
    for j in 0..ny {
        let line: Vec<f64> = (0..nx).map(|i| vals[i * ny + j]).collect();
        vx.push(variation_1d(&line)?);
    }
    let mut vy = Vec::with_capacity(nx);
    for i in 0..nx {
        vy.push(variation_1d(&vals[i * ny..(i + 1) * ny])?);
    }
    Ok((pairwise_sum(&vx) * h, pairwise_sum(&vy) * h))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LscReport {
    /// Gradient-integral variation of each term.
    pub variations: Vec<f64>,
    /// `‖f_k − f‖_{L¹}` per term.
    pub l1_distances: Vec<f64>,
    /// Smallest variation over the second half of the sequence.
    pub tv_liminf: f64,
    pub tv_limit: f64,
}

/// Variations along a sequence converging in `L¹` against the variation of
/// the limit.
pub fn lsc_check(sequence: &[GridFunction], limit: &GridFunction) -> Result<LscReport> {
    if sequence.is_empty() {
        return Err(Error::InvalidInput("sequence is empty".into()));
    }
    let mut variations = Vec::with_capacity(sequence.len());
    let mut l1_distances = Vec::with_capacity(sequence.len());
    for fk in sequence {
        if !fk.lattice().same_as(limit.lattice()) {
            return Err(Error::LatticeMismatch);
        }
        variations.push(variation_nd(fk, VariationMethod::GradientIntegral, 0)?.tv);
        l1_distances.push(fk.combine(1.0, limit, -1.0)?.lp_norm(1.0));
    }
    let tail = &variations[variations.len() / 2..];
    Ok(LscReport {
        tv_liminf: tail.iter().fold(f64::INFINITY, |m, v| m.min(*v)),
        tv_limit: variation_nd(limit, VariationMethod::GradientIntegral, 0)?.tv,
        variations,
        l1_distances,
    })
}
