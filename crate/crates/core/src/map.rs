//! Black-box maps `Φ: Ω ⊂ R^k → R^n` and a few built-in charts.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::error::{Error, Result};
use crate::num::{cos, sin};

type Evaluator = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A map evaluated pointwise over an axis-aligned parameter box.
///
/// The optional Jacobian returns the `n×k` matrix row-major. `injective` is
/// asserted by the caller and never checked.
pub struct ParametricMap {
    name: String,
    k: usize,
    n: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    eval: Evaluator,
    jacobian: Option<Evaluator>,
    injective: bool,
}

impl fmt::Debug for ParametricMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricMap")
            .field("name", &self.name)
            .field("k", &self.k)
            .field("n", &self.n)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .field("injective", &self.injective)
            .finish()
    }
}

impl ParametricMap {
    pub fn new<F>(name: &str, k: usize, n: usize, lo: Vec<f64>, hi: Vec<f64>, eval: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        if k == 0 || n == 0 || k > n {
            return Err(Error::Dimension(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
        }
        if lo.len() != k || hi.len() != k {
            return Err(Error::Dimension("parameter box must have k coordinates".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidInput("parameter box must have lo < hi".into()));
        }
        Ok(ParametricMap {
            name: name.into(),
            k,
            n,
            lo,
            hi,
            eval: Box::new(eval),
            jacobian: None,
            injective: false,
        })
    }

    pub fn with_jacobian<F>(mut self, jac: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.jacobian = Some(Box::new(jac));
        self
    }

    pub fn injective(mut self, flag: bool) -> Self {
        self.injective = flag;
        self
    }

    /// Same map, restricted or extended to another parameter box.
    pub fn with_domain(mut self, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != self.k || hi.len() != self.k || lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidInput("invalid parameter box".into()));
        }
        self.lo = lo;
        self.hi = hi;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn lo(&self) -> &[f64] {
        &self.lo
    }
    pub fn hi(&self) -> &[f64] {
        &self.hi
    }
    pub fn is_injective(&self) -> bool {
        self.injective
    }
    pub fn has_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.eval)(x)
    }

    /// Analytic Jacobian (`n×k`, row-major) if one was supplied.
    pub fn analytic_jacobian(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.jacobian.as_ref().map(|j| j(x))
    }

    /// Linear map `x ↦ A x` on the given box; `a` is `n×k` row-major.
    pub fn linear(a: Vec<f64>, n: usize, k: usize, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if a.len() != n * k {
            return Err(Error::Misaligned { expected: n * k, found: a.len() });
        }
        let m = a.clone();
        let map = ParametricMap::new("linear", k, n, lo, hi, move |x| {
            crate::linalg::mat_vec(&m, n, k, x)
        })?;
        Ok(map.with_jacobian(move |_| a.clone()))
    }

    /// `x ↦ (cos x, sin x, x)`.
    pub fn helix(a: f64, b: f64) -> Result<Self> {
        Ok(ParametricMap::new("helix", 1, 3, vec![a], vec![b], |t| vec![cos(t[0]), sin(t[0]), t[0]])?
            .with_jacobian(|t| vec![-sin(t[0]), cos(t[0]), 1.0])
            .injective(true))
    }

    /// `t ↦ (cos t, sin t)`.
    pub fn circle(a: f64, b: f64) -> Result<Self> {
        Ok(ParametricMap::new("circle", 1, 2, vec![a], vec![b], |t| vec![cos(t[0]), sin(t[0])])?
            .with_jacobian(|t| vec![-sin(t[0]), cos(t[0])])
            .injective(b - a <= 2.0 * PI))
    }

    /// `(r, θ) ↦ (r cos θ, r sin θ)` on `]0, r_max[ × ]−π, π[`.
    pub fn polar(r_max: f64) -> Result<Self> {
        Ok(ParametricMap::new("polar", 2, 2, vec![0.0, -PI], vec![r_max, PI], |p| {
            vec![p[0] * cos(p[1]), p[0] * sin(p[1])]
        })?
        .with_jacobian(|p| vec![cos(p[1]), -p[0] * sin(p[1]), sin(p[1]), p[0] * cos(p[1])])
        .injective(true))
    }

    /// Unit sphere in spherical coordinates `(θ, φ) ∈ ]0, π[ × ]0, 2π[`.
    pub fn sphere() -> Result<Self> {
        Ok(ParametricMap::new("sphere", 2, 3, vec![0.0, 0.0], vec![PI, 2.0 * PI], |p| {
            let (t, f) = (p[0], p[1]);
            vec![sin(t) * cos(f), sin(t) * sin(f), cos(t)]
        })?
        .with_jacobian(|p| {
            let (t, f) = (p[0], p[1]);
            vec![
                cos(t) * cos(f),
                -sin(t) * sin(f),
                cos(t) * sin(f),
                sin(t) * cos(f),
                -sin(t),
                0.0,
            ]
        })
        .injective(true))
    }

    /// `x ↦ x²` on `[a, b]`.
    pub fn square(a: f64, b: f64) -> Result<Self> {
        Ok(ParametricMap::new("square", 1, 1, vec![a], vec![b], |x| vec![x[0] * x[0]])?
            .with_jacobian(|x| vec![2.0 * x[0]])
            .injective(a >= 0.0 || b <= 0.0))
    }

    /// Piecewise-linear tent map on `[0, 1]` with `laps` monotone pieces,
    /// each sweeping `[0, height]`.
    pub fn fold(laps: usize, height: f64) -> Result<Self> {
        if laps == 0 {
            return Err(Error::InvalidInput("fold needs at least one lap".into()));
        }
        let l = laps as f64;
        let eval = move |x: &[f64]| {
            let s = (x[0] * l).clamp(0.0, l);
            let lap = (crate::num::floor(s) as usize).min(laps - 1);
            let t = s - lap as f64;
            vec![height * if lap.is_multiple_of(2) { t } else { 1.0 - t }]
        };
        let jac = move |x: &[f64]| {
            let s = (x[0] * l).clamp(0.0, l);
            let lap = (crate::num::floor(s) as usize).min(laps - 1);
            vec![height * l * if lap.is_multiple_of(2) { 1.0 } else { -1.0 }]
        };
        Ok(ParametricMap::new("fold", 1, 1, vec![0.0], vec![1.0], eval)?
            .with_jacobian(jac)
            .injective(laps == 1))
    }

    /// `x ↦ sin(ω x)` on `[a, b]`.
    pub fn sine(omega: f64, a: f64, b: f64) -> Result<Self> {
        ParametricMap::new("sine", 1, 1, vec![a], vec![b], move |x| vec![sin(omega * x[0])])
            .map(|m| m.with_jacobian(move |x| vec![omega * cos(omega * x[0])]))
    }

    /// Identity on the box.
    pub fn identity(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let k = lo.len();
        let mut id = vec![0.0; k * k];
        for i in 0..k {
            id[i * k + i] = 1.0;
        }
        Ok(ParametricMap::linear(id, k, k, lo, hi)?.injective(true))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_laps_cover_the_range() {
        let f = ParametricMap::fold(3, 1.0).unwrap();
        assert_eq!(f.eval(&[0.0]), vec![0.0]);
        assert!((f.eval(&[1.0 / 3.0])[0] - 1.0).abs() < 1e-12);
        assert!((f.eval(&[2.0 / 3.0])[0]).abs() < 1e-12);
        assert!((f.eval(&[1.0])[0] - 1.0).abs() < 1e-12);
        assert_eq!(f.analytic_jacobian(&[0.5]).unwrap(), vec![-3.0]);
    }

    #[test]
    fn rejects_bad_boxes() {
        assert!(ParametricMap::new("bad", 2, 1, vec![0.0, 0.0], vec![1.0, 1.0], |x| x.to_vec()).is_err());
        assert!(ParametricMap::new("bad", 1, 1, vec![1.0], vec![0.0], |x| x.to_vec()).is_err());
    }
}
