//! Splitting a sampled one-dimensional BV function into absolutely
//! continuous, jump and Cantor parts.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::num::median;

/// Default jump threshold, in units of the local median increment.
pub const DEFAULT_JUMP_THRESHOLD: f64 = 8.0;

/// Increments on each side compared with a candidate jump.
const WINDOW: usize = 4;

/// Increments steeper than this multiple of the mean slope are singular.
const SINGULAR_FACTOR: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Bv1dDecomposition {
    pub x: Vec<f64>,
    /// `f(x_0)`; every part starts at zero.
    pub constant: f64,
    pub ac_part: Vec<f64>,
    pub jump_part: Vec<f64>,
    pub cantor_part: Vec<f64>,
    /// `(location, height)`, the location halfway between the two samples.
    pub jump_locations: Vec<(f64, f64)>,
}

impl Bv1dDecomposition {
    /// `constant + ac + jump + cantor` at every sample.
    pub fn reconstruct(&self) -> Vec<f64> {
        (0..self.x.len())
            .map(|i| self.constant + self.ac_part[i] + self.jump_part[i] + self.cantor_part[i])
            .collect()
    }
}

/// An increment is a jump when it exceeds `threshold` times the median of
/// the `2·4` neighbouring increments. Of the rest, increments whose slope
/// exceeds 8 times the mean slope of all remaining increments are Cantor
/// (singular) increments; the others are absolutely continuous.
pub fn decompose_1d(f: &GridFunction, threshold: f64) -> Result<Bv1dDecomposition> {
    let lat = f.lattice();
    if lat.ndim() != 1 {
        return Err(Error::Dimension("decomposition needs a one-dimensional grid".into()));
    }
    if !(threshold > 0.0) {
        return Err(Error::Domain("jump threshold must be > 0".into()));
    }
    let v = f.values();
    let n = v.len();
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 samples".into()));
    }
    let h = lat.spacing();
    let x: Vec<f64> = (0..n).map(|i| lat.coord(0, i)).collect();
    let d: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    let abs: Vec<f64> = d.iter().map(|t| t.abs()).collect();
    let tiny = 1e-12 * f.sup_norm().max(f64::MIN_POSITIVE);

    let mut is_jump = Vec::with_capacity(d.len());
    for i in 0..d.len() {
        let lo = i.saturating_sub(WINDOW);
        let hi = (i + WINDOW + 1).min(d.len());
        let neighbours: Vec<f64> = (lo..hi).filter(|&j| j != i).map(|j| abs[j]).collect();
        let local = if neighbours.is_empty() { 0.0 } else { median(&neighbours) };
        is_jump.push(abs[i] > threshold * local + tiny);
    }

    let length = (n - 1) as f64 * h;
    let rest_total: f64 = abs.iter().zip(&is_jump).filter(|(_, j)| !**j).map(|(a, _)| a).sum();
    let mean_slope = rest_total / length;

    let mut ac = Vec::with_capacity(n);
    let mut jump = Vec::with_capacity(n);
    let mut cantor = Vec::with_capacity(n);
    let (mut a, mut j, mut c) = (0.0, 0.0, 0.0);
    ac.push(a);
    jump.push(j);
    cantor.push(c);
    let mut jump_locations = Vec::new();
    for i in 0..d.len() {
        if is_jump[i] {
            j += d[i];
            jump_locations.push((0.5 * (x[i] + x[i + 1]), d[i]));
        } else if abs[i] / h > SINGULAR_FACTOR * mean_slope {
            c += d[i];
        } else {
            a += d[i];
        }
        ac.push(a);
        jump.push(j);
        cantor.push(c);
    }
    Ok(Bv1dDecomposition { x, constant: v[0], ac_part: ac, jump_part: jump, cantor_part: cantor, jump_locations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Lattice;

    #[test]
    fn single_step() {
        let lat = Lattice::over_box(&[0.0], &[1.0], 0.01).unwrap();
        let f = GridFunction::from_fn(lat, |x| x[0] + if x[0] > 0.5 { 2.0 } else { 0.0 }).unwrap();
        let dec = decompose_1d(&f, DEFAULT_JUMP_THRESHOLD).unwrap();
        assert_eq!(dec.jump_locations.len(), 1);
        assert!((dec.jump_locations[0].1 - 2.01).abs() < 1e-12);
        assert!((dec.jump_locations[0].0 - 0.5).abs() < 1e-12);
        let back = dec.reconstruct();
        assert!(back.iter().zip(f.values()).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}
