//! Signed and vector measures on a finite set of atoms.
//!
//! Every σ-algebra here is the power set of the atom list, so all the
//! decompositions reduce to per-atom arithmetic: total variation sums atom
//! norms, Jordan splits by sign, Hahn collects the nonnegative atoms, and the
//! Radon–Nikodym density is a per-atom ratio.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num::norm;

/// A measure on finitely many atoms with values in `R^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<String>,
    m: usize,
    weights: Vec<f64>,
}

/// Membership flags aligned with an atom list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomSubset {
    members: Vec<bool>,
}

impl AtomSubset {
    pub fn new(members: Vec<bool>) -> Self {
        AtomSubset { members }
    }
    pub fn all(len: usize) -> Self {
        AtomSubset { members: alloc::vec![true; len] }
    }
    pub fn empty(len: usize) -> Self {
        AtomSubset { members: alloc::vec![false; len] }
    }
    /// Subset whose members are the set bits of `bits` (atom `i` ↔ bit `i`).
    pub fn from_bits(bits: u64, len: usize) -> Self {
        AtomSubset { members: (0..len).map(|i| (bits >> i) & 1 == 1).collect() }
    }
    pub fn len(&self) -> usize {
        self.members.len()
    }
    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|m| *m)
    }
    pub fn contains(&self, i: usize) -> bool {
        self.members[i]
    }
    pub fn members(&self) -> &[bool] {
        &self.members
    }
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter(|(_, m)| **m).map(|(i, _)| i)
    }
    pub fn intersection(&self, other: &AtomSubset) -> AtomSubset {
        AtomSubset { members: self.members.iter().zip(&other.members).map(|(a, b)| *a && *b).collect() }
    }
    pub fn complement(&self) -> AtomSubset {
        AtomSubset { members: self.members.iter().map(|m| !m).collect() }
    }
}

impl AtomicMeasure {
    /// `weights` is row-major: atom `i` owns `weights[i·m .. (i+1)·m]`.
    pub fn new(atoms: Vec<String>, m: usize, weights: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Dimension("measure values need m >= 1".into()));
        }
        if weights.len() != atoms.len() * m {
            return Err(Error::Misaligned { expected: atoms.len() * m, found: weights.len() });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidInput("weights must be finite".into()));
        }
        let mut seen = BTreeSet::new();
        for a in &atoms {
            if !seen.insert(a.as_str()) {
                return Err(Error::DuplicateAtom(a.clone()));
            }
        }
        Ok(AtomicMeasure { atoms, m, weights })
    }

    /// Real measure with atoms named `0, 1, ...`.
    pub fn signed(weights: &[f64]) -> Result<Self> {
        AtomicMeasure::new(numbered_atoms(weights.len()), 1, weights.to_vec())
    }

    /// Vector measure with atoms named `0, 1, ...`.
    pub fn vector(weights: &[Vec<f64>]) -> Result<Self> {
        let m = weights.first().map_or(1, Vec::len);
        if weights.iter().any(|w| w.len() != m) {
            return Err(Error::Dimension("all atoms need the same number of components".into()));
        }
        AtomicMeasure::new(numbered_atoms(weights.len()), m, weights.concat())
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }
    pub fn len(&self) -> usize {
        self.atoms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn weight(&self, atom: usize) -> &[f64] {
        &self.weights[atom * self.m..(atom + 1) * self.m]
    }

    /// The whole space `X` as a subset.
    pub fn everything(&self) -> AtomSubset {
        AtomSubset::all(self.len())
    }

    fn check(&self, e: &AtomSubset) -> Result<()> {
        if e.len() != self.len() {
            return Err(Error::Misaligned { expected: self.len(), found: e.len() });
        }
        Ok(())
    }

    fn check_same_atoms(&self, other: &AtomicMeasure) -> Result<()> {
        if self.atoms != other.atoms {
            return Err(Error::Misaligned { expected: self.len(), found: other.len() });
        }
        Ok(())
    }

    fn real(&self) -> Result<()> {
        if self.m != 1 {
            return Err(Error::VectorMeasure { m: self.m });
        }
        Ok(())
    }

    /// `μ(E)`, the componentwise sum of member weights.
    pub fn measure_of(&self, e: &AtomSubset) -> Result<Vec<f64>> {
        self.check(e)?;
        let mut out = alloc::vec![0.0; self.m];
        for i in e.indices() {
            for (o, w) in out.iter_mut().zip(self.weight(i)) {
                *o += w;
            }
        }
        Ok(out)
    }

    /// `‖μ‖(E) = Σ_{i∈E} ‖w_i‖`; on atoms the singleton partition attains the
    /// supremum over partitions.
    pub fn total_variation(&self, e: &AtomSubset) -> Result<f64> {
        self.check(e)?;
        Ok(e.indices().map(|i| norm(self.weight(i))).sum())
    }

    /// The total variation measure `|μ|` as a real measure.
    pub fn variation_measure(&self) -> AtomicMeasure {
        AtomicMeasure {
            atoms: self.atoms.clone(),
            m: 1,
            weights: (0..self.len()).map(|i| norm(self.weight(i))).collect(),
        }
    }

    /// `(μ⁺, μ⁻)` with `μ = μ⁺ − μ⁻` and disjoint supports.
    pub fn jordan_decomposition(&self) -> Result<(AtomicMeasure, AtomicMeasure)> {
        self.real()?;
        let plus = self.weights.iter().map(|w| w.max(0.0)).collect();
        let minus = self.weights.iter().map(|w| (-w).max(0.0)).collect();
        Ok((
            AtomicMeasure { atoms: self.atoms.clone(), m: 1, weights: plus },
            AtomicMeasure { atoms: self.atoms.clone(), m: 1, weights: minus },
        ))
    }

    /// `(E⁺, E⁻)`: zero-weight atoms go to `E⁺`.
    pub fn hahn_decomposition(&self) -> Result<(AtomSubset, AtomSubset)> {
        self.real()?;
        let plus = AtomSubset::new(self.weights.iter().map(|w| *w >= 0.0).collect());
        let minus = plus.complement();
        Ok((plus, minus))
    }

    /// Lebesgue decomposition of `self` against a nonnegative real `ν`:
    /// returns the density `f` (one `R^m` vector per atom) and the singular
    /// part, with `μ = fν + singular` atom by atom.
    pub fn radon_nikodym(&self, nu: &AtomicMeasure) -> Result<(Vec<Vec<f64>>, AtomicMeasure)> {
        self.check_same_atoms(nu)?;
        nu.real()?;
        nu.check_nonnegative()?;
        let mut density = Vec::with_capacity(self.len());
        let mut singular = Vec::with_capacity(self.weights.len());
        for i in 0..self.len() {
            let v = nu.weights[i];
            let w = self.weight(i);
            if v > 0.0 {
                density.push(w.iter().map(|x| x / v).collect());
                singular.extend(core::iter::repeat_n(0.0, self.m));
            } else {
                density.push(alloc::vec![0.0; self.m]);
                singular.extend_from_slice(w);
            }
        }
        Ok((density, AtomicMeasure { atoms: self.atoms.clone(), m: self.m, weights: singular }))
    }

    fn check_nonnegative(&self) -> Result<()> {
        match self.weights.iter().position(|w| *w < 0.0) {
            Some(atom) => Err(Error::NotPositive { atom, weight: self.weights[atom] }),
            None => Ok(()),
        }
    }

    /// The measure `E ↦ ∫_E f dν` for a per-atom density `f`.
    pub fn with_density(f: &[Vec<f64>], nu: &AtomicMeasure) -> Result<AtomicMeasure> {
        nu.real()?;
        nu.check_nonnegative()?;
        if f.len() != nu.len() {
            return Err(Error::Misaligned { expected: nu.len(), found: f.len() });
        }
        let m = f.first().map_or(1, Vec::len);
        if m == 0 || f.iter().any(|fi| fi.len() != m) {
            return Err(Error::Dimension("density vectors must share one length".into()));
        }
        let weights = f
            .iter()
            .zip(&nu.weights)
            .flat_map(|(fi, v)| fi.iter().map(move |x| x * v))
            .collect();
        AtomicMeasure::new(nu.atoms.clone(), m, weights)
    }

    /// `μ ⌞ E`: weights zeroed outside `E`.
    pub fn restrict(&self, e: &AtomSubset) -> Result<AtomicMeasure> {
        self.check(e)?;
        let mut weights = self.weights.clone();
        for i in 0..self.len() {
            if !e.contains(i) {
                weights[i * self.m..(i + 1) * self.m].fill(0.0);
            }
        }
        Ok(AtomicMeasure { atoms: self.atoms.clone(), m: self.m, weights })
    }

    /// `a·self + b·other` for measures on the same atoms.
    pub fn combine(&self, a: f64, other: &AtomicMeasure, b: f64) -> Result<AtomicMeasure> {
        self.check_same_atoms(other)?;
        if self.m != other.m {
            return Err(Error::Dimension("measures take values in different R^m".into()));
        }
        let weights = self.weights.iter().zip(&other.weights).map(|(x, y)| a * x + b * y).collect();
        Ok(AtomicMeasure { atoms: self.atoms.clone(), m: self.m, weights })
    }

    /// Support: atoms with a nonzero weight.
    pub fn support(&self) -> AtomSubset {
        AtomSubset::new((0..self.len()).map(|i| self.weight(i).iter().any(|w| *w != 0.0)).collect())
    }

    /// Mutual singularity on atoms: the supports are disjoint.
    pub fn is_singular_to(&self, other: &AtomicMeasure) -> Result<bool> {
        self.check_same_atoms(other)?;
        Ok(self.support().intersection(&other.support()).is_empty())
    }

    /// `μ ≪ ν` on atoms: every `ν`-null atom carries no `μ` mass. This is the
    /// whole finite content of the ε–δ criterion.
    pub fn is_absolutely_continuous_wrt(&self, nu: &AtomicMeasure) -> Result<bool> {
        self.check_same_atoms(nu)?;
        nu.real()?;
        Ok((0..self.len()).all(|i| nu.weights[i] != 0.0 || self.weight(i).iter().all(|w| *w == 0.0)))
    }
}

/// `(lhs, rhs)` with `lhs = ‖fν‖(X)` and `rhs = Σ ‖f_i‖ ν_i`.
pub fn density_tv_identity(f: &[Vec<f64>], nu: &AtomicMeasure) -> Result<(f64, f64)> {
    let mu = AtomicMeasure::with_density(f, nu)?;
    let lhs = mu.total_variation(&mu.everything())?;
    let rhs = f.iter().zip(nu.weights()).map(|(fi, v)| norm(fi) * v).sum();
    Ok((lhs, rhs))
}

fn numbered_atoms(n: usize) -> Vec<String> {
    (0..n).map(|i| alloc::format!("{i}")).collect()
}
