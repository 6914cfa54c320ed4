//! Numerical toolkit for computational real analysis and geometric measure
//! theory: finite signed and vector measures, Hausdorff premeasures and
//! dimension estimates, pointwise differentiation and density, mollifiers
//! and weak derivatives, Sobolev and BV functionals, and area formulas.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and the
//! command line front end live in the `gmtkit` companion crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod area;
pub mod check;
pub mod error;
pub mod grid;
pub mod hausdorff;
pub mod linalg;
pub mod map;
pub mod measures;
pub mod num;
pub mod pointwise;
pub mod smoothing;
pub mod sobolev_bv;

pub use check::Comparison;
pub use error::{Error, Result};
pub use grid::{GridFunction, Lattice, RasterSet, VectorField};
pub use map::ParametricMap;
