//! Sobolev norms and embedding inequalities, BV variation, perimeter and
//! the coarea formula, and the one-dimensional BV decomposition.

pub mod decompose;
pub mod embedding;
pub mod variation;

pub use decompose::{decompose_1d, Bv1dDecomposition, DEFAULT_JUMP_THRESHOLD};
pub use embedding::{
    bmo_by_generation, bmo_seminorm, dyadic_cubes, gns_check, morrey_check, poincare_cube_check, regime,
    sobolev_norm, Cube, InequalityCheck, MorreyCheck, Regime, SobolevReport,
};
pub use variation::{
    bv_norm, lsc_check, perimeter, perimeter_calibration, perimeter_window, tonelli_variation, variation_1d,
    variation_nd, LscReport, VariationMethod, VariationReport,
};
