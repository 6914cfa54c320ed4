use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Every failure the library reports. Variants carry enough context for the
/// CLI to build a machine-readable error record.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A subset, density or second measure does not line up with the atom list.
    Misaligned { expected: usize, found: usize },
    /// Duplicate atom identifier.
    DuplicateAtom(String),
    /// Operation defined only for real (m = 1) measures.
    VectorMeasure { m: usize },
    /// A weight that must be nonnegative is negative.
    NotPositive { atom: usize, weight: f64 },
    /// Shapes or dimensions disagree.
    Dimension(String),
    /// Argument outside its documented domain.
    Domain(String),
    /// A linear map with vanishing Jacobian where an injective one is required.
    SingularMap,
    /// A radius or kernel width below what the lattice can resolve.
    Resolution { requested: f64, minimum: f64 },
    /// A ball, cube or test-function support leaves the sampled box.
    OutsideDomain(String),
    /// A limit estimate did not settle.
    NoLimit(String),
    /// The Sobolev exponent belongs to another embedding regime.
    Regime { n: usize, p: f64, expected: &'static str },
    /// Multiplicity counts kept changing up to the maximum depth.
    NonStabilizing { depth: u32 },
    /// Grids passed together do not share a lattice.
    LatticeMismatch,
    /// Input data that cannot be processed (empty, non-finite, ...).
    InvalidInput(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Misaligned { expected, found } => {
                write!(f, "misaligned: expected {expected} entries, found {found}")
            }
            Error::DuplicateAtom(id) => write!(f, "duplicate atom identifier `{id}`"),
            Error::VectorMeasure { m } => {
                write!(f, "operation requires a real measure, got m = {m}")
            }
            Error::NotPositive { atom, weight } => {
                write!(f, "atom {atom} has negative weight {weight}")
            }
            Error::Dimension(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::SingularMap => write!(f, "linear map is singular"),
            Error::Resolution { requested, minimum } => write!(
                f,
                "under-resolved: requested {requested}, lattice resolves only >= {minimum}"
            ),
            Error::OutsideDomain(msg) => write!(f, "outside sampled domain: {msg}"),
            Error::NoLimit(msg) => write!(f, "no limit: {msg}"),
            Error::Regime { n, p, expected } => {
                write!(f, "p = {p} with n = {n} belongs to the {expected} regime")
            }
            Error::NonStabilizing { depth } => {
                write!(f, "multiplicity did not stabilize up to depth {depth}")
            }
            Error::LatticeMismatch => write!(f, "grids do not share a lattice"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    /// True for failures that come from a numerical limit not settling rather
    /// than from bad input.
    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NoLimit(_) | Error::NonStabilizing { .. })
    }
}
