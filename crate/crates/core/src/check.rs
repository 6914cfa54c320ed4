/// Two sides of an identity or inequality evaluated numerically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
}

impl Comparison {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Comparison { lhs, rhs }
    }

    pub fn abs_diff(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }

    /// `|lhs − rhs| / max(|rhs|, tiny)`.
    pub fn rel_diff(&self) -> f64 {
        self.abs_diff() / self.rhs.abs().max(f64::MIN_POSITIVE)
    }

    /// `lhs ≤ rhs + tol`.
    pub fn holds_le(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }

    /// `|lhs − rhs| ≤ tol`.
    pub fn holds_eq(&self, tol: f64) -> bool {
        self.abs_diff() <= tol
    }
}
