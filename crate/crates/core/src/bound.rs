//! Two-sided evaluation of an inequality `lhs ≤ rhs`.

use serde::{Deserialize, Serialize};

/// Default relative violation tolerance.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Both sides of a claimed inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
}

impl Sides {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs }
    }

    /// Sides of a lower-bound claim `big ≥ small`.
    pub fn at_least(big: f64, small: f64) -> Self {
        Self { lhs: small, rhs: big }
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// `max(1, |lhs|, |rhs|)`.
    pub fn scale(&self) -> f64 {
        1f64.max(self.lhs.abs()).max(self.rhs.abs())
    }

    /// True when `slack < −rel_tol·scale`, or when either side is not finite.
    pub fn violates(&self, rel_tol: f64) -> bool {
        !(self.lhs.is_finite() && self.rhs.is_finite()) || self.slack() < -rel_tol * self.scale()
    }
}
