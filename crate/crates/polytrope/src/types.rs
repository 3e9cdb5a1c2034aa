//! Domain types: the polytropic index, radial states, phase-plane points, and
//! surface summaries.

use serde::Serialize;

use crate::error::{Error, Result};

/// Polytropic index `n` with its derived scaling exponents.
///
/// The exponent `2/(n-1)` drives every homology formula and is singular at
/// `n = 1`; accessors return `None` there so callers must handle that index
/// explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolytropeIndex {
    n: f64,
}

impl PolytropeIndex {
    pub fn new(n: f64) -> Result<Self> {
        if !n.is_finite() {
            return Err(Error::InvalidIndex {
                n,
                reason: "index must be finite",
            });
        }
        if n < 0.0 {
            return Err(Error::InvalidIndex {
                n,
                reason: "index must be nonnegative",
            });
        }
        Ok(Self { n })
    }

    #[inline]
    pub fn n(&self) -> f64 {
        self.n
    }

    /// Homology exponent `2/(n-1)`, undefined at `n = 1`.
    #[inline]
    pub fn omega_tilde(&self) -> Option<f64> {
        if self.n == 1.0 {
            None
        } else {
            Some(2.0 / (self.n - 1.0))
        }
    }

    /// Exponent `(n+1)/(n-1)` relating `omega` to `xi` and `-theta'`,
    /// undefined at `n = 1`.
    #[inline]
    pub fn omega_xi_exponent(&self) -> Option<f64> {
        if self.n == 1.0 {
            None
        } else {
            Some((self.n + 1.0) / (self.n - 1.0))
        }
    }

    /// Exponent `(n-3)/(n-1)` relating the mass coordinate to `omega`,
    /// undefined at `n = 1`.
    #[inline]
    pub fn mass_xi_exponent(&self) -> Option<f64> {
        if self.n == 1.0 {
            None
        } else {
            Some((self.n - 3.0) / (self.n - 1.0))
        }
    }
}

/// One sample `(xi, theta, theta')` of the dimensionless radial solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialState {
    pub xi: f64,
    pub theta: f64,
    pub dtheta: f64,
}

impl RadialState {
    pub fn new(xi: f64, theta: f64, dtheta: f64) -> Self {
        Self { xi, theta, dtheta }
    }
}

/// Scale invariants `u = dlog m/dlog r` and `v = -dlog(P/rho)/dlog r`.
///
/// Regular solutions run from `(3, 0)` at the center to `(0, inf)` at the
/// surface; both components are nonnegative on physical branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub u: f64,
    pub v: f64,
}

impl PhasePoint {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn distance(&self, other: &PhasePoint) -> f64 {
        (self.u - other.u).hypot(self.v - other.v)
    }
}

/// Classification of a computed trajectory by its inward asymptote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolutionClass {
    /// Regular solution: finite central density, `(u, v) -> (3, 0)` inward.
    E,
    /// Irregular solution whose boundary invariant exceeds the regular value;
    /// `u` grows without bound toward the center.
    F,
    /// Irregular solution whose boundary invariant lies below the regular
    /// value; `v` approaches a positive limit toward the center.
    M,
}

impl std::fmt::Display for SolutionClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolutionClass::E => write!(f, "E"),
            SolutionClass::F => write!(f, "F"),
            SolutionClass::M => write!(f, "M"),
        }
    }
}

/// Surface data of a solution with a finite first zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceSummary {
    /// First zero of theta.
    pub xi1: f64,
    /// `-xi1^2 theta'(xi1)`, the dimensionless total mass coordinate.
    pub mass_coeff: f64,
    /// `xi1^((n+1)/(n-1)) * (-theta'(xi1))`; `None` at `n = 1` where the
    /// exponent is singular.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
}
