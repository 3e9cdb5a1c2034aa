//! Maps between radial states and scale invariants.
//!
//! For a state `(xi, theta, theta')` strictly inside the star the invariants
//! are
//!
//! ```text
//! u = -xi theta^n / theta'      v = -xi theta' / theta
//! omega = (u v^n)^(1/(n-1)) = xi^((n+1)/(n-1)) (-theta')
//! ```
//!
//! Both `omega` forms agree identically on solutions of the radial equation;
//! the product form is evaluated through logarithms so that the surface limit
//! `v -> inf` does not overflow.

use crate::error::{Error, Result};
use crate::types::{PhasePoint, PolytropeIndex, RadialState};

/// Invariants `(u, v)` of an interior radial state.
///
/// Requires `theta > 0` and `theta' < 0`: the map is undefined at the center
/// (`theta' = 0`) and at the surface (`theta = 0`).
pub fn invariants_from_state(index: PolytropeIndex, s: RadialState) -> Result<PhasePoint> {
    if !(s.theta > 0.0 && s.dtheta < 0.0) {
        return Err(Error::DegenerateState {
            theta: s.theta,
            dtheta: s.dtheta,
        });
    }
    let u = -s.xi * s.theta.powf(index.n()) / s.dtheta;
    let v = -s.xi * s.dtheta / s.theta;
    Ok(PhasePoint::new(u, v))
}

/// The invariant `omega = (u v^n)^(1/(n-1))`, undefined at `n = 1`.
pub fn omega(index: PolytropeIndex, p: PhasePoint) -> Result<f64> {
    if index.n() == 1.0 {
        return Err(Error::UndefinedExponent);
    }
    if !(p.u > 0.0 && p.v > 0.0) {
        return Err(Error::DegenerateState {
            theta: p.u,
            dtheta: p.v,
        });
    }
    // exp/ln form: v reaches ~1e300^(1/n) near the surface, where powf would
    // overflow for large n before the outer root is applied.
    Ok(((p.u.ln() + index.n() * p.v.ln()) / (index.n() - 1.0)).exp())
}

/// The equivalent direct form `omega = xi^((n+1)/(n-1)) * (-theta')`.
pub fn omega_from_state(index: PolytropeIndex, s: RadialState) -> Result<f64> {
    let expo = index.omega_xi_exponent().ok_or(Error::UndefinedExponent)?;
    if !(s.xi > 0.0 && s.dtheta < 0.0) {
        return Err(Error::DegenerateState {
            theta: s.theta,
            dtheta: s.dtheta,
        });
    }
    Ok(s.xi.powf(expo) * (-s.dtheta))
}

/// Leading near-origin behavior of the invariants of a regular solution,
/// `u = 3 - n xi^2/5` and `v = xi^2/3`, accurate to `O(xi^4)`.
pub fn near_origin_invariants(index: PolytropeIndex, xi: f64) -> PhasePoint {
    PhasePoint::new(3.0 - index.n() * xi * xi / 5.0, xi * xi / 3.0)
}
