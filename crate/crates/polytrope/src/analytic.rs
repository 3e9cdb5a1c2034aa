//! Closed-form solutions for n = 0, 1, 5.
//!
//! These are the ground truth the numerical solvers are checked against:
//!
//! | n | theta(xi)            | u(xi)                 | v(xi)              | xi1    |
//! |---|----------------------|-----------------------|--------------------|--------|
//! | 0 | 1 - xi^2/6           | 3                     | 2xi^2/(6 - xi^2)   | sqrt 6 |
//! | 1 | sin(xi)/xi           | xi^2/(1 - xi cot xi)  | 1 - xi cot xi      | pi     |
//! | 5 | (1 + xi^2/3)^(-1/2)  | 3/(1 + xi^2/3)        | xi^2/(3 + xi^2)    | inf    |

use crate::error::{Error, Result};
use crate::types::PhasePoint;

/// Below this radius the n = 1 forms are evaluated by series: both
/// `sin(xi)/xi` and `1 - xi cot(xi)` cancel catastrophically near zero.
const N1_SERIES_CUTOFF: f64 = 1e-4;

fn supported(n: f64) -> Result<f64> {
    if n == 0.0 || n == 1.0 || n == 5.0 {
        Ok(n)
    } else {
        Err(Error::UnsupportedIndex { n })
    }
}

fn check_domain(n: f64, xi: f64) -> Result<()> {
    let xi1 = analytic_xi1(n)?;
    if xi > xi1 {
        return Err(Error::DomainExceeded { xi, xi1 });
    }
    Ok(())
}

/// First zero of the closed-form solution: `sqrt 6`, `pi`, or infinity.
pub fn analytic_xi1(n: f64) -> Result<f64> {
    match supported(n)? as i64 {
        0 => Ok(6.0_f64.sqrt()),
        1 => Ok(std::f64::consts::PI),
        _ => Ok(f64::INFINITY),
    }
}

/// Closed-form `(theta, theta')` at `xi >= 0`.
pub fn analytic_theta(n: f64, xi: f64) -> Result<(f64, f64)> {
    supported(n)?;
    if xi < 0.0 {
        return Err(Error::OutOfRange {
            x: xi,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    check_domain(n, xi)?;
    match n as i64 {
        0 => Ok((1.0 - xi * xi / 6.0, -xi / 3.0)),
        1 => {
            if xi < N1_SERIES_CUTOFF {
                let x2 = xi * xi;
                Ok((1.0 - x2 / 6.0 + x2 * x2 / 120.0, -xi / 3.0 + xi * x2 / 30.0))
            } else {
                let (s, c) = xi.sin_cos();
                Ok((s / xi, (xi * c - s) / (xi * xi)))
            }
        }
        _ => {
            let w = 1.0 + xi * xi / 3.0;
            let theta = 1.0 / w.sqrt();
            Ok((theta, -(xi / 3.0) / (w * w.sqrt())))
        }
    }
}

/// Closed-form invariants `(u, v)` strictly inside the first zero.
pub fn analytic_invariants(n: f64, xi: f64) -> Result<PhasePoint> {
    supported(n)?;
    if xi <= 0.0 {
        return Err(Error::OutOfRange {
            x: xi,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let xi1 = analytic_xi1(n)?;
    if xi >= xi1 {
        return Err(Error::DomainExceeded { xi, xi1 });
    }
    let x2 = xi * xi;
    match n as i64 {
        0 => Ok(PhasePoint::new(3.0, 2.0 * x2 / (6.0 - x2))),
        1 => {
            if xi < N1_SERIES_CUTOFF {
                // u = 3/(1 + xi^2/15), v = xi^2/3 + xi^4/45, to O(xi^6)
                Ok(PhasePoint::new(
                    3.0 / (1.0 + x2 / 15.0),
                    x2 / 3.0 + x2 * x2 / 45.0,
                ))
            } else {
                let v = 1.0 - xi * xi.cos() / xi.sin();
                Ok(PhasePoint::new(x2 / v, v))
            }
        }
        _ => Ok(PhasePoint::new(3.0 / (1.0 + x2 / 3.0), x2 / (3.0 + x2))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::invariants_from_state;
    use crate::types::{PolytropeIndex, RadialState};

    /// Residual of the radial equation, `(xi^2 theta')' + xi^2 theta^n`,
    /// expanded as `xi^2 theta'' + 2 xi theta' + xi^2 theta^n` with the second
    /// derivative taken by central differences of the closed-form `theta'`.
    fn residual(n: f64, xi: f64) -> f64 {
        let h = 1e-6 * xi.max(0.1);
        let (_, dp) = analytic_theta(n, xi + h).unwrap();
        let (_, dm) = analytic_theta(n, xi - h).unwrap();
        let (theta, dtheta) = analytic_theta(n, xi).unwrap();
        let ddtheta = (dp - dm) / (2.0 * h);
        xi * xi * ddtheta + 2.0 * xi * dtheta + xi * xi * theta.max(0.0).powf(n)
    }

    #[test]
    fn table_values() {
        assert!((analytic_theta(0.0, 1.0).unwrap().0 - 5.0 / 6.0).abs() < 1e-15);
        let th1 = analytic_theta(1.0, std::f64::consts::FRAC_PI_2).unwrap().0;
        assert!((th1 - 2.0 / std::f64::consts::PI).abs() < 1e-15);
        let th5 = analytic_theta(5.0, 3.0_f64.sqrt()).unwrap().0;
        assert!((th5 - 0.5_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn invariant_values() {
        let p = analytic_invariants(0.0, 1.7).unwrap();
        assert_eq!(p.u, 3.0);
        let p = analytic_invariants(5.0, 3.0_f64.sqrt()).unwrap();
        assert!((p.u - 1.5).abs() < 1e-15 && (p.v - 0.5).abs() < 1e-15);
        let p = analytic_invariants(1.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((p.u - std::f64::consts::PI.powi(2) / 4.0).abs() < 1e-14);
        assert!((p.v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn first_zeros() {
        assert!((analytic_xi1(0.0).unwrap() - 2.449489742783178).abs() < 1e-15);
        assert!((analytic_xi1(1.0).unwrap() - std::f64::consts::PI).abs() < 1e-15);
        assert!(analytic_xi1(5.0).unwrap().is_infinite());
        assert!(matches!(
            analytic_xi1(3.0),
            Err(Error::UnsupportedIndex { .. })
        ));
    }

    #[test]
    fn domain_is_enforced() {
        assert!(matches!(
            analytic_theta(0.0, 2.5),
            Err(Error::DomainExceeded { .. })
        ));
        assert!(matches!(
            analytic_invariants(1.0, std::f64::consts::PI),
            Err(Error::DomainExceeded { .. })
        ));
        // theta itself is fine at the zero
        assert!(analytic_theta(1.0, std::f64::consts::PI).is_ok());
    }

    #[test]
    fn closed_forms_satisfy_the_radial_equation() {
        for &(n, hi) in &[(0.0, 2.4), (1.0, 3.1), (5.0, 30.0)] {
            for i in 1..40 {
                let xi = hi * i as f64 / 40.0;
                assert!(
                    residual(n, xi).abs() < 1e-7 * xi * xi.max(1.0),
                    "n={n} xi={xi} residual={}",
                    residual(n, xi)
                );
            }
        }
    }

    #[test]
    fn invariants_match_state_map_everywhere() {
        for &(n, hi) in &[(0.0, 2.44), (1.0, 3.14), (5.0, 50.0)] {
            let index = PolytropeIndex::new(n).unwrap();
            for i in 1..60 {
                let xi = hi * i as f64 / 60.0;
                let (theta, dtheta) = analytic_theta(n, xi).unwrap();
                let direct = analytic_invariants(n, xi).unwrap();
                let mapped =
                    invariants_from_state(index, RadialState::new(xi, theta, dtheta)).unwrap();
                assert!((direct.u - mapped.u).abs() <= 1e-12 * direct.u.max(1.0));
                assert!((direct.v - mapped.v).abs() <= 1e-12 * direct.v.max(1.0));
            }
        }
    }

    #[test]
    fn n5_line_integral() {
        // v = 1 - u/3 exactly along the n = 5 solution.
        for i in 1..100 {
            let xi = 0.4 * i as f64;
            let p = analytic_invariants(5.0, xi).unwrap();
            assert!((p.v - (1.0 - p.u / 3.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn n1_series_joins_smoothly() {
        // Values just below and above the series cutoff agree.
        let below = analytic_theta(1.0, 0.99999e-4).unwrap();
        let above = analytic_theta(1.0, 1.00001e-4).unwrap();
        assert!((below.0 - above.0).abs() < 1e-15);
        assert!((below.1 - above.1).abs() < 1e-18);
        let pb = analytic_invariants(1.0, 0.99999e-4).unwrap();
        let pa = analytic_invariants(1.0, 1.00001e-4).unwrap();
        assert!((pb.u - pa.u).abs() < 1e-11);
        assert!((pb.v - pa.v).abs() < 1e-16);
    }
}
