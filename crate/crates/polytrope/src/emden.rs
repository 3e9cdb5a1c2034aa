//! Direct numerical solution of the radial equation
//! `(xi^2 theta')' + xi^2 theta^n = 0` with a series launch away from the
//! coordinate singularity at the origin, adaptive stepping, and first-zero
//! event detection.

use crate::error::{Error, Result};
use crate::invariants::{invariants_from_state, omega_from_state};
use crate::ode::{self, EventSpec, SolverOptions, Termination};
use crate::profile::{ProfileSample, SolutionProfile};
use crate::types::{PolytropeIndex, RadialState, SurfaceSummary};

/// Largest launch radius for which the quartic series keeps full f64
/// accuracy (truncation error is O(xi^6)).
pub const MAX_LAUNCH_XI: f64 = 1e-2;

/// Controls for [`solve_emden`].
#[derive(Debug, Clone, Copy)]
pub struct IntegrationOptions {
    /// Series launch radius.
    pub launch_xi: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Cutoff radius for solutions without a finite surface (n >= 5).
    pub max_xi: f64,
    /// Number of log-spaced output samples in [`EmdenSolution::profile`].
    pub sample_count: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            launch_xi: 1e-4,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_xi: 1e4,
            sample_count: 1000,
        }
    }
}

impl IntegrationOptions {
    fn validate(&self) -> Result<()> {
        if !(self.launch_xi > 0.0) {
            return Err(Error::InvalidOption {
                name: "launch_xi",
                value: self.launch_xi,
            });
        }
        if self.launch_xi > MAX_LAUNCH_XI {
            return Err(Error::LaunchTooLarge {
                xi0: self.launch_xi,
                max: MAX_LAUNCH_XI,
            });
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidOption {
                name: "rel_tol",
                value: self.rel_tol,
            });
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidOption {
                name: "abs_tol",
                value: self.abs_tol,
            });
        }
        if !(self.max_xi > self.launch_xi) {
            return Err(Error::InvalidOption {
                name: "max_xi",
                value: self.max_xi,
            });
        }
        if self.sample_count < 2 {
            return Err(Error::InvalidOption {
                name: "sample_count",
                value: self.sample_count as f64,
            });
        }
        Ok(())
    }
}

/// First-order form of the radial equation:
/// `theta'' = -theta^n - (2/xi) theta'`.
///
/// `theta^n` is evaluated on `max(theta, 0)` so that the final partial step
/// past the surface stays real for non-integer `n` while the event locator
/// converges.
pub fn emden_rhs(index: PolytropeIndex, s: RadialState) -> Result<(f64, f64)> {
    if s.xi == 0.0 {
        return Err(Error::SingularOrigin);
    }
    Ok((
        s.dtheta,
        -s.theta.max(0.0).powf(index.n()) - 2.0 * s.dtheta / s.xi,
    ))
}

/// Series launch state
/// `theta = 1 - xi^2/6 + n xi^4/120`, `theta' = -xi/3 + n xi^3/30`,
/// with truncation error O(xi^6).
pub fn series_start(index: PolytropeIndex, xi0: f64) -> Result<RadialState> {
    if !(xi0 > 0.0) {
        return Err(Error::InvalidOption {
            name: "xi0",
            value: xi0,
        });
    }
    if xi0 > MAX_LAUNCH_XI {
        return Err(Error::LaunchTooLarge {
            xi0,
            max: MAX_LAUNCH_XI,
        });
    }
    let n = index.n();
    let x2 = xi0 * xi0;
    Ok(RadialState::new(
        xi0,
        1.0 - x2 / 6.0 + n * x2 * x2 / 120.0,
        -xi0 / 3.0 + n * xi0 * x2 / 30.0,
    ))
}

/// Dense solution of the radial equation for one index.
#[derive(Debug, Clone)]
pub struct EmdenSolution {
    index: PolytropeIndex,
    options: IntegrationOptions,
    sol: ode::Solution<2>,
    surface: Option<SurfaceSummary>,
}

impl EmdenSolution {
    pub fn index(&self) -> PolytropeIndex {
        self.index
    }

    pub fn surface(&self) -> Option<SurfaceSummary> {
        self.surface
    }

    /// Last integrated radius: `xi1` when a surface was found, otherwise the
    /// `max_xi` cutoff.
    pub fn xi_end(&self) -> f64 {
        self.sol.t_end
    }

    pub fn launch_xi(&self) -> f64 {
        self.options.launch_xi
    }

    /// Evaluate `(theta, theta')` anywhere in the integrated span.
    pub fn eval(&self, xi: f64) -> Result<RadialState> {
        let y = self.sol.eval(xi)?;
        Ok(RadialState::new(xi, y[0], y[1]))
    }

    /// Accepted integration steps (dense representation).
    pub fn steps(&self) -> &[ode::DenseStep<2>] {
        &self.sol.steps
    }

    /// Sample the solution on the standard log-spaced grid.
    ///
    /// With a finite surface the grid ends just inside `xi1` (at
    /// `(1 - 1e-6) xi1`) so every row keeps `theta > 0` and finite
    /// invariants; the surface itself is reported in the summary.
    pub fn profile(&self) -> SolutionProfile {
        self.profile_with_count(self.options.sample_count)
    }

    pub fn profile_with_count(&self, count: usize) -> SolutionProfile {
        let lo = self.options.launch_xi;
        let hi = match self.surface {
            Some(s) => s.xi1 * (1.0 - 1e-6),
            None => self.sol.t_end,
        };
        let step = (hi / lo).ln() / (count - 1) as f64;
        let samples = (0..count)
            .map(|i| {
                let xi = if i == count - 1 {
                    hi
                } else {
                    lo * (step * i as f64).exp()
                };
                let state = self.eval(xi).expect("grid point inside span");
                self.sample_from(state)
            })
            .collect();
        SolutionProfile {
            index: self.index,
            samples,
            surface: self.surface,
        }
    }

    fn sample_from(&self, state: RadialState) -> ProfileSample {
        let p = invariants_from_state(self.index, state)
            .expect("interior states have positive theta and negative slope");
        ProfileSample {
            xi: state.xi,
            theta: state.theta,
            dtheta: state.dtheta,
            mass: -state.xi * state.xi * state.dtheta,
            u: p.u,
            v: p.v,
            omega: omega_from_state(self.index, state).ok(),
        }
    }
}

/// Integrate the regular solution outward from the series launch.
///
/// When `theta` crosses zero the first zero `xi1` is refined on the dense
/// output and the surface summary is filled; when no crossing occurs before
/// `max_xi` (which happens for n >= 5) the surface is absent.
pub fn solve_emden(index: PolytropeIndex, opts: &IntegrationOptions) -> Result<EmdenSolution> {
    opts.validate()?;
    let start = series_start(index, opts.launch_xi)?;
    let n = index.n();
    let f = move |xi: f64, y: &[f64; 2]| [y[1], -y[0].max(0.0).powf(n) - 2.0 * y[1] / xi];
    let event = EventSpec {
        g: &|_xi: f64, y: &[f64; 2]| y[0],
        direction: -1,
    };
    let solver = SolverOptions {
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        ..Default::default()
    };
    let sol = ode::integrate(
        &f,
        opts.launch_xi,
        opts.max_xi,
        [start.theta, start.dtheta],
        &solver,
        Some(&event),
        None,
    )?;

    let surface = match sol.termination {
        Termination::Event { t: xi1 } => {
            let dtheta1 = sol.eval(xi1)?[1];
            Some(SurfaceSummary {
                xi1,
                mass_coeff: -xi1 * xi1 * dtheta1,
                omega0: index.omega_xi_exponent().map(|e| xi1.powf(e) * -dtheta1),
            })
        }
        _ => None,
    };
    Ok(EmdenSolution {
        index,
        options: *opts,
        sol,
        surface,
    })
}

/// [`solve_emden`] followed by sampling onto the standard grid.
pub fn integrate_emden(index: PolytropeIndex, opts: &IntegrationOptions) -> Result<SolutionProfile> {
    Ok(solve_emden(index, opts)?.profile())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{analytic_theta, analytic_xi1};
    use crate::profile::lane_emden_residual;

    fn idx(n: f64) -> PolytropeIndex {
        PolytropeIndex::new(n).unwrap()
    }

    #[test]
    fn rhs_is_singular_at_origin() {
        assert_eq!(
            emden_rhs(idx(3.0), RadialState::new(0.0, 1.0, 0.0)),
            Err(Error::SingularOrigin)
        );
    }

    #[test]
    fn rhs_n0_reduces_to_constant_forcing() {
        let (d1, d2) = emden_rhs(idx(0.0), RadialState::new(2.0, 0.4, -0.5)).unwrap();
        assert_eq!(d1, -0.5);
        assert!((d2 - (-1.0 + 2.0 * 0.5 / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn rhs_vanishes_on_the_n1_solution() {
        for i in 1..30 {
            let xi = 0.1 * i as f64;
            let (theta, dtheta) = analytic_theta(1.0, xi).unwrap();
            let (_, dd) = emden_rhs(idx(1.0), RadialState::new(xi, theta, dtheta)).unwrap();
            // exact second derivative of sin(xi)/xi
            let exact = -theta - 2.0 * dtheta / xi;
            assert!((dd - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn series_matches_n1_closed_form() {
        let s = series_start(idx(1.0), 0.01).unwrap();
        let (theta, dtheta) = analytic_theta(1.0, 0.01).unwrap();
        assert!((s.theta - theta).abs() <= 1e-14);
        assert!((s.dtheta - dtheta).abs() <= 1e-14);
    }

    #[test]
    fn series_n0_has_no_quartic_term() {
        let s = series_start(idx(0.0), 1e-4).unwrap();
        assert_eq!(s.theta, 1.0 - 1e-8 / 6.0);
        assert_eq!(s.dtheta, -1e-4 / 3.0);
    }

    #[test]
    fn series_quartic_coefficient_is_fourth_order_exact() {
        // With the quartic term the launch residual shrinks ~16x per halving;
        // with a wrong coefficient it would shrink ~4x.
        let index = idx(3.0);
        let defect = |xi: f64| {
            let s = series_start(index, xi).unwrap();
            let (_, dd) = emden_rhs(index, s).unwrap();
            // exact theta'' of the series vs the equation's value
            let series_dd = -1.0 / 3.0 + 3.0 * 3.0 * xi * xi / 30.0;
            (dd - series_dd).abs()
        };
        let d1 = defect(8e-3);
        let d2 = defect(4e-3);
        assert!(d1 / d2 > 12.0, "ratio {}", d1 / d2);
    }

    #[test]
    fn launch_bounds_are_enforced() {
        assert!(matches!(
            series_start(idx(3.0), 0.02),
            Err(Error::LaunchTooLarge { .. })
        ));
        assert!(series_start(idx(3.0), 0.0).is_err());
    }

    #[test]
    fn n0_surface_is_sqrt_six_to_1e8() {
        let sol = solve_emden(idx(0.0), &IntegrationOptions::default()).unwrap();
        let s = sol.surface().unwrap();
        assert!((s.xi1 - analytic_xi1(0.0).unwrap()).abs() < 1e-8);
        assert!((s.omega0.unwrap() - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn n1_matches_closed_form_everywhere() {
        let sol = solve_emden(idx(1.0), &IntegrationOptions::default()).unwrap();
        let s = sol.surface().unwrap();
        assert!((s.xi1 - std::f64::consts::PI).abs() < 1e-8);
        assert!(s.omega0.is_none());
        let mut worst = 0.0f64;
        for i in 1..=500 {
            let xi = 1e-4 + (0.99 * std::f64::consts::PI - 1e-4) * i as f64 / 500.0;
            let num = sol.eval(xi).unwrap();
            let (theta, _) = analytic_theta(1.0, xi).unwrap();
            worst = worst.max((num.theta - theta).abs());
        }
        assert!(worst <= 1e-8, "sup defect {worst}");
    }

    #[test]
    fn n5_never_terminates_before_cutoff() {
        let opts = IntegrationOptions {
            max_xi: 100.0,
            ..Default::default()
        };
        let sol = solve_emden(idx(5.0), &opts).unwrap();
        assert!(sol.surface().is_none());
        assert!((sol.xi_end() - 100.0).abs() < 1e-12);
        let num = sol.eval(50.0).unwrap();
        let (theta, _) = analytic_theta(5.0, 50.0).unwrap();
        assert!((num.theta - theta).abs() < 1e-8);
    }

    #[test]
    fn mass_column_matches_closed_forms() {
        let profile = integrate_emden(idx(1.0), &IntegrationOptions::default()).unwrap();
        let mass = profile.mass_profile();
        // -xi^2 theta' = sin xi - xi cos xi
        for &(xi, m) in mass.iter().step_by(50) {
            let expect = xi.sin() - xi * xi.cos();
            assert!((m - expect).abs() < 1e-8, "xi={xi}");
        }
        let profile0 = integrate_emden(idx(0.0), &IntegrationOptions::default()).unwrap();
        let at_one = profile0
            .samples
            .iter()
            .min_by(|a, b| (a.xi - 1.0).abs().total_cmp(&(b.xi - 1.0).abs()))
            .unwrap();
        assert!((at_one.mass - at_one.xi.powi(3) / 3.0).abs() < 1e-10);
    }

    #[test]
    fn profile_is_monotone_and_log_spaced() {
        let profile = integrate_emden(idx(3.0), &IntegrationOptions::default()).unwrap();
        assert_eq!(profile.samples.len(), 1000);
        for w in profile.samples.windows(2) {
            assert!(w[1].xi > w[0].xi);
            assert!(w[1].theta < w[0].theta);
            assert!(w[1].mass > w[0].mass);
            assert!(w[1].u < w[0].u);
            assert!(w[1].v > w[0].v);
        }
        assert!(lane_emden_residual(&profile).is_ok());
    }

    #[test]
    fn residual_on_dense_output_is_small() {
        // FD residual of (xi^2 theta')' + xi^2 theta^n on the dense output,
        // checked at every accepted step midpoint.
        for n in [0.5, 1.5, 3.0, 4.99] {
            let sol = solve_emden(idx(n), &IntegrationOptions::default()).unwrap();
            let g = |xi: f64| {
                let s = sol.eval(xi).unwrap();
                xi * xi * s.dtheta
            };
            let mut worst = 0.0f64;
            for step in sol.steps() {
                let xi = step.t0 + 0.5 * step.h;
                if xi <= sol.launch_xi() || xi >= sol.xi_end() {
                    continue;
                }
                let h = (1e-5 * xi.max(1e-2)).min(0.49 * (sol.xi_end() - xi));
                if h <= 0.0 {
                    continue;
                }
                let dg = (g(xi + h) - g(xi - h)) / (2.0 * h);
                let s = sol.eval(xi).unwrap();
                worst = worst.max((dg + xi * xi * s.theta.max(0.0).powf(n)).abs());
            }
            assert!(worst <= 1e-6, "n={n}: residual {worst}");
        }
    }

    #[test]
    fn option_validation() {
        let bad = IntegrationOptions {
            launch_xi: -1.0,
            ..Default::default()
        };
        assert!(solve_emden(idx(3.0), &bad).is_err());
        let bad = IntegrationOptions {
            max_xi: 1e-6,
            ..Default::default()
        };
        assert!(solve_emden(idx(3.0), &bad).is_err());
    }
}
