//! Scale transformations of solutions and the map from dimensionless
//! profiles to dimensional stellar structure.
//!
//! The radial equation is invariant under
//! `theta(xi) -> A^w theta(A xi)` with `w = 2/(n-1)`; on log-log axes the
//! rescaling is a rigid translation, and points connected by it share the
//! same invariants `(u, v)`.

use crate::emden::{series_start, EmdenSolution, IntegrationOptions};
use crate::error::{Error, Result};
use crate::interp::{cumulative_uniform, MonotoneCubic};
use crate::invariants::invariants_from_state;
use crate::profile::{ProfileSample, SolutionProfile};
use crate::types::{PhasePoint, PolytropeIndex, RadialState, SurfaceSummary};

/// Gravitational constant in the scaled units used by default.
pub const G_SCALED: f64 = 1.0;
/// CODATA value in CGS units (cm^3 g^-1 s^-2), for physical presets.
pub const G_CGS: f64 = 6.674_30e-8;

fn check_scale(a: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidOption {
            name: "scale factor",
            value: a,
        });
    }
    Ok(())
}

/// Rescale a profile: the result samples `theta_A(xi) = A^w theta(A xi)` on
/// the exactly transformed grid `xi_i / A`, so no interpolation error enters.
///
/// The rescaled central value is `A^w`; the surface moves to `xi1 / A`.
pub fn homology_map(a: f64, profile: &SolutionProfile) -> Result<SolutionProfile> {
    check_scale(a)?;
    let w = profile.index.omega_tilde().ok_or(Error::UndefinedExponent)?;
    if a == 1.0 {
        return Ok(profile.clone());
    }
    let aw = a.powf(w);
    let aw1 = a.powf(w + 1.0);
    let aw2 = a.powf(w + 2.0);
    let samples = profile
        .samples
        .iter()
        .map(|s| ProfileSample {
            xi: s.xi / a,
            theta: aw * s.theta,
            dtheta: aw1 * s.dtheta,
            mass: aw2 * s.mass / a,
            // the invariants are unchanged at homologous points
            u: s.u,
            v: s.v,
            omega: s.omega,
        })
        .collect();
    let surface = profile.surface.map(|s| SurfaceSummary {
        xi1: s.xi1 / a,
        mass_coeff: aw2 * s.mass_coeff / a,
        omega0: s.omega0,
    });
    Ok(SolutionProfile {
        index: profile.index,
        samples,
        surface,
    })
}

/// Resample a profile onto the given strictly increasing grid by monotone
/// cubic interpolation of `theta` and `theta'`.
pub fn resample_profile(profile: &SolutionProfile, grid: &[f64]) -> Result<SolutionProfile> {
    let xs: Vec<f64> = profile.samples.iter().map(|s| s.xi).collect();
    let theta = MonotoneCubic::new(xs.clone(), profile.samples.iter().map(|s| s.theta).collect())?;
    let dtheta = MonotoneCubic::new(xs, profile.samples.iter().map(|s| s.dtheta).collect())?;
    let index = profile.index;
    let samples = grid
        .iter()
        .map(|&xi| {
            let state = RadialState::new(xi, theta.eval(xi)?, dtheta.eval(xi)?);
            let p = invariants_from_state(index, state)?;
            Ok(ProfileSample {
                xi,
                theta: state.theta,
                dtheta: state.dtheta,
                mass: -xi * xi * state.dtheta,
                u: p.u,
                v: p.v,
                omega: crate::invariants::omega_from_state(index, state).ok(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SolutionProfile {
        index,
        samples,
        surface: profile.surface,
    })
}

/// The pair of phase points at homologous radii: the original solution at
/// `A xi` and the rescaled solution at `xi`. Scale invariance makes them
/// equal; both are evaluated on the dense solution.
pub fn homologous_points(
    a: f64,
    sol: &EmdenSolution,
    xi: f64,
) -> Result<(PhasePoint, PhasePoint)> {
    check_scale(a)?;
    let index = sol.index();
    let w = index.omega_tilde().ok_or(Error::UndefinedExponent)?;
    let original = sol.eval(a * xi)?;
    let p_original = invariants_from_state(index, original)?;
    let rescaled = RadialState::new(
        xi,
        a.powf(w) * original.theta,
        a.powf(w + 1.0) * original.dtheta,
    );
    let p_rescaled = invariants_from_state(index, rescaled)?;
    Ok((p_original, p_rescaled))
}

/// Integrate the rescaled solution `theta_A` directly from its own launch
/// state, as an independent realization of the scale transformation.
///
/// The launch uses the exact rescaling of the series state at `A xi0`, so
/// `A * launch_xi` must stay within the series bound.
pub fn solve_rescaled(
    a: f64,
    index: PolytropeIndex,
    opts: &IntegrationOptions,
) -> Result<EmdenSolution> {
    check_scale(a)?;
    let w = index.omega_tilde().ok_or(Error::UndefinedExponent)?;
    let inner = series_start(index, a * opts.launch_xi)?;
    let start = RadialState::new(
        opts.launch_xi,
        a.powf(w) * inner.theta,
        a.powf(w + 1.0) * inner.dtheta,
    );
    crate::emden::solve_emden_from(index, start, opts)
}

/// One dimensional sample of a star model.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct StarSample {
    pub r: f64,
    pub rho: f64,
    pub pressure: f64,
    pub mass: f64,
    pub enthalpy: f64,
}

/// Dimensional structure of one polytrope: radius `r = alpha xi`, density
/// `rho = rho_c theta^n`, pressure `P = K rho^(1+1/n)`, enthalpy
/// `H = H_c theta`, and mass `m = 4 pi rho_c alpha^3 (-xi^2 theta')`.
#[derive(Debug, Clone)]
pub struct StarModel {
    pub index: PolytropeIndex,
    pub rho_c: f64,
    pub k_poly: f64,
    pub g: f64,
    /// Length scale; `alpha^2 = (n+1) K rho_c^(1/n - 1) / (4 pi G)`.
    pub alpha: f64,
    /// Central specific enthalpy `(n+1) K rho_c^(1/n)`.
    pub h_c: f64,
    pub profile: Vec<StarSample>,
    pub radius: f64,
    pub mass: f64,
}

/// Build a dimensional star from a dimensionless profile in scaled units
/// (G = 1). Profiles without a finite surface (n >= 5) need an explicit
/// truncation radius.
pub fn build_star(
    rho_c: f64,
    k_poly: f64,
    profile: &SolutionProfile,
    truncation_xi: Option<f64>,
) -> Result<StarModel> {
    build_star_g(rho_c, k_poly, profile, truncation_xi, G_SCALED)
}

/// [`build_star`] with an explicit gravitational constant (`G_CGS` for
/// physical units).
pub fn build_star_g(
    rho_c: f64,
    k_poly: f64,
    profile: &SolutionProfile,
    truncation_xi: Option<f64>,
    g: f64,
) -> Result<StarModel> {
    if !(rho_c > 0.0) {
        return Err(Error::InvalidOption {
            name: "rho_c",
            value: rho_c,
        });
    }
    if !(k_poly > 0.0) {
        return Err(Error::InvalidOption {
            name: "k_poly",
            value: k_poly,
        });
    }
    if !(g > 0.0) {
        return Err(Error::InvalidOption { name: "g", value: g });
    }
    let n = profile.index.n();
    let four_pi_g = 4.0 * std::f64::consts::PI * g;

    // alpha^2 = (n+1) K rho_c^(1/n-1) / (4 pi G). The exponent degenerates at
    // n = 0 (incompressible matter), where K is taken as the central specific
    // enthalpy itself: alpha^2 = K / (4 pi G rho_c).
    let (alpha, h_c) = if n == 0.0 {
        ((k_poly / (four_pi_g * rho_c)).sqrt(), k_poly)
    } else {
        let alpha2 = (n + 1.0) * k_poly * rho_c.powf(1.0 / n - 1.0) / four_pi_g;
        (alpha2.sqrt(), (n + 1.0) * k_poly * rho_c.powf(1.0 / n))
    };

    let (xi_cut, surface_state) = match (profile.surface, truncation_xi) {
        (_, Some(xi)) => {
            let (lo, hi) = profile.xi_range().ok_or(Error::MissingSurface)?;
            if !(xi > lo && xi <= hi) {
                return Err(Error::OutOfRange { x: xi, lo, hi });
            }
            (xi, None)
        }
        (Some(s), None) => (s.xi1, Some(s)),
        (None, None) => return Err(Error::MissingSurface),
    };

    let scale_m = 4.0 * std::f64::consts::PI * rho_c * alpha.powi(3);
    let mut samples: Vec<StarSample> = profile
        .samples
        .iter()
        .take_while(|s| s.xi <= xi_cut)
        .map(|s| StarSample {
            r: alpha * s.xi,
            rho: rho_c * s.theta.powf(n),
            // P = K rho^(1+1/n), evaluated as rho H / (n+1) which is the
            // same algebra and stays finite at n = 0
            pressure: rho_c * s.theta.powf(n) * h_c * s.theta / (n + 1.0),
            mass: scale_m * s.mass,
            enthalpy: h_c * s.theta,
        })
        .collect();

    let (radius, mass) = match surface_state {
        Some(s) => {
            let r = alpha * s.xi1;
            let m = scale_m * s.mass_coeff;
            samples.push(StarSample {
                r,
                rho: 0.0,
                pressure: 0.0,
                mass: m,
                enthalpy: 0.0,
            });
            (r, m)
        }
        None => {
            let last = samples.last().ok_or(Error::MissingSurface)?;
            (last.r, last.mass)
        }
    };

    Ok(StarModel {
        index: profile.index,
        rho_c,
        k_poly,
        g,
        alpha,
        h_c,
        profile: samples,
        radius,
        mass,
    })
}

impl StarModel {
    /// Recover the dimensionless profile from the dimensional one (exact
    /// algebraic inversion; used to round-trip against the input).
    pub fn nondimensionalize(&self) -> Vec<RadialState> {
        let scale_m = 4.0 * std::f64::consts::PI * self.rho_c * self.alpha.powi(3);
        self.profile
            .iter()
            .map(|s| {
                let xi = s.r / self.alpha;
                RadialState::new(
                    xi,
                    s.enthalpy / self.h_c,
                    if xi > 0.0 {
                        -(s.mass / scale_m) / (xi * xi)
                    } else {
                        0.0
                    },
                )
            })
            .collect()
    }
}

/// Largest defect of specific-energy conservation, `max |V + H + G M / R|`,
/// with the potential `V(r) = -G M / R - int_r^R G m / r'^2 dr'` computed by
/// quadrature of the sampled mass column.
///
/// The interior samples must be log-spaced (they are for every profile this
/// crate builds); the last interval to the appended surface row is integrated
/// by trapezoid, which is ample for its ~1e-6 relative width.
pub fn energy_check(model: &StarModel) -> Result<f64> {
    let prof = &model.profile;
    if prof.len() < 6 {
        return Err(Error::InvalidOption {
            name: "profile length",
            value: prof.len() as f64,
        });
    }
    let has_surface_row = prof.last().map(|s| s.enthalpy == 0.0).unwrap_or(false);
    let interior = if has_surface_row {
        &prof[..prof.len() - 1]
    } else {
        prof
    };

    // uniform spacing in log r
    let t: Vec<f64> = interior.iter().map(|s| s.r.ln()).collect();
    let h = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    for w in t.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-8 * h {
            return Err(Error::InvalidOption {
                name: "log spacing",
                value: w[1] - w[0],
            });
        }
    }

    // int G m / r^2 dr = int (G m / r) dlog r, cumulative from the center
    let integrand: Vec<f64> = interior.iter().map(|s| model.g * s.mass / s.r).collect();
    let cum = cumulative_uniform(h, &integrand);
    let full_interior = *cum.last().expect("nonempty");

    // sliver between the last interior sample and the surface row
    let sliver = if has_surface_row {
        let a = &interior[interior.len() - 1];
        let b = &prof[prof.len() - 1];
        0.5 * (model.g * a.mass / (a.r * a.r) + model.g * b.mass / (b.r * b.r)) * (b.r - a.r)
    } else {
        0.0
    };

    let gm_over_r = model.g * model.mass / model.radius;
    let mut worst = 0.0f64;
    for (i, s) in interior.iter().enumerate() {
        // V(r) = -GM/R - (integral from r to R)
        let integral_to_surface = full_interior - cum[i] + sliver;
        let v = -gm_over_r - integral_to_surface;
        worst = worst.max((v + s.enthalpy + gm_over_r).abs());
    }
    if has_surface_row {
        // at the surface H = 0 and V = -GM/R exactly
        let s = prof.last().expect("nonempty");
        worst = worst.max(s.enthalpy.abs());
    }
    Ok(worst)
}
