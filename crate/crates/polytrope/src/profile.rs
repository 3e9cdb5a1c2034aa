//! Sampled radial solutions with their derived invariant columns.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::types::{PolytropeIndex, RadialState, SurfaceSummary};

/// One profile row: the radial state plus its derived columns.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileSample {
    pub xi: f64,
    pub theta: f64,
    pub dtheta: f64,
    /// Mass coordinate `-xi^2 theta'`.
    pub mass: f64,
    pub u: f64,
    pub v: f64,
    /// `None` at n = 1 where the invariant exponent is singular.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

impl ProfileSample {
    pub fn state(&self) -> RadialState {
        RadialState::new(self.xi, self.theta, self.dtheta)
    }
}

/// Ordered table of samples of one radial solution, strictly increasing in
/// `xi`, with the surface summary when the first zero is finite.
#[derive(Debug, Clone)]
pub struct SolutionProfile {
    pub index: PolytropeIndex,
    pub samples: Vec<ProfileSample>,
    pub surface: Option<SurfaceSummary>,
}

impl SolutionProfile {
    /// The `(xi, -xi^2 theta')` mass curve.
    pub fn mass_profile(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.xi, s.mass)).collect()
    }

    pub fn xi_range(&self) -> Option<(f64, f64)> {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => Some((a.xi, b.xi)),
            _ => None,
        }
    }
}

/// Residual `(xi^2 theta')' + xi^2 theta^n` at the interior samples of a
/// profile, by fourth-order central differences on the log-spaced grid.
///
/// The derivative of `g = xi^2 theta'` is taken against `t = ln xi`, so the
/// grid must be uniform in `ln xi` (all grids produced by this crate are).
/// Returns one value per sample index `2..len-2`.
pub fn lane_emden_residual(profile: &SolutionProfile) -> Result<Vec<f64>> {
    let s = &profile.samples;
    if s.len() < 5 {
        return Err(Error::InvalidOption {
            name: "samples",
            value: s.len() as f64,
        });
    }
    let n = profile.index.n();
    let t: Vec<f64> = s.iter().map(|p| p.xi.ln()).collect();
    let h = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    for (i, w) in t.windows(2).enumerate() {
        let dt = w[1] - w[0];
        if (dt - h).abs() > 1e-8 * h.abs() {
            return Err(Error::InvalidOption {
                name: "log spacing",
                value: i as f64,
            });
        }
    }
    let g: Vec<f64> = s.iter().map(|p| p.xi * p.xi * p.dtheta).collect();
    let mut out = Vec::with_capacity(s.len() - 4);
    for i in 2..s.len() - 2 {
        let dg_dt = (g[i - 2] - 8.0 * g[i - 1] + 8.0 * g[i + 1] - g[i + 2]) / (12.0 * h);
        let xi = s[i].xi;
        out.push(dg_dt / xi + xi * xi * s[i].theta.max(0.0).powf(n));
    }
    Ok(out)
}
