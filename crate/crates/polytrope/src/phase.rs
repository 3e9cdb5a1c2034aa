//! The autonomous flow of the scale invariants and everything built on it:
//! critical points, the regular separatrix, irregular trajectories with
//! E/F/M classification, and quadrature reconstruction of radial profiles.
//!
//! In `t = log xi` the invariants obey
//!
//! ```text
//! du/dt = u (3 - u - n v)        dv/dt = v (u - 1 + v)
//! ```
//!
//! All curves are computed from this t-parametrized system; the reduced slope
//! `dv/du` is exposed only for pointwise queries because its denominator
//! vanishes on the locus `u (3 - u - n v) = 0`, which regular curves touch at
//! their launch point.

use crate::error::{Error, Result};
use crate::invariants::{near_origin_invariants, omega};
use crate::ode::{self, SolverOptions, Termination};
use crate::profile::{ProfileSample, SolutionProfile};
use crate::types::{PhasePoint, PolytropeIndex, SolutionClass, SurfaceSummary};

/// Controls for phase-plane integration and classification.
#[derive(Debug, Clone, Copy)]
pub struct PhaseOptions {
    /// Radius at which the regular separatrix is launched from the
    /// near-origin expansion `(3 - n xi^2/5, xi^2/3)`.
    pub launch_xi: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Outward termination: the separatrix is cut off once `u < u_min`.
    pub u_min: f64,
    /// Termination bound on `v` (reached outward at the surface).
    pub v_max: f64,
    /// Inward termination bound on `u`; crossing it classifies F.
    pub u_max: f64,
    /// Radius of the ball around `(3, 0)` that detects a regular center.
    pub e_ball: f64,
    /// Radius around the bounded inward limits `(0, 1)` and the interior
    /// critical point that detects class M at span exhaustion.
    pub m_ball: f64,
    /// Step cap for inward runs so terminal balls cannot be stepped over.
    pub h_max_inward: f64,
}

impl Default for PhaseOptions {
    fn default() -> Self {
        Self {
            launch_xi: 1e-3,
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            u_min: 1e-6,
            v_max: 1e6,
            u_max: 1e6,
            e_ball: 1e-6,
            m_ball: 5e-2,
            h_max_inward: 0.25,
        }
    }
}

/// Right-hand side of the autonomous system.
pub fn autonomous_rhs(index: PolytropeIndex, p: PhasePoint) -> (f64, f64) {
    let n = index.n();
    (
        p.u * (3.0 - p.u - n * p.v),
        p.v * (p.u - 1.0 + p.v),
    )
}

/// Reduced slope `dv/du = v(u-1+v) / [u(3-u-n v)]`.
///
/// Fails on the singular locus where the denominator vanishes; callers that
/// need to cross it must integrate the t-parametrized system instead.
pub fn reduced_rhs(index: PolytropeIndex, p: PhasePoint) -> Result<f64> {
    let (du, dv) = autonomous_rhs(index, p);
    if du == 0.0 {
        return Err(Error::SingularLocus { u: p.u, v: p.v });
    }
    Ok(dv / du)
}

/// Where a fixed point of the flow sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalPointKind {
    /// `(0, 0)`.
    Origin,
    /// `(3, 0)`, the regular center.
    Center,
    /// `(0, 1)` on the v axis.
    VAxis,
    /// `((n-3)/(n-1), 2/(n-1))`, inside the positive quadrant only for n > 3.
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CriticalPoint {
    pub point: PhasePoint,
    pub kind: CriticalPointKind,
    /// True when the point lies in the open positive quadrant.
    pub physical: bool,
}

/// Fixed points of the autonomous flow.
///
/// `(0,0)`, `(3,0)` and `(0,1)` exist for every index. The interior point
/// exists for every `n != 1` and is reported even when it is non-physical
/// (`u* <= 0`, which happens for n <= 3); at n = 1 the two defining lines are
/// parallel and there is no interior point.
pub fn critical_points(index: PolytropeIndex) -> Vec<CriticalPoint> {
    let mut pts = vec![
        CriticalPoint {
            point: PhasePoint::new(0.0, 0.0),
            kind: CriticalPointKind::Origin,
            physical: false,
        },
        CriticalPoint {
            point: PhasePoint::new(3.0, 0.0),
            kind: CriticalPointKind::Center,
            physical: true,
        },
        CriticalPoint {
            point: PhasePoint::new(0.0, 1.0),
            kind: CriticalPointKind::VAxis,
            physical: false,
        },
    ];
    let n = index.n();
    if n != 1.0 {
        let u = (n - 3.0) / (n - 1.0);
        let v = 2.0 / (n - 1.0);
        pts.push(CriticalPoint {
            point: PhasePoint::new(u, v),
            kind: CriticalPointKind::Interior,
            physical: u > 0.0 && v > 0.0,
        });
    }
    pts
}

fn m_limit_points(index: PolytropeIndex) -> Vec<PhasePoint> {
    let mut pts = vec![PhasePoint::new(0.0, 1.0)];
    pts.extend(
        critical_points(index)
            .into_iter()
            .filter(|c| c.kind == CriticalPointKind::Interior && c.physical)
            .map(|c| c.point),
    );
    pts
}

#[derive(Debug, Clone)]
enum TrajectoryOrigin {
    /// Launched from the near-origin expansion at the given radius; the
    /// inward limit is `(3, 0)` by construction.
    SeparatrixLaunch { xi: f64 },
    /// Relaunched from an arbitrary phase point; `t = 0` at the start.
    Irregular { start: PhasePoint },
}

/// A computed curve of the autonomous system.
///
/// `points` are the accepted integration steps ordered by `t`. For a
/// separatrix `t` is `log xi` itself; for irregular curves the zero of `t`
/// sits at the start point and only differences of `t` are meaningful.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub index: PolytropeIndex,
    pub points: Vec<(f64, PhasePoint)>,
    pub class: SolutionClass,
    origin: TrajectoryOrigin,
    opts: PhaseOptions,
    forward: Option<ode::Solution<2>>,
    inward: Option<ode::Solution<2>>,
}

impl Trajectory {
    /// Evaluate the curve at parameter `t` (dense, forward segment first).
    pub fn eval(&self, t: f64) -> Result<PhasePoint> {
        let from = |sol: &ode::Solution<2>, t: f64| sol.eval(t).map(|y| PhasePoint::new(y[0], y[1]));
        if let Some(fwd) = &self.forward {
            if t >= fwd.t0 {
                return from(fwd, t);
            }
        }
        if let Some(inw) = &self.inward {
            return from(inw, t);
        }
        match &self.forward {
            Some(fwd) => from(fwd, t),
            None => Err(Error::OutOfRange {
                x: t,
                lo: 0.0,
                hi: 0.0,
            }),
        }
    }

    /// For separatrix curves, the radius `xi = e^t` is meaningful; expose the
    /// launch radius so callers can anchor it.
    pub fn launch_xi(&self) -> Option<f64> {
        match self.origin {
            TrajectoryOrigin::SeparatrixLaunch { xi } => Some(xi),
            TrajectoryOrigin::Irregular { .. } => None,
        }
    }

    fn forward_sol(&self) -> Result<&ode::Solution<2>> {
        self.forward.as_ref().ok_or(Error::NotRegular)
    }

    /// Parameter at which `u` passes the given value (u is strictly
    /// decreasing along the forward segment of a regular curve).
    pub fn t_at_u(&self, u: f64) -> Result<f64> {
        self.t_where(|p| p.u, u, false)
    }

    /// Parameter at which `v` passes the given value (increasing forward).
    pub fn t_at_v(&self, v: f64) -> Result<f64> {
        self.t_where(|p| p.v, v, true)
    }

    /// Parameter of the `u = v` crossing.
    pub fn t_at_u_eq_v(&self) -> Result<f64> {
        self.t_where(|p| p.u - p.v, 0.0, false)
    }

    fn t_where(&self, comp: impl Fn(&PhasePoint) -> f64, value: f64, increasing: bool) -> Result<f64> {
        let sol = self.forward_sol()?;
        let f = |t: f64| {
            let y = sol
                .eval(t)
                .expect("search stays inside the integrated span");
            comp(&PhasePoint::new(y[0], y[1])) - value
        };
        let (mut a, mut b) = (sol.t0, sol.t_end);
        let (mut fa, fb) = (f(a), f(b));
        let sign = if increasing { 1.0 } else { -1.0 };
        if fa * sign > 0.0 || fb * sign < 0.0 {
            return Err(Error::OutOfRange {
                x: value,
                lo: fa.min(fb),
                hi: fa.max(fb),
            });
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            let fm = f(m);
            if (fm > 0.0) == (fa > 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    }
}

fn phase_rhs(index: PolytropeIndex) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    let n = index.n();
    move |_t: f64, y: &[f64; 2]| {
        [
            y[0] * (3.0 - y[0] - n * y[1]),
            y[1] * (y[0] - 1.0 + y[1]),
        ]
    }
}

fn step_points(sol: &ode::Solution<2>, y0: [f64; 2]) -> Vec<(f64, PhasePoint)> {
    let mut pts = vec![(sol.t0, PhasePoint::new(y0[0], y0[1]))];
    for step in &sol.steps {
        let t = step.t_end();
        let inside = if step.h > 0.0 { t <= sol.t_end } else { t >= sol.t_end };
        let (t, y) = if inside {
            (t, step.eval(t))
        } else {
            (sol.t_end, sol.y_end)
        };
        pts.push((t, PhasePoint::new(y[0], y[1])));
        if t == sol.t_end {
            break;
        }
    }
    pts
}

/// Integrate the regular separatrix outward from the near-origin expansion.
///
/// Runs in `t = log xi` from `launch_xi` until `u < u_min`, `v > v_max`
/// (which is how the n = 0 curve, with `u = 3` identically, terminates), or
/// the span is exhausted. The result is class E.
pub fn integrate_separatrix(
    index: PolytropeIndex,
    t_span: f64,
    opts: &PhaseOptions,
) -> Result<Trajectory> {
    if !(t_span > 0.0) {
        return Err(Error::InvalidOption {
            name: "t_span",
            value: t_span,
        });
    }
    let xi0 = opts.launch_xi;
    if !(xi0 > 0.0) {
        return Err(Error::InvalidOption {
            name: "launch_xi",
            value: xi0,
        });
    }
    let p0 = near_origin_invariants(index, xi0);
    let offset = p0.distance(&PhasePoint::new(3.0, 0.0));
    if offset > 1e-3 {
        return Err(Error::LaunchFailure(format!(
            "expansion point at xi = {xi0} sits {offset:.2e} away from (3, 0); reduce launch_xi"
        )));
    }
    let t0 = xi0.ln();
    let f = phase_rhs(index);
    let solver = SolverOptions {
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        ..Default::default()
    };
    let u_min = opts.u_min;
    let v_max = opts.v_max;
    let stop = move |_t: f64, y: &[f64; 2]| y[0] < u_min || y[1] > v_max;
    let y0 = [p0.u, p0.v];
    let sol = ode::integrate(&f, t0, t0 + t_span, y0, &solver, None, Some(&stop))?;
    let points = step_points(&sol, y0);
    Ok(Trajectory {
        index,
        points,
        class: SolutionClass::E,
        origin: TrajectoryOrigin::SeparatrixLaunch { xi: xi0 },
        opts: *opts,
        forward: Some(sol),
        inward: None,
    })
}

/// Integrate inward and outward from an arbitrary start point and classify
/// by the inward asymptote.
pub fn integrate_irregular(
    index: PolytropeIndex,
    start: PhasePoint,
    t_span: f64,
    opts: &PhaseOptions,
) -> Result<Trajectory> {
    if !(t_span > 0.0) {
        return Err(Error::InvalidOption {
            name: "t_span",
            value: t_span,
        });
    }
    if !(start.u > 0.0 && start.v > 0.0) {
        return Err(Error::LaunchFailure(format!(
            "start point ({}, {}) must lie in the open positive quadrant",
            start.u, start.v
        )));
    }
    for cp in critical_points(index) {
        if start.distance(&cp.point) < 1e-9 {
            return Err(Error::CriticalPointStart {
                u: start.u,
                v: start.v,
            });
        }
    }
    let f = phase_rhs(index);
    let y0 = [start.u, start.v];

    let inward_solver = SolverOptions {
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        h_max: opts.h_max_inward,
        // the (3,0) ball is narrow and can be grazed inside a single step
        stop_samples: 8,
        ..Default::default()
    };
    let center = PhasePoint::new(3.0, 0.0);
    let (e_ball, u_max, v_max) = (opts.e_ball, opts.u_max, opts.v_max);
    let stop_in = move |_t: f64, y: &[f64; 2]| {
        PhasePoint::new(y[0], y[1]).distance(&center) <= e_ball || y[0] >= u_max || y[1] >= v_max
    };
    let inward = ode::integrate(&f, 0.0, -t_span, y0, &inward_solver, None, Some(&stop_in))?;

    let outward_solver = SolverOptions {
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        ..Default::default()
    };
    let u_min = opts.u_min;
    let stop_out = move |_t: f64, y: &[f64; 2]| y[0] < u_min || y[1] > v_max;
    let outward = ode::integrate(&f, 0.0, t_span, y0, &outward_solver, None, Some(&stop_out))?;

    let class = classify_inward(index, &inward, opts, t_span)?;
    let mut points = step_points(&inward, y0);
    points.reverse();
    points.extend(step_points(&outward, y0).into_iter().skip(1));

    Ok(Trajectory {
        index,
        points,
        class,
        origin: TrajectoryOrigin::Irregular { start },
        opts: *opts,
        forward: Some(outward),
        inward: Some(inward),
    })
}

fn classify_inward(
    index: PolytropeIndex,
    inward: &ode::Solution<2>,
    opts: &PhaseOptions,
    t_span: f64,
) -> Result<SolutionClass> {
    let last = PhasePoint::new(inward.y_end[0], inward.y_end[1]);
    match inward.termination {
        Termination::Stopped { .. } => {
            if last.distance(&PhasePoint::new(3.0, 0.0)) <= opts.e_ball {
                Ok(SolutionClass::E)
            } else if last.u >= opts.u_max {
                Ok(SolutionClass::F)
            } else if last.v >= opts.v_max {
                Ok(SolutionClass::M)
            } else {
                Err(Error::Inconclusive {
                    t_span,
                    u: last.u,
                    v: last.v,
                })
            }
        }
        Termination::ReachedEnd => {
            // Bounded inward limits with positive v: the v-axis point (0, 1)
            // or the interior critical point.
            if m_limit_points(index)
                .iter()
                .any(|p| last.distance(p) <= opts.m_ball)
            {
                Ok(SolutionClass::M)
            } else {
                Err(Error::Inconclusive {
                    t_span,
                    u: last.u,
                    v: last.v,
                })
            }
        }
        Termination::Event { .. } => unreachable!("inward runs use no event"),
    }
}

/// Classification of a trajectory from its inward behavior.
///
/// E: the inward limit enters the ball around `(3, 0)` (for separatrix curves
/// the launch point is that limit by construction). F: `u` exceeds `u_max` at
/// finite inward `t`. M: bounded inward limit with positive `v`.
pub fn classify_solution(traj: &Trajectory) -> Result<SolutionClass> {
    match (&traj.origin, &traj.inward) {
        (TrajectoryOrigin::SeparatrixLaunch { .. }, _) => Ok(SolutionClass::E),
        (TrajectoryOrigin::Irregular { .. }, Some(inward)) => {
            let span = (inward.t_end - inward.t0).abs();
            classify_inward(traj.index, inward, &traj.opts, span)
        }
        (TrajectoryOrigin::Irregular { .. }, None) => Err(Error::NotRegular),
    }
}

// Gauss-Legendre 5 on [-1, 1].
const GL_X: [f64; 5] = [
    -0.906179845938664,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.906179845938664,
];
const GL_W: [f64; 5] = [
    0.23692688505618908,
    0.47862867049936647,
    0.5688888888888889,
    0.47862867049936647,
    0.23692688505618908,
];

fn gauss5(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for i in 0..5 {
        acc += GL_W[i] * f(mid + half * GL_X[i]);
    }
    acc * half
}

/// Solve `component(t) = target` on one dense step within `[ta, tb]` where
/// the component is monotone.
fn invert_on_step(
    sol: &ode::Solution<2>,
    comp: usize,
    target: f64,
    mut ta: f64,
    mut tb: f64,
) -> f64 {
    let g = |t: f64| sol.eval(t).expect("inside span")[comp] - target;
    let mut ga = g(ta);
    if ga == 0.0 {
        return ta;
    }
    for _ in 0..90 {
        let tm = 0.5 * (ta + tb);
        if tm == ta || tm == tb {
            break;
        }
        let gm = g(tm);
        if gm == 0.0 {
            return tm;
        }
        if (gm > 0.0) == (ga > 0.0) {
            ta = tm;
            ga = gm;
        } else {
            tb = tm;
        }
    }
    0.5 * (ta + tb)
}

/// Increment of `log r` between two parameters of a regular curve, computed
/// as the quadrature `int dv / [v (u(v) - 1 + v)]` along the curve.
///
/// Equals `tb - ta` identically on exact solutions; computing it through the
/// `v`-form exercises the first-integral structure rather than the
/// parametrization.
pub fn log_radius_increment_dv(traj: &Trajectory, ta: f64, tb: f64) -> Result<f64> {
    quadrature_increment(traj, ta, tb, 1, |p| p.v * (p.u - 1.0 + p.v))
}

/// The same increment through the dual form `int du / [u (3 - u - n v(u))]`.
pub fn log_radius_increment_du(traj: &Trajectory, ta: f64, tb: f64) -> Result<f64> {
    let n = traj.index.n();
    quadrature_increment(traj, ta, tb, 0, move |p| p.u * (3.0 - p.u - n * p.v))
}

fn quadrature_increment(
    traj: &Trajectory,
    ta: f64,
    tb: f64,
    comp: usize,
    denom: impl Fn(&PhasePoint) -> f64,
) -> Result<f64> {
    if traj.class != SolutionClass::E {
        return Err(Error::NotRegular);
    }
    let sol = traj.forward_sol()?;
    if tb < ta {
        return Ok(-quadrature_increment(traj, tb, ta, comp, denom)?);
    }
    let mut total = 0.0;
    for step in &sol.steps {
        let lo = step.t0.max(ta);
        let hi = step.t_end().min(tb).min(sol.t_end);
        if hi <= lo {
            continue;
        }
        // Subdivide in t, integrate each piece in the chosen coordinate.
        const PIECES: usize = 4;
        for k in 0..PIECES {
            let t_lo = lo + (hi - lo) * k as f64 / PIECES as f64;
            let t_hi = lo + (hi - lo) * (k + 1) as f64 / PIECES as f64;
            let w_lo = sol.eval(t_lo)?[comp];
            let w_hi = sol.eval(t_hi)?[comp];
            if w_lo == w_hi {
                continue;
            }
            total += gauss5(
                |w| {
                    let t = invert_on_step(sol, comp, w, t_lo, t_hi);
                    let y = sol.eval(t).expect("inside span");
                    1.0 / denom(&PhasePoint::new(y[0], y[1]))
                },
                w_lo,
                w_hi,
            );
        }
    }
    Ok(total)
}

/// Closed-form tail of the `dv` quadrature from `v_end` out to the surface,
/// where `u -> 0`: `int_{v_end}^inf dv / (v (v - 1)) = ln(v_end/(v_end-1))`.
/// The neglected `u(v)` correction is `O(u_end / v_end^2)`.
fn surface_tail(v_end: f64) -> Result<f64> {
    if v_end < 2.0 {
        // The curve has not approached the surface regime (n >= 5 curves
        // never do: v stays below 1).
        return Err(Error::MissingSurface);
    }
    Ok((v_end / (v_end - 1.0)).ln())
}

/// Assign `log(r/R)` to every trajectory point of a regular curve by
/// quadrature along the curve, normalized so the surface maps to zero.
///
/// `p_ref` must lie on the trajectory; increments are accumulated from it.
/// Interior points get negative values, diverging to `-inf` at the center
/// (beyond the first sample).
pub fn radius_quadrature(
    traj: &Trajectory,
    p_ref: PhasePoint,
) -> Result<Vec<(PhasePoint, f64)>> {
    if traj.class != SolutionClass::E {
        return Err(Error::NotRegular);
    }
    let sol = traj.forward_sol()?;
    // Validate the reference point against the curve.
    let t_ref = traj.t_at_v(p_ref.v).map_err(|_| Error::NotOnTrajectory {
        u: p_ref.u,
        v: p_ref.v,
    })?;
    let on_curve = traj.eval(t_ref)?;
    if (on_curve.u - p_ref.u).abs() > 1e-6 * (1.0 + p_ref.u.abs()) {
        return Err(Error::NotOnTrajectory {
            u: p_ref.u,
            v: p_ref.v,
        });
    }

    let t_end = sol.t_end;
    let v_end = PhasePoint::new(sol.y_end[0], sol.y_end[1]).v;
    let tail = surface_tail(v_end)?;
    // log r of the reference point relative to the surface.
    let ref_to_end = log_radius_increment_dv(traj, t_ref, t_end)?;
    let log_r_ref = -(ref_to_end + tail);

    let mut out = Vec::with_capacity(traj.points.len());
    for &(t, p) in &traj.points {
        let inc = log_radius_increment_dv(traj, t_ref, t)?;
        out.push((p, log_r_ref + inc));
    }
    Ok(out)
}

/// Rebuild the radial profile from a separatrix trajectory by quadrature:
/// `d log theta / d log xi = -v` integrated from the center normalization
/// `theta -> 1`, sampled on `count` log-spaced radii.
///
/// The center tail of the quadrature uses the expansion
/// `int_0^{xi0} v dlog xi = xi0^2/6 + (1/18 - n/30) xi0^4/4`.
pub fn reconstruct_profile(traj: &Trajectory, count: usize) -> Result<SolutionProfile> {
    if traj.class != SolutionClass::E {
        return Err(Error::NotRegular);
    }
    let xi0 = traj.launch_xi().ok_or(Error::NotRegular)?;
    let sol = traj.forward_sol()?;
    if count < 2 {
        return Err(Error::InvalidOption {
            name: "count",
            value: count as f64,
        });
    }
    let n = traj.index.n();
    let t0 = sol.t0;
    let t_end = sol.t_end;

    // Cumulative int v dt at step boundaries (Gauss-5 is exact on the
    // quartic dense polynomial).
    let v_of = |t: f64| sol.eval(t).expect("inside span")[1];
    let mut boundaries = Vec::with_capacity(sol.steps.len() + 1);
    let mut cumulative = Vec::with_capacity(sol.steps.len() + 1);
    boundaries.push(t0);
    cumulative.push(0.0);
    let mut acc = 0.0;
    for step in &sol.steps {
        let hi = step.t_end().min(t_end).max(t0);
        let lo = *boundaries.last().unwrap();
        if hi <= lo {
            break;
        }
        acc += gauss5(v_of, lo, hi);
        boundaries.push(hi);
        cumulative.push(acc);
        if hi >= t_end {
            break;
        }
    }
    let center_tail = xi0 * xi0 / 6.0 + (1.0 / 18.0 - n / 30.0) * xi0.powi(4) / 4.0;

    let q_at = |t: f64| -> f64 {
        let i = boundaries.partition_point(|&b| b <= t).saturating_sub(1);
        let i = i.min(boundaries.len() - 2);
        if t <= boundaries[0] {
            return 0.0;
        }
        cumulative[i] + gauss5(v_of, boundaries[i], t.min(t_end))
    };

    let index = traj.index;
    let step_t = (t_end - t0) / (count - 1) as f64;
    let mut samples = Vec::with_capacity(count);
    for i in 0..count {
        let t = if i == count - 1 { t_end } else { t0 + step_t * i as f64 };
        let y = sol.eval(t)?;
        let p = PhasePoint::new(y[0], y[1]);
        let xi = t.exp();
        let theta = (-(center_tail + q_at(t))).exp();
        let dtheta = -p.v * theta / xi;
        samples.push(ProfileSample {
            xi,
            theta,
            dtheta,
            mass: xi * p.v * theta,
            u: p.u,
            v: p.v,
            omega: omega(index, p).ok(),
        });
    }

    // Surface summary from the quadrature tail.
    let last = samples.last().expect("count >= 2");
    let surface = match surface_tail(last.v) {
        Ok(tail) => {
            let xi1 = (t_end + tail).exp();
            let omega0 = match (index.omega_xi_exponent(), last.omega) {
                (Some(k), Some(om)) => Some(om * ((k - 2.0) * tail).exp()),
                _ => None,
            };
            Some(SurfaceSummary {
                xi1,
                mass_coeff: last.mass,
                omega0,
            })
        }
        Err(_) => None,
    };

    Ok(SolutionProfile {
        index,
        samples,
        surface,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(n: f64) -> PolytropeIndex {
        PolytropeIndex::new(n).unwrap()
    }

    #[test]
    fn rhs_vanishes_at_fixed_points() {
        for n in [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0] {
            for cp in critical_points(idx(n)) {
                let (du, dv) = autonomous_rhs(idx(n), cp.point);
                assert!(du.abs() <= 1e-14 && dv.abs() <= 1e-14, "n={n} {cp:?}");
            }
        }
    }

    #[test]
    fn interior_point_positions() {
        let pts = critical_points(idx(5.0));
        let interior = pts
            .iter()
            .find(|c| c.kind == CriticalPointKind::Interior)
            .unwrap();
        assert!((interior.point.u - 0.5).abs() < 1e-15);
        assert!((interior.point.v - 0.5).abs() < 1e-15);
        assert!(interior.physical);

        // at n = 3 the interior point coincides with the v-axis point
        let pts = critical_points(idx(3.0));
        let interior = pts
            .iter()
            .find(|c| c.kind == CriticalPointKind::Interior)
            .unwrap();
        assert_eq!(interior.point, PhasePoint::new(0.0, 1.0));
        assert!(!interior.physical);

        // no interior point at n = 1
        assert_eq!(critical_points(idx(1.0)).len(), 3);
    }

    #[test]
    fn reduced_slope_near_launch_and_on_n5_line() {
        // Near the center the curve obeys v = (5/3n)(3 - u).
        let n = 3.0;
        let xi = 1e-3;
        let p = near_origin_invariants(idx(n), xi);
        let slope = reduced_rhs(idx(n), p).unwrap();
        assert!(
            (slope - (-5.0 / (3.0 * n))).abs() < 1e-4,
            "slope {slope} vs {}",
            -5.0 / (3.0 * n)
        );

        // Along v = 1 - u/3 the n = 5 slope is exactly -1/3.
        for u in [0.3, 1.0, 2.0, 2.9] {
            let p = PhasePoint::new(u, 1.0 - u / 3.0);
            let slope = reduced_rhs(idx(5.0), p).unwrap();
            assert!((slope + 1.0 / 3.0).abs() < 1e-13, "u={u}: {slope}");
        }

        assert!(matches!(
            reduced_rhs(idx(3.0), PhasePoint::new(3.0, 0.0)),
            Err(Error::SingularLocus { .. })
        ));
    }

    #[test]
    fn n5_separatrix_stays_on_the_line() {
        let traj = integrate_separatrix(idx(5.0), 30.0, &PhaseOptions::default()).unwrap();
        let mut worst = 0.0f64;
        for &(_, p) in &traj.points {
            worst = worst.max((p.v - (1.0 - p.u / 3.0)).abs());
        }
        assert!(worst <= 1e-8, "deviation {worst}");
        assert_eq!(traj.class, SolutionClass::E);
    }

    #[test]
    fn n0_separatrix_has_constant_u() {
        let traj = integrate_separatrix(idx(0.0), 40.0, &PhaseOptions::default()).unwrap();
        for &(t, p) in &traj.points {
            assert!((p.u - 3.0).abs() < 1e-9, "t={t}");
        }
        // v follows 2 xi^2/(6 - xi^2) parametrically in xi = e^t; the
        // comparison inherits the O(xi0^4) launch truncation, which enters
        // relatively at the 1e-7 level for xi0 = 1e-3.
        for &(t, p) in traj.points.iter().skip(1) {
            let xi2 = (2.0 * t).exp();
            if xi2 < 5.5 {
                let expect = 2.0 * xi2 / (6.0 - xi2);
                assert!(
                    (p.v - expect).abs() <= 1e-5 * (1.0 + expect),
                    "t={t} v={} expect={expect}",
                    p.v
                );
            }
        }
    }

    #[test]
    fn n3_terminal_omega_matches_surface_value() {
        let traj = integrate_separatrix(idx(3.0), 40.0, &PhaseOptions::default()).unwrap();
        let (_, last) = *traj.points.last().unwrap();
        let om = omega(idx(3.0), last).unwrap();
        assert!((om - 2.018).abs() / 2.018 < 0.01, "omega {om}");
    }

    #[test]
    fn irregular_start_validation() {
        let opts = PhaseOptions::default();
        assert!(matches!(
            integrate_irregular(idx(3.0), PhasePoint::new(3.0, 0.0), 10.0, &opts),
            Err(Error::CriticalPointStart { .. })
        ));
        assert!(integrate_irregular(idx(3.0), PhasePoint::new(-1.0, 1.0), 10.0, &opts).is_err());
    }

    #[test]
    fn n5_start_on_the_line_recovers_class_e() {
        // On the exact integral curve the inward run lands in the (3,0) ball.
        let opts = PhaseOptions::default();
        let start = PhasePoint::new(2.0, 1.0 - 2.0 / 3.0);
        let traj = integrate_irregular(idx(5.0), start, 60.0, &opts).unwrap();
        assert_eq!(traj.class, SolutionClass::E);
        assert_eq!(classify_solution(&traj).unwrap(), SolutionClass::E);
    }

    #[test]
    fn perturbed_boundary_omega_classifies_f_and_m() {
        for n in [2.0, 3.0, 4.0] {
            let index = idx(n);
            let opts = PhaseOptions::default();
            let sep = integrate_separatrix(index, 40.0, &opts).unwrap();
            let (_, anchor) = *sep.points.last().unwrap();
            for (factor, expect) in [(1.1, SolutionClass::F), (0.9, SolutionClass::M)] {
                // scaling u by f^(n-1) at fixed v scales omega by f
                let start = PhasePoint::new(anchor.u * factor.powf(n - 1.0), anchor.v);
                let traj = integrate_irregular(index, start, 80.0, &opts).unwrap();
                assert_eq!(traj.class, expect, "n={n} factor={factor}");
            }
        }
    }

    #[test]
    fn quadrature_increment_equals_parameter_difference() {
        let traj = integrate_separatrix(idx(3.0), 40.0, &PhaseOptions::default()).unwrap();
        let t0 = traj.t_at_u(2.5).unwrap();
        let t1 = traj.t_at_u(0.2).unwrap();
        let dv_form = log_radius_increment_dv(&traj, t0, t1).unwrap();
        let du_form = log_radius_increment_du(&traj, t0, t1).unwrap();
        let dt = t1 - t0;
        assert!((dv_form - dt).abs() <= 1e-8, "dv {dv_form} vs dt {dt}");
        assert!((du_form - dt).abs() <= 1e-8, "du {du_form} vs dt {dt}");
        assert!((dv_form - du_form).abs() <= 1e-8);
    }

    #[test]
    fn quadrature_requires_regular_curve() {
        let opts = PhaseOptions::default();
        let sep = integrate_separatrix(idx(3.0), 40.0, &opts).unwrap();
        let (_, anchor) = *sep.points.last().unwrap();
        let start = PhasePoint::new(anchor.u * 1.4, anchor.v);
        let traj = integrate_irregular(idx(3.0), start, 80.0, &opts).unwrap();
        assert!(matches!(
            radius_quadrature(&traj, start),
            Err(Error::NotRegular)
        ));
    }

    #[test]
    fn radius_quadrature_normalizes_surface_to_zero() {
        let traj = integrate_separatrix(idx(3.0), 40.0, &PhaseOptions::default()).unwrap();
        let (_, p_ref) = traj.points[traj.points.len() / 2];
        let assigned = radius_quadrature(&traj, p_ref).unwrap();
        // log r is strictly increasing and approaches 0 at the outer end
        for w in assigned.windows(2) {
            assert!(w[1].1 > w[0].1);
        }
        let last = assigned.last().unwrap().1;
        assert!(last < 0.0 && last > -1e-4, "last log r {last}");
        // off-curve reference is rejected
        let bad = PhasePoint::new(p_ref.u * 1.5, p_ref.v);
        assert!(matches!(
            radius_quadrature(&traj, bad),
            Err(Error::NotOnTrajectory { .. })
        ));
    }

    #[test]
    fn n5_has_no_surface_for_quadrature() {
        let traj = integrate_separatrix(idx(5.0), 30.0, &PhaseOptions::default()).unwrap();
        let (_, p_ref) = traj.points[traj.points.len() / 2];
        assert!(matches!(
            radius_quadrature(&traj, p_ref),
            Err(Error::MissingSurface)
        ));
    }
}
