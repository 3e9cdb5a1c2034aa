//! Embedded Dormand-Prince 5(4) integration with dense output and event
//! location.
//!
//! The solver keeps every accepted step together with its quartic interpolant,
//! so solutions can be evaluated anywhere in the covered span at the accuracy
//! of the integration itself. Events are located by a safeguarded
//! bisection/secant search on the dense interpolant of the step that brackets
//! the sign change. Integration runs in either direction of `t`.

use crate::error::{Error, Result};

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Error coefficients (5th order minus embedded 4th order).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense-output coefficients.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// Step controller constants.
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Step-size and accuracy controls.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on |h|; unbounded by default.
    pub h_max: f64,
    pub max_steps: usize,
    /// Interior points per step at which the stop predicate is also checked,
    /// so narrow stop regions cannot be stepped over. Zero checks endpoints
    /// only.
    pub stop_samples: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
            stop_samples: 0,
        }
    }
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    cont: [[f64; 5]; N],
}

impl<const N: usize> DenseStep<N> {
    /// Evaluate the interpolant; `t` is clamped to the step internally by the
    /// quartic itself (no checks), callers pick the right step.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let mut y = [0.0; N];
        for (i, c) in self.cont.iter().enumerate() {
            y[i] = c[0] + s * (c[1] + s1 * (c[2] + s * (c[3] + s1 * c[4])));
        }
        y
    }

    /// Time derivative of the interpolant.
    pub fn eval_derivative(&self, t: f64) -> [f64; N] {
        let s = (t - self.t0) / self.h;
        let mut dy = [0.0; N];
        for (i, c) in self.cont.iter().enumerate() {
            // d/ds of c0 + s c1 + s(1-s) c2 + s^2(1-s) c3 + s^2(1-s)^2 c4
            let d = c[1]
                + (1.0 - 2.0 * s) * c[2]
                + s * (2.0 - 3.0 * s) * c[3]
                + 2.0 * s * (1.0 - s) * (1.0 - 2.0 * s) * c[4];
            dy[i] = d / self.h;
        }
        dy
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.h
    }
}

/// Why the driver stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    ReachedEnd,
    /// An event function crossed zero; `t` is the refined crossing.
    Event { t: f64 },
    /// A stop predicate fired at the end of an accepted step.
    Stopped { t: f64 },
}

/// Dense solution over the integrated span.
#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub t0: f64,
    pub t_end: f64,
    pub y_end: [f64; N],
    pub steps: Vec<DenseStep<N>>,
    pub termination: Termination,
    pub n_accepted: usize,
    pub n_rejected: usize,
}

impl<const N: usize> Solution<N> {
    /// Evaluate the dense solution at `t` inside the covered span.
    pub fn eval(&self, t: f64) -> Result<[f64; N]> {
        let (lo, hi) = if self.t0 <= self.t_end {
            (self.t0, self.t_end)
        } else {
            (self.t_end, self.t0)
        };
        if !(lo..=hi).contains(&t) {
            return Err(Error::OutOfRange { x: t, lo, hi });
        }
        Ok(self.step_containing(t).eval(t))
    }

    fn step_containing(&self, t: f64) -> &DenseStep<N> {
        let forward = self.steps[0].h > 0.0;
        let mut lo = 0usize;
        let mut hi = self.steps.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            let step_end = self.steps[mid].t_end();
            let before = if forward { t > step_end } else { t < step_end };
            if before {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        &self.steps[lo]
    }
}

/// Event crossing detector: stop where `g(t, y)` crosses zero with the given
/// sign (`-1` falling, `+1` rising, `0` either).
pub struct EventSpec<'a, const N: usize> {
    pub g: &'a dyn Fn(f64, &[f64; N]) -> f64,
    pub direction: i8,
}

/// Integrate `dy/dt = f(t, y)` from `t0` to `t_end` (either direction).
///
/// `event` terminates at a refined zero crossing of its function; `stop`
/// terminates at the end of the first accepted step whose endpoint satisfies
/// the predicate.
pub fn integrate<const N: usize>(
    f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    t_end: f64,
    y0: [f64; N],
    opts: &SolverOptions,
    event: Option<&EventSpec<'_, N>>,
    stop: Option<&dyn Fn(f64, &[f64; N]) -> bool>,
) -> Result<Solution<N>> {
    if !(opts.rel_tol > 0.0) {
        return Err(Error::InvalidOption {
            name: "rel_tol",
            value: opts.rel_tol,
        });
    }
    if !(opts.abs_tol > 0.0) {
        return Err(Error::InvalidOption {
            name: "abs_tol",
            value: opts.abs_tol,
        });
    }
    let span = t_end - t0;
    if span == 0.0 || !span.is_finite() {
        return Err(Error::InvalidOption {
            name: "t_end - t0",
            value: span,
        });
    }
    let dir = span.signum();

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = dir * initial_step(f, t, &y, &k1, dir, opts);
    let mut g_prev = event.map(|e| (e.g)(t, &y));

    let mut steps: Vec<DenseStep<N>> = Vec::new();
    let mut n_accepted = 0usize;
    let mut n_rejected = 0usize;
    let mut facold: f64 = 1e-4;

    loop {
        if n_accepted + n_rejected >= opts.max_steps {
            return Err(Error::MaxSteps(opts.max_steps));
        }
        if h.abs() > opts.h_max {
            h = dir * opts.h_max;
        }
        let mut last = false;
        if (t + 1.01 * h - t_end) * dir > 0.0 {
            h = t_end - t;
            last = true;
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t });
        }

        // Stage evaluations.
        let yt = |terms: &[(f64, &[f64; N])]| -> [f64; N] {
            let mut out = y;
            for &(c, k) in terms {
                for i in 0..N {
                    out[i] += h * c * k[i];
                }
            }
            out
        };
        let k2 = f(t + C2 * h, &yt(&[(A21, &k1)]));
        let k3 = f(t + C3 * h, &yt(&[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &yt(&[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &yt(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &yt(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = yt(&[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &y1);

        // Scaled RMS error of the embedded pair.
        let mut err_sq = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y1[i].abs());
            err_sq += (e / scale) * (e / scale);
        }
        let err = (err_sq / N as f64).sqrt();

        if err <= 1.0 {
            // Accept: build the dense interpolant.
            let mut cont = [[0.0; 5]; N];
            for i in 0..N {
                let ydiff = y1[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                cont[i][0] = y[i];
                cont[i][1] = ydiff;
                cont[i][2] = bspl;
                cont[i][3] = ydiff - h * k7[i] - bspl;
                cont[i][4] = h
                    * (D1 * k1[i]
                        + D3 * k3[i]
                        + D4 * k4[i]
                        + D5 * k5[i]
                        + D6 * k6[i]
                        + D7 * k7[i]);
            }
            let step = DenseStep { t0: t, h, cont };
            let t1 = t + h;
            n_accepted += 1;

            // Event crossing inside this step?
            if let (Some(ev), Some(gp)) = (event, g_prev) {
                let g1 = (ev.g)(t1, &y1);
                let crossed = match ev.direction {
                    d if d < 0 => gp > 0.0 && g1 <= 0.0,
                    d if d > 0 => gp < 0.0 && g1 >= 0.0,
                    _ => gp * g1 <= 0.0 && gp != g1,
                };
                if crossed {
                    let t_event = refine_event(&step, ev, t, t1, gp, g1);
                    let y_event = step.eval(t_event);
                    steps.push(step);
                    return Ok(Solution {
                        t0,
                        t_end: t_event,
                        y_end: y_event,
                        steps,
                        termination: Termination::Event { t: t_event },
                        n_accepted,
                        n_rejected,
                    });
                }
                g_prev = Some(g1);
            }

            if let Some(pred) = stop {
                let mut fired: Option<(f64, [f64; N])> = None;
                for j in 1..=opts.stop_samples {
                    let ts = t + h * (j as f64 / (opts.stop_samples as f64 + 1.0));
                    let ys = step.eval(ts);
                    if pred(ts, &ys) {
                        fired = Some((ts, ys));
                        break;
                    }
                }
                if fired.is_none() && pred(t1, &y1) {
                    fired = Some((t1, y1));
                }
                if let Some((ts, ys)) = fired {
                    steps.push(step);
                    return Ok(Solution {
                        t0,
                        t_end: ts,
                        y_end: ys,
                        steps,
                        termination: Termination::Stopped { t: ts },
                        n_accepted,
                        n_rejected,
                    });
                }
            }

            steps.push(step);
            t = t1;
            y = y1;
            k1 = k7; // first-same-as-last

            if last {
                return Ok(Solution {
                    t0,
                    t_end: t,
                    y_end: y,
                    steps,
                    termination: Termination::ReachedEnd,
                    n_accepted,
                    n_rejected,
                });
            }

            let fac11 = err.max(1e-16).powf(EXPO1);
            let fac = (fac11 / facold.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            h /= fac;
            facold = err.max(1e-4);
        } else {
            n_rejected += 1;
            let fac11 = err.powf(EXPO1);
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
        }
    }
}

/// Starting step heuristic from the scaled sizes of `y`, `f`, and an Euler
/// probe of the second derivative.
fn initial_step<const N: usize>(
    f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    dir: f64,
    opts: &SolverOptions,
) -> f64 {
    let scale = |y: &[f64; N], i: usize| opts.abs_tol + opts.rel_tol * y[i].abs();
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        d0 += (y0[i] / scale(y0, i)).powi(2);
        d1 += (f0[i] / scale(y0, i)).powi(2);
    }
    d0 = (d0 / N as f64).sqrt();
    d1 = (d1 / N as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };

    let mut y1 = *y0;
    for i in 0..N {
        y1[i] += dir * h0 * f0[i];
    }
    let f1 = f(t0 + dir * h0, &y1);
    let mut d2 = 0.0;
    for i in 0..N {
        d2 += ((f1[i] - f0[i]) / scale(y0, i)).powi(2);
    }
    d2 = (d2 / N as f64).sqrt() / h0;

    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(0.2)
    };
    h1.min(100.0 * h0).min(opts.h_max)
}

/// Refine an event crossing inside an accepted step on its dense output,
/// bisection first, then secant polish.
fn refine_event<const N: usize>(
    step: &DenseStep<N>,
    ev: &EventSpec<'_, N>,
    mut ta: f64,
    mut tb: f64,
    mut ga: f64,
    mut gb: f64,
) -> f64 {
    let g_at = |t: f64| (ev.g)(t, &step.eval(t));
    if ga == 0.0 {
        return ta;
    }
    if gb == 0.0 {
        return tb;
    }
    for _ in 0..30 {
        let tm = 0.5 * (ta + tb);
        let gm = g_at(tm);
        if gm == 0.0 {
            return tm;
        }
        if (ga > 0.0) == (gm > 0.0) {
            ta = tm;
            ga = gm;
        } else {
            tb = tm;
            gb = gm;
        }
    }
    // Secant within the surviving bracket.
    let (mut x0, mut x1, mut g0, mut g1) = (ta, tb, ga, gb);
    for _ in 0..20 {
        if g1 == g0 {
            break;
        }
        let x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
        if !(ta..=tb).contains(&x2) && !(tb..=ta).contains(&x2) {
            break;
        }
        if (x2 - x1).abs() <= 1e-15 * x1.abs().max(1.0) {
            return x2;
        }
        x0 = x1;
        g0 = g1;
        x1 = x2;
        g1 = g_at(x2);
    }
    0.5 * (ta + tb)
}
