//! Monotone cubic interpolation and quadrature helpers for sampled profiles.

use crate::error::{Error, Result};

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
///
/// Preserves the monotonicity of its data, which keeps profile invariants
/// (theta decreasing, mass increasing) intact under resampling. Evaluation at
/// a node returns exactly the stored value.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::InvalidOption {
                name: "interpolation nodes",
                value: x.len() as f64,
            });
        }
        for w in x.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidOption {
                    name: "abscissae (must be strictly increasing)",
                    value: w[1],
                });
            }
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let s: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        let mut d = vec![0.0; n];
        d[0] = endpoint_slope(h[0], h.get(1).copied().unwrap_or(h[0]), s[0], *s.get(1).unwrap_or(&s[0]));
        d[n - 1] = endpoint_slope(
            h[n - 2],
            if n >= 3 { h[n - 3] } else { h[n - 2] },
            s[n - 2],
            if n >= 3 { s[n - 3] } else { s[n - 2] },
        );
        for i in 1..n - 1 {
            if s[i - 1] * s[i] <= 0.0 {
                d[i] = 0.0;
            } else {
                // weighted harmonic mean
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
            }
        }
        Ok(Self { x, y, d })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let n = self.x.len();
        if x < self.x[0] || x > self.x[n - 1] {
            return Err(Error::OutOfRange {
                x,
                lo: self.x[0],
                hi: self.x[n - 1],
            });
        }
        let i = match self.x.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => return Ok(self.y[i]),
            Err(i) => i - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.d[i], self.d[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        Ok(y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * h * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * h * (t3 - t2))
    }
}

/// One-sided three-point endpoint slope with the usual monotonicity clamp.
fn endpoint_slope(h0: f64, h1: f64, s0: f64, s1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if d * s0 <= 0.0 {
        0.0
    } else if s0 * s1 < 0.0 && d.abs() > 3.0 * s0.abs() {
        3.0 * s0
    } else {
        d
    }
}

/// Cumulative integral of samples on a uniform grid with spacing `h`,
/// fourth-order accurate: each interior interval integrates the cubic through
/// its four surrounding samples, the end intervals use one-sided cubics.
///
/// Returns one value per sample, starting at zero.
pub fn cumulative_uniform(h: f64, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        for i in 1..n {
            out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
        }
        return out;
    }
    for i in 0..n - 1 {
        let inc = if i == 0 {
            h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
        } else if i == n - 2 {
            h / 24.0 * (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4])
        } else {
            h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2])
        };
        out[i + 1] = out[i] + inc;
    }
    out
}
