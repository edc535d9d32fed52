use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic cubic spline with period `period`, knots in [0, period).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodicSpline {
    period: f64,
    x: Vec<f64>,
    y: Vec<f64>,
    /// second derivatives at the knots
    m: Vec<f64>,
}

impl PeriodicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>, period: f64) -> Result<Self> {
        let k = x.len();
        if k < 3 || y.len() != k {
            return Err(Error::domain("periodic spline needs at least 3 matching samples"));
        }
        for w in x.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::domain("spline knots must be strictly increasing"));
            }
        }
        if x[0] < 0.0 || x[k - 1] >= period {
            return Err(Error::domain("spline knots must lie in [0, period)"));
        }
        // h[i] = x[i+1] - x[i], cyclic
        let h: Vec<f64> = (0..k)
            .map(|i| if i + 1 < k { x[i + 1] - x[i] } else { x[0] + period - x[k - 1] })
            .collect();
        // cyclic tridiagonal system for m
        let mut a = vec![0.0; k];
        let mut b = vec![0.0; k];
        let mut c = vec![0.0; k];
        let mut d = vec![0.0; k];
        for i in 0..k {
            let hp = h[(i + k - 1) % k];
            let hn = h[i];
            a[i] = hp;
            b[i] = 2.0 * (hp + hn);
            c[i] = hn;
            let yp = y[(i + k - 1) % k];
            let yn = y[(i + 1) % k];
            d[i] = 6.0 * ((yn - y[i]) / hn - (y[i] - yp) / hp);
        }
        let m = solve_cyclic(&a, &b, &c, &d);
        Ok(PeriodicSpline { period, x, y, m })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = self.x.len();
        let t = t.rem_euclid(self.period);
        // interval index i with x[i] <= t < x[i+1] (cyclic)
        let idx = self.x.partition_point(|&v| v <= t);
        let (i, x0, x1) = if idx == 0 {
            (k - 1, self.x[k - 1] - self.period, self.x[0])
        } else if idx == k {
            (k - 1, self.x[k - 1], self.x[0] + self.period)
        } else {
            (idx - 1, self.x[idx - 1], self.x[idx])
        };
        let j = (i + 1) % k;
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        a * self.y[i]
            + b * self.y[j]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[j]) * h * h / 6.0
    }
}

fn solve_tridiagonal(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for i in 1..n {
        let den = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / den;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

// Sherman-Morrison on the corner entries a[0] and c[n-1].
fn solve_cyclic(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = b.len();
    let alpha = c[n - 1];
    let beta = a[0];
    let gamma = -b[0];
    let mut bb = b.to_vec();
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;
    let x = solve_tridiagonal(a, &bb, c, d);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve_tridiagonal(a, &bb, c, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn reproduces_knots_and_trig() {
        let k = 64;
        let x: Vec<f64> = (0..k).map(|i| i as f64 * 2.0 * PI / k as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| v.cos()).collect();
        let s = PeriodicSpline::new(x.clone(), y.clone(), 2.0 * PI).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert!((s.eval(*xi) - yi).abs() < 1e-14);
        }
        for t in [0.1, 1.0, 3.0, 6.2, -0.5, 7.0] {
            assert!((s.eval(t) - f64::cos(t)).abs() < 1e-5, "t = {t}");
        }
    }
}
