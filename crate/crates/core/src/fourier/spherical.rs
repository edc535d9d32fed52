use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{gauss_legendre, gegenbauer_all, gegenbauer_norm_sq, sphere_area};

/// Default starting truncation degree.
pub const DEFAULT_DEGREE: usize = 32;
/// Default cap for the doubling search.
pub const DEFAULT_MAX_DEGREE: usize = 256;
const TAIL_RATIO: f64 = 1e-8;

/// Even, axisymmetric function on S^{n-1}, stored as a Gegenbauer series in
/// cos(polar angle) with lambda = (n-2)/2, plus the samples it was fitted to.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphericalFunction {
    pub n: usize,
    /// c_m for m = 0..=degree; odd entries are zero.
    pub coeffs: Vec<f64>,
    /// Polar angles of the fitting grid in [0, pi/2].
    pub nodes: Vec<f64>,
    pub samples: Vec<f64>,
    pub degree: usize,
}

fn lambda_of(n: usize) -> f64 {
    (n as f64 - 2.0) / 2.0
}

impl SphericalFunction {
    /// Project `f` (a function of the polar angle) with automatic degree
    /// selection: start at 32 and double until the tail test passes or
    /// `max_degree` is reached.
    pub fn from_fn<F>(n: usize, f: F, max_degree: usize) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        if n < 3 {
            return Err(Error::domain(format!(
                "spherical expansions need n >= 3, got n = {n}"
            )));
        }
        let max_degree = max_degree.max(2);
        let mut degree = DEFAULT_DEGREE.min(max_degree);
        loop {
            let sf = Self::project(n, &f, degree);
            if sf.tail_ratio() <= TAIL_RATIO || degree >= max_degree {
                return Ok(sf);
            }
            degree = (degree * 2).min(max_degree);
        }
    }

    /// Project `f` at a fixed truncation degree.
    pub fn project<F>(n: usize, f: &F, degree: usize) -> Self
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let degree = degree - degree % 2;
        let lambda = lambda_of(n);
        let order = 2 * degree + 64;
        let rule = gauss_legendre(order);
        let nodes: Vec<f64> = rule.mapped(0.0, FRAC_PI_2).map(|(x, _)| x).collect();
        let weights: Vec<f64> = rule.mapped(0.0, FRAC_PI_2).map(|(_, w)| w).collect();
        let samples = crate::par::map(&nodes, |&phi| f(phi));
        let mut acc = vec![0.0; degree + 1];
        let mut buf = vec![0.0; degree + 1];
        for ((&phi, &w), &v) in nodes.iter().zip(&weights).zip(&samples) {
            gegenbauer_all(lambda, phi.cos(), &mut buf);
            let wt = w * v * phi.sin().powf(2.0 * lambda);
            for m in (0..=degree).step_by(2) {
                acc[m] += wt * buf[m];
            }
        }
        let coeffs = (0..=degree)
            .map(|m| {
                if m % 2 == 1 {
                    0.0
                } else {
                    2.0 * acc[m] / gegenbauer_norm_sq(m, lambda)
                }
            })
            .collect();
        SphericalFunction {
            n,
            coeffs,
            nodes,
            samples,
            degree,
        }
    }

    /// Build from coefficients; odd-index entries are forced to zero.
    pub fn from_coeffs(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain(format!(
                "spherical expansions need n >= 3, got n = {n}"
            )));
        }
        let mut coeffs = coeffs;
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        for (m, c) in coeffs.iter_mut().enumerate() {
            if m % 2 == 1 {
                *c = 0.0;
            }
        }
        let degree = coeffs.len() - 1;
        let mut sf = SphericalFunction {
            n,
            coeffs,
            nodes: Vec::new(),
            samples: Vec::new(),
            degree,
        };
        sf.resample();
        Ok(sf)
    }

    /// Constant function.
    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::from_coeffs(n, vec![value])
    }

    fn resample(&mut self) {
        let order = 2 * self.degree + 64;
        let rule = gauss_legendre(order);
        self.nodes = rule.mapped(0.0, FRAC_PI_2).map(|(x, _)| x).collect();
        self.samples = self.nodes.iter().map(|&phi| self.eval(phi)).collect();
    }

    pub fn lambda(&self) -> f64 {
        lambda_of(self.n)
    }

    /// |c_M| relative to the largest coefficient (last two even modes).
    pub fn tail_ratio(&self) -> f64 {
        let max = self.coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        if max == 0.0 {
            return 0.0;
        }
        let d = self.degree;
        let last = self.coeffs[d].abs().max(if d >= 2 { self.coeffs[d - 2].abs() } else { 0.0 });
        last / max
    }

    /// Value at polar angle `phi` (radians from the symmetry axis).
    pub fn eval(&self, phi: f64) -> f64 {
        self.eval_cos(phi.cos())
    }

    /// Value at x = cos(polar angle).
    pub fn eval_cos(&self, x: f64) -> f64 {
        let lambda = self.lambda();
        let mut c0 = 1.0;
        let mut acc = self.coeffs[0];
        if self.degree == 0 {
            return acc;
        }
        let mut c1 = 2.0 * lambda * x;
        for k in 2..=self.degree {
            let kf = k as f64;
            let c2 = (2.0 * x * (kf + lambda - 1.0) * c1 - (kf + 2.0 * lambda - 2.0) * c0) / kf;
            c0 = c1;
            c1 = c2;
            if k % 2 == 0 {
                acc += self.coeffs[k] * c1;
            }
        }
        acc
    }

    /// Largest relative mismatch between the series and the fitted samples.
    pub fn reconstruction_error(&self) -> f64 {
        let scale = self.samples.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
        self.nodes
            .iter()
            .zip(&self.samples)
            .map(|(&phi, &v)| (self.eval(phi) - v).abs() / scale)
            .fold(0.0, f64::max)
    }

    /// Multiply mode m by `mult(m)` (even m only).
    pub fn map_modes<F: Fn(usize) -> Result<f64>>(&self, mult: F) -> Result<Self> {
        let mut coeffs = self.coeffs.clone();
        for (m, c) in coeffs.iter_mut().enumerate() {
            if m % 2 == 0 && *c != 0.0 {
                *c *= mult(m)?;
            }
        }
        Self::from_coeffs(self.n, coeffs)
    }

    /// Linear combination a*self + b*other.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::domain("dimension mismatch in combine"));
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|m| {
                a * self.coeffs.get(m).copied().unwrap_or(0.0)
                    + b * other.coeffs.get(m).copied().unwrap_or(0.0)
            })
            .collect();
        Self::from_coeffs(self.n, coeffs)
    }

    /// Integral of self * other over S^{n-1}.
    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::domain("dimension mismatch in inner product"));
        }
        let lambda = self.lambda();
        let len = self.coeffs.len().min(other.coeffs.len());
        let s: f64 = (0..len)
            .step_by(2)
            .map(|m| self.coeffs[m] * other.coeffs[m] * gegenbauer_norm_sq(m, lambda))
            .sum();
        Ok(sphere_area(self.n - 2) * s)
    }

    /// Integral over S^{n-1}.
    pub fn integral(&self) -> f64 {
        sphere_area(self.n - 2) * self.coeffs[0] * gegenbauer_norm_sq(0, self.lambda())
    }

    /// Angular intervals in [0, pi/2] where the function is negative,
    /// located on a grid of `grid` points and refined by bisection.
    pub fn negative_set(&self, grid: usize) -> Vec<(f64, f64)> {
        let grid = grid.max(3);
        let h = FRAC_PI_2 / (grid - 1) as f64;
        let vals: Vec<f64> = (0..grid).map(|i| self.eval(i as f64 * h)).collect();
        let root = |mut a: f64, mut b: f64| {
            let fa_neg = self.eval(a) < 0.0;
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if (self.eval(m) < 0.0) == fa_neg {
                    a = m;
                } else {
                    b = m;
                }
            }
            0.5 * (a + b)
        };
        let mut out = Vec::new();
        let mut start: Option<f64> = None;
        for i in 0..grid {
            let neg = vals[i] < 0.0;
            match (neg, start) {
                (true, None) => {
                    start = Some(if i == 0 { 0.0 } else { root((i - 1) as f64 * h, i as f64 * h) });
                }
                (false, Some(s)) => {
                    out.push((s, root((i - 1) as f64 * h, i as f64 * h)));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((s, FRAC_PI_2));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_recovers_polynomial() {
        // x^4 in n = 5 is an exact degree-4 series
        let sf = SphericalFunction::from_fn(5, |phi: f64| phi.cos().powi(4), 64).unwrap();
        assert!(sf.coeffs.iter().skip(6).all(|c| c.abs() < 1e-13));
        for phi in [0.0, 0.4, 1.0, 1.5] {
            assert!((sf.eval(phi) - phi.cos().powi(4)).abs() < 1e-13);
        }
        assert!(sf.reconstruction_error() < 1e-12);
    }

    #[test]
    fn odd_coefficients_vanish() {
        let sf = SphericalFunction::from_coeffs(4, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(sf.coeffs[1], 0.0);
        assert_eq!(sf.coeffs[3], 0.0);
    }

    #[test]
    fn integral_of_constant_is_sphere_area() {
        let one = SphericalFunction::constant(5, 1.0).unwrap();
        assert!((one.integral() - sphere_area(4)).abs() < 1e-12);
        assert!((one.inner_product(&one).unwrap() - sphere_area(4)).abs() < 1e-12);
    }

    #[test]
    fn negative_set_of_shifted_cosine() {
        // cos^2(phi) - 1/2 < 0 for phi > pi/4
        let sf = SphericalFunction::from_fn(4, |p: f64| p.cos().powi(2) - 0.5, 64).unwrap();
        let neg = sf.negative_set(91);
        assert_eq!(neg.len(), 1);
        assert!((neg[0].0 - std::f64::consts::FRAC_PI_4).abs() < 1e-10);
        assert_eq!(neg[0].1, FRAC_PI_2);
    }
}
