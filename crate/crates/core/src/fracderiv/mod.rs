//! Fractional derivatives at zero,
//! f^(q)(0) = (1/Gamma(-q)) int_0^inf t^(-1-q) (f(t) - sum_{j<m} c_j t^j) dt,
//! with m = floor(q) + 1.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sections::SectionProfile;
use crate::specfun::{gamma, integrate_adaptive_abs, integrate_smooth, Endpoints};

const MAX_LEVELS: usize = 60;
const LEVEL_BATCH: usize = 4;
const LEVEL_TOL: f64 = 1e-9;
/// Orders closer than this to an integer are refused.
pub const INTEGER_GAP: f64 = 0.02;

/// A function of t >= 0 with known behaviour at 0.
pub trait ProfileFunction: Sync {
    fn value(&self, t: f64) -> f64;

    /// Split point T; the integral past T is `tail`.
    fn support(&self) -> f64;

    /// Known Taylor coefficients c_j of t^j at 0 (c_j = f^(j)(0)/j!).
    fn taylor(&self) -> Vec<f64>;

    /// Optional non-analytic term kappa t^e at 0.
    fn singular_term(&self) -> Option<(f64, f64)> {
        None
    }

    /// Odd Taylor coefficients vanish.
    fn is_even(&self) -> bool {
        true
    }

    /// int_T^inf t^(-1-q) f(t) dt.
    fn tail(&self, _q: f64) -> f64 {
        0.0
    }

    /// Absolute accuracy of `value`.
    fn noise(&self) -> f64 {
        1e-15 * self.value(0.0).abs()
    }
}

impl ProfileFunction for SectionProfile {
    fn value(&self, t: f64) -> f64 {
        SectionProfile::value(self, t).unwrap_or(f64::NAN)
    }

    fn support(&self) -> f64 {
        self.t_max
    }

    fn taylor(&self) -> Vec<f64> {
        match self.a2 {
            Some(a2) => vec![self.a0, 0.0, 0.5 * a2],
            None => vec![self.a0, 0.0],
        }
    }

    fn singular_term(&self) -> Option<(f64, f64)> {
        SectionProfile::singular_term(self)
    }

    fn noise(&self) -> f64 {
        (self.rel_tol * 1e-2).max(1e-15) * self.a0.abs()
    }
}

type BoxFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Profile given by closures.
pub struct FnProfile {
    pub f: BoxFn,
    pub support: f64,
    pub taylor: Vec<f64>,
    pub even: bool,
    pub tail: Option<BoxFn>,
}

impl ProfileFunction for FnProfile {
    fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }
    fn support(&self) -> f64 {
        self.support
    }
    fn taylor(&self) -> Vec<f64> {
        self.taylor.clone()
    }
    fn is_even(&self) -> bool {
        self.even
    }
    fn tail(&self, q: f64) -> f64 {
        self.tail.as_ref().map_or(0.0, |g| g(q))
    }
}

/// e^(-t) cut at t = 40; every fractional derivative at 0 equals 1.
pub fn exp_profile() -> FnProfile {
    FnProfile {
        f: Box::new(|t: f64| (-t).exp()),
        support: 40.0,
        taylor: vec![1.0, -1.0, 0.5, -1.0 / 6.0, 1.0 / 24.0],
        even: false,
        tail: None,
    }
}

/// cos t on [0, 200 pi] with an asymptotic tail; f^(q)(0) = cos(pi q / 2).
pub fn cos_profile() -> FnProfile {
    let t_split = 200.0 * std::f64::consts::PI;
    FnProfile {
        f: Box::new(f64::cos),
        support: t_split,
        taylor: vec![1.0, 0.0, -0.5, 0.0, 1.0 / 24.0],
        even: true,
        tail: Some(Box::new(move |q| oscillatory_tail(t_split, 1.0 + q, true, 0))),
    }
}

// int_T^inf t^(-s) cos t dt (cosine = true) or sin t, by repeated
// integration by parts.
fn oscillatory_tail(t: f64, s: f64, cosine: bool, depth: usize) -> f64 {
    if depth > 12 {
        return 0.0;
    }
    let lead = t.powf(-s);
    if cosine {
        -lead * t.sin() + s * oscillatory_tail(t, s + 1.0, false, depth + 1)
    } else {
        lead * t.cos() - s * oscillatory_tail(t, s + 1.0, true, depth + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FracDerivResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub q: f64,
    pub split_point: f64,
}

pub fn check_order(q: f64) -> Result<()> {
    if !(q > -1.0 && q < 3.0) {
        return Err(Error::domain(format!("order q = {q} must lie in (-1, 3)")));
    }
    if (q - q.round()).abs() < INTEGER_GAP {
        return Err(Error::domain(format!(
            "q = {q} is within {INTEGER_GAP} of the integer {}; use integer_deriv_at_zero",
            q.round()
        )));
    }
    Ok(())
}

/// f^(q)(0) for non-integer q in (-1, 3).
pub fn frac_deriv_at_zero(f: &dyn ProfileFunction, q: f64) -> Result<FracDerivResult> {
    check_order(q)?;
    let (bracket, err) = regularized_integral(f, q)?;
    let g = gamma(-q)?;
    Ok(FracDerivResult {
        value: bracket / g,
        abs_error_estimate: err / g.abs(),
        q,
        split_point: f.support(),
    })
}

/// int_0^inf t^(-1-q) (f(t) - sum_{j<q} c_j t^j) dt (analytically continued),
/// with an absolute error estimate. Integer q is allowed when c_q vanishes.
pub fn regularized_integral(f: &dyn ProfileFunction, q: f64) -> Result<(f64, f64)> {
    if !(q > -1.0) {
        return Err(Error::domain(format!("order q = {q} must exceed -1")));
    }
    let m = q.floor() as usize + 1;
    let c = f.taylor();
    let mut known = c.len();
    if f.is_even() && known % 2 == 1 {
        known += 1;
    }
    if known < m {
        return Err(Error::domain(format!(
            "order q = {q} needs {m} Taylor coefficients at 0, only {} known",
            c.len()
        )));
    }
    if q == q.round() && c.get(q as usize).is_some_and(|cq| *cq != 0.0) {
        return Err(Error::domain(format!("integer order q = {q} with a nonzero t^{q} coefficient")));
    }
    let sing = f.singular_term();
    if let Some((_, e)) = sing {
        if (e - q).abs() < 1e-12 {
            return Err(Error::domain(format!("order q = {q} equals the singular exponent")));
        }
    }
    let t_split = f.support();
    // the model is only subtracted on [0, t0], where it is accurate
    let t0 = t_split.min(1.0);
    // analytic part: every subtracted term integrated (or continued) in closed form
    let mut analytic = 0.0;
    let mut scale = 0.0f64;
    for (j, cj) in c.iter().enumerate() {
        if *cj != 0.0 {
            let term = cj * t0.powf(j as f64 - q) / (j as f64 - q);
            analytic += term;
            scale = scale.max(term.abs());
        }
    }
    if let Some((kappa, e)) = sing {
        let term = kappa * t0.powf(e - q) / (e - q);
        analytic += term;
        scale = scale.max(term.abs());
    }
    let mut tail = f.tail(q);
    let mut err = 0.0;
    if t_split > t0 {
        let outer = integrate_adaptive_abs(
            |t: f64| t.powf(-1.0 - q) * f.value(t),
            t0,
            t_split,
            1e-11,
            1e-15,
            Endpoints::RIGHT,
        )?;
        tail += outer.value;
        err += outer.abs_error_estimate;
    }
    // leading power of the residual
    let next = known as f64;
    let ratio = 0.5f64.powf(next - q);
    let residual = |t: f64| {
        let mut model = 0.0;
        let mut tp = 1.0;
        for cj in &c {
            model += cj * tp;
            tp *= t;
        }
        if let Some((kappa, e)) = sing {
            model += kappa * t.powf(e);
        }
        t.powf(-1.0 - q) * (f.value(t) - model)
    };
    let noise = f.noise();
    let level = |j: usize| -> Result<(f64, f64)> {
        let hi = t0 * 0.5f64.powi(j as i32);
        let lo = 0.5 * hi;
        let floor = (noise * hi.powf(-q)).max(1e-300);
        let r = if j == 0 && t0 == t_split {
            integrate_adaptive_abs(residual, lo, hi, 1e-11, floor, Endpoints::RIGHT)?
        } else {
            integrate_smooth(residual, lo, hi, 1e-11, floor)?
        };
        Ok((r.value, r.abs_error_estimate))
    };
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    let mut j = 0;
    let mut done = false;
    let mut extrapolated = 0.0;
    while j < MAX_LEVELS && !done {
        let batch: Vec<usize> = (j..(j + LEVEL_BATCH).min(MAX_LEVELS)).collect();
        let results = crate::par::map(&batch, |&k| level(k));
        for (k, res) in batch.iter().zip(results) {
            let (s, e) = res?;
            let delta = t0 * 0.5f64.powi(*k as i32);
            // roundoff in f(t) - model, amplified by t^(-1-q) over the level
            let level_noise = noise * delta.powf(-q) * 0.5f64.max(q.abs());
            if q > 0.0 && *k >= 2 && level_noise > 0.05 * s.abs() {
                // noise dominates from here on; extrapolate from the previous level
                if let Some(p) = prev {
                    extrapolated = p * ratio / (1.0 - ratio);
                    err += extrapolated.abs() * 0.05 + level_noise;
                }
                done = true;
                break;
            }
            total += s;
            err += e;
            prev = Some(s);
            let tail_est = s * ratio / (1.0 - ratio);
            let ref_scale = total.abs().max(scale).max(analytic.abs());
            if *k >= 2 && tail_est.abs() <= LEVEL_TOL * ref_scale {
                extrapolated = tail_est;
                err += tail_est.abs() * 0.05;
                done = true;
                break;
            }
            j = k + 1;
        }
    }
    if !done {
        return Err(Error::NonConvergence {
            estimate: total,
            abs_error: prev.map_or(f64::INFINITY, f64::abs),
            evaluations: MAX_LEVELS,
        });
    }
    Ok((total + extrapolated + analytic + tail, err))
}

/// f^(k)(0) = (-1)^k d^k f / dt^k at 0 for k in {0, 1, 2}.
pub fn integer_deriv_at_zero(f: &dyn ProfileFunction, k: usize) -> Result<f64> {
    if k > 2 {
        return Err(Error::domain(format!("integer order k = {k} is unsupported (k in 0..=2)")));
    }
    if k == 1 && f.is_even() {
        return Ok(0.0);
    }
    let c = f.taylor();
    let ck = c.get(k).copied().ok_or_else(|| {
        Error::domain(format!("derivative of order {k} at 0 is not available for this profile"))
    })?;
    let fact = [1.0, 1.0, 2.0][k];
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * fact * ck)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_orders() {
        let f = exp_profile();
        for q in [-0.5, 0.5, 1.5, 2.5] {
            let r = frac_deriv_at_zero(&f, q).unwrap();
            assert!((r.value - 1.0).abs() < 1e-6, "q = {q}: {}", r.value);
        }
    }

    #[test]
    fn cos_orders() {
        let f = cos_profile();
        for q in [-0.5, 0.3, 1.5, 2.5] {
            let r = frac_deriv_at_zero(&f, q).unwrap();
            let want = (std::f64::consts::FRAC_PI_2 * q).cos();
            assert!((r.value - want).abs() < 1e-6, "q = {q}: {} vs {want}", r.value);
        }
    }

    #[test]
    fn near_integer_refused() {
        let f = exp_profile();
        let e = frac_deriv_at_zero(&f, 1.01).unwrap_err();
        assert!(e.to_string().contains("integer_deriv_at_zero"));
    }

    #[test]
    fn integer_orders() {
        let f = exp_profile();
        assert_eq!(integer_deriv_at_zero(&f, 0).unwrap(), 1.0);
        assert_eq!(integer_deriv_at_zero(&f, 1).unwrap(), 1.0);
        assert_eq!(integer_deriv_at_zero(&f, 2).unwrap(), 1.0);
        assert!(integer_deriv_at_zero(&f, 3).is_err());
    }
}
