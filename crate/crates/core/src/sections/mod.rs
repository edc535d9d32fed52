//! Weighted parallel-section functions A_{K,xi,p}(t) = int_{K cap H_t} |x|^p.
//!
//! Directions are handled through their polar angle `beta`. The hyperplane
//! H_t = t xi + xi^perp is parametrized around t xi by polar coordinates
//! (r, psi) with psi measured from the in-plane direction eta pointing away
//! from the axis; the remaining n-3 angles integrate out by symmetry.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::bodies::{polar_angle, BodyKind, ConvexBody};
use crate::error::{Error, Result};
use crate::specfun::{
    gamma, gauss_legendre, integrate_adaptive_abs, integrate_smooth, sphere_area, Endpoints,
};

const INNER_TOL: f64 = 1e-14;
const PSI_START: usize = 64;
const PSI_MAX: usize = 512;
const STEPS: usize = 60;

/// int_0^r s^(n-2) (s^2 + t^2)^(p/2) ds.
pub fn radial_weight_integral(n: usize, p: f64, t: f64, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Ok(0.0);
    }
    let k = n as f64 - 1.0;
    let e = k + p;
    if !(e > 0.0) {
        return Err(Error::domain(format!("p = {p} must exceed -n+1 = {}", -k)));
    }
    let t = t.abs();
    if p == 0.0 {
        return Ok(r.powf(k) / k);
    }
    if t == 0.0 {
        return Ok(r.powf(e) / e);
    }
    let x = r / t;
    let scale = t.powf(e);
    let m = (n - 2) as i32;
    let inner = |u: f64| u.powi(m) * (1.0 + u * u).powf(0.5 * p);
    if x <= 2.0 {
        let v = integrate_smooth(inner, 0.0, x, INNER_TOL, 0.0)?.value;
        return Ok(scale * v);
    }
    let head = integrate_smooth(inner, 0.0, 2.0, INNER_TOL, 0.0)?.value;
    let power = (x.powf(e) - 2f64.powf(e)) / e;
    // u^(n+p-2) [(1 + u^-2)^(p/2) - 1] on a log scale
    let corr = integrate_smooth(
        |y: f64| {
            let u2 = (-2.0 * y).exp();
            (e * y).exp() * (0.5 * p * u2.ln_1p()).exp_m1()
        },
        2f64.ln(),
        x.ln(),
        INNER_TOL,
        0.0,
    )?
    .value;
    Ok(scale * (head + power + corr))
}

/// Coefficient and exponent of the non-analytic term kappa |t|^(n+p-1) of
/// A_{K,xi,p}(t) at t = 0; absent when p = 0 or n+p-1 is an even integer.
pub fn singular_term(n: usize, p: f64) -> Option<(f64, f64)> {
    let e = n as f64 + p - 1.0;
    if p == 0.0 || ((e / 2.0) - (e / 2.0).round()).abs() < 1e-9 || n < 2 {
        return None;
    }
    let c = if n >= 3 { sphere_area(n - 2) } else { 2.0 };
    let g1 = gamma((n as f64 - 1.0) / 2.0).ok()?;
    let g2 = gamma((1.0 - n as f64 - p) / 2.0).ok()?;
    let g3 = match gamma(-p / 2.0) {
        Ok(v) => v,
        Err(_) => return None,
    };
    Some((c * g1 * g2 / (2.0 * g3), e))
}

fn check_p(n: usize, p: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::domain(format!("sections need n >= 3, got n = {n}")));
    }
    if !(p > 1.0 - n as f64) {
        return Err(Error::domain(format!(
            "p = {p} must exceed -n+1 = {} for the section integral to converge",
            1.0 - n as f64
        )));
    }
    Ok(())
}

/// Meridian coordinates (|x'|-component along e_1, x_n) of t xi + s eta + w.
fn meridian(beta: f64, t: f64, s: f64) -> (f64, f64) {
    let (sb, cb) = beta.sin_cos();
    (t * sb + s * cb, t * cb - s * sb)
}

/// Distance from t xi to the boundary of the section along in-plane
/// direction psi (requires t xi inside the body).
fn inplane_radius(body: &ConvexBody, beta: f64, t: f64, psi: f64, rmax: f64) -> f64 {
    let (sp, cp) = psi.sin_cos();
    if let BodyKind::Ball { radius } = body.kind {
        // |t xi + r u|^2 = t^2 + r^2 since u is orthogonal to xi
        return (radius * radius - t * t).max(0.0).sqrt();
    }
    let inside = |r: f64| {
        let (x1, z) = meridian(beta, t, r * cp);
        let w = r * sp;
        body.contains_meridian(x1.hypot(w), z)
    };
    let (mut lo, mut hi) = (0.0, rmax);
    for _ in 0..STEPS {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn bounding_radius(body: &ConvexBody) -> f64 {
    2.0 * body.support_meridian(0.0).hypot(body.support_meridian(FRAC_PI_2)) + 1e-12
}

fn symmetric_about(body: &ConvexBody, beta: f64) -> bool {
    matches!(body.kind, BodyKind::Ball { .. }) || beta.sin().abs() < 1e-15
}

/// A_{K,xi,p}(t) for the direction at polar angle `beta`.
pub fn section_value_at(body: &ConvexBody, beta: f64, p: f64, t: f64, rel_tol: f64) -> Result<f64> {
    check_p(body.n, p)?;
    let t = t.abs();
    let t_max = body.support_meridian(beta);
    if t >= t_max {
        return Ok(0.0);
    }
    let rho = body.radial_at(beta);
    if t < rho {
        if symmetric_about(body, beta) {
            let r = inplane_radius(body, beta, t, 0.0, bounding_radius(body));
            return Ok(sphere_area(body.n - 2) * radial_weight_integral(body.n, p, t, r)?);
        }
        polar_route(body, beta, p, t, rel_tol)
    } else {
        slice_route(body, beta, p, t, rel_tol)
    }
}

/// A_{K,xi,p}(t) for a unit vector `xi`.
pub fn section_value(body: &ConvexBody, xi: &[f64], p: f64, t: f64, rel_tol: f64) -> Result<f64> {
    section_value_at(body, polar_angle(body.n, xi)?, p, t, rel_tol)
}

/// Always runs the in-plane angular quadrature, even where symmetry would
/// make it unnecessary. Requires t below the radial value along xi.
#[doc(hidden)]
pub fn section_value_quadrature(
    body: &ConvexBody,
    beta: f64,
    p: f64,
    t: f64,
    rel_tol: f64,
) -> Result<f64> {
    check_p(body.n, p)?;
    if t.abs() >= body.radial_at(beta) {
        return Err(Error::domain("t xi must lie inside the body for the polar route"));
    }
    polar_route(body, beta, p, t.abs(), rel_tol)
}

fn polar_route(body: &ConvexBody, beta: f64, p: f64, t: f64, rel_tol: f64) -> Result<f64> {
    let n = body.n;
    let rmax = bounding_radius(body);
    let m = (n - 3) as i32;
    let integrand = |psi: f64| -> f64 {
        let r = inplane_radius(body, beta, t, psi, rmax);
        let g = radial_weight_integral(n, p, t, r).unwrap_or(f64::NAN);
        psi.sin().powi(m) * g
    };
    let c = sphere_area(n - 3);
    let mut order = PSI_START;
    let mut prev = gauss_legendre(order).integrate(0.0, PI, integrand);
    while order < PSI_MAX {
        order *= 2;
        let cur = gauss_legendre(order).integrate(0.0, PI, integrand);
        if (cur - prev).abs() <= rel_tol * cur.abs() {
            return finite(c * cur);
        }
        prev = cur;
    }
    let r = integrate_smooth(integrand, 0.0, PI, rel_tol, 1e-15)?;
    finite(c * r.value)
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonConvergence {
            estimate: v,
            abs_error: f64::INFINITY,
            evaluations: 0,
        })
    }
}

// Section not containing t xi: integrate over the in-plane coordinate s
// along eta, with the orthogonal directions forming a ball of radius W(s).
fn slice_route(body: &ConvexBody, beta: f64, p: f64, t: f64, rel_tol: f64) -> Result<f64> {
    let n = body.n;
    let (s1, s2) = chord(body, beta, t);
    if !(s2 > s1) {
        return Ok(0.0);
    }
    let wmax = bounding_radius(body);
    let width = |s: f64| -> f64 {
        let (x1, z) = meridian(beta, t, s);
        if let BodyKind::Profile(pr) = &body.kind {
            let f = pr.value(z);
            if z.abs() > pr.half_width || f <= x1.abs() {
                return 0.0;
            }
            return ((f - x1.abs()) * (f + x1.abs())).sqrt();
        }
        if !body.contains_meridian(x1.abs(), z) {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, wmax);
        for _ in 0..STEPS {
            let mid = 0.5 * (lo + hi);
            if body.contains_meridian(x1.hypot(mid), z) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let h = |s: f64| -> f64 {
        let w = width(s);
        let c = t.hypot(s);
        radial_weight_integral(n - 1, p, c, w).unwrap_or(f64::NAN)
    };
    let r = integrate_adaptive_abs(h, s1, s2, rel_tol, 1e-15, Endpoints::BOTH)?;
    finite(sphere_area(n - 3) * r.value)
}

/// In-plane interval [s1, s2] where the line t xi + s eta meets the body.
fn chord(body: &ConvexBody, beta: f64, t: f64) -> (f64, f64) {
    let d = |phi: f64| body.radial_at(phi) * (phi - beta).cos() - t;
    // locate the support point on a grid around beta
    let grid = 720;
    let step = PI / grid as f64;
    let (mut best, mut bv) = (beta, f64::NEG_INFINITY);
    for i in 0..=grid {
        let phi = beta - FRAC_PI_2 + step * i as f64;
        let v = d(phi);
        if v > bv {
            bv = v;
            best = phi;
        }
    }
    if bv <= 0.0 {
        return (0.0, 0.0);
    }
    let cross = |mut inside: f64, mut outside: f64| {
        for _ in 0..STEPS {
            let mid = 0.5 * (inside + outside);
            if d(mid) > 0.0 {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        let phi = 0.5 * (inside + outside);
        body.radial_at(phi) * (phi - beta).sin()
    };
    let a = cross(best, best + PI);
    let b = cross(best, best - PI);
    (a.min(b), a.max(b))
}

/// S_K(xi) = vol_{n-1}(K cap xi^perp).
pub fn central_section(body: &ConvexBody, xi: &[f64]) -> Result<f64> {
    section_value(body, xi, 0.0, 0.0, 1e-10)
}

/// A(0) for the counterexample family: |S^{n-2}|/(n+p-1).
pub fn closed_a0(n: usize, p: f64) -> Result<f64> {
    let d = n as f64 + p - 1.0;
    if !(d > 0.0) {
        return Err(Error::domain(format!("need n + p - 1 > 0, got {d}")));
    }
    Ok(sphere_area(n - 2) / d)
}

/// A''(0) for the counterexample family: |S^{n-2}| (p/(n+p-3) - 2/(n+p-1)).
pub fn closed_a2(n: usize, p: f64) -> Result<f64> {
    let d1 = n as f64 + p - 1.0;
    let d3 = n as f64 + p - 3.0;
    if !(d1 > 0.0) {
        return Err(Error::domain(format!("need n + p - 1 > 0, got {d1}")));
    }
    if d3.abs() < 1e-14 {
        return Err(Error::domain("closed_a2 has a pole at n + p - 3 = 0"));
    }
    Ok(sphere_area(n - 2) * (p / d3 - 2.0 / d1))
}

/// The section function along one direction with cached A(0) and A''(0).
#[derive(Debug, Clone, Serialize)]
pub struct SectionProfile {
    #[serde(skip)]
    pub body: ConvexBody,
    pub n: usize,
    pub beta: f64,
    pub p: f64,
    pub t_max: f64,
    pub a0: f64,
    /// None when p <= -n+3 and p != 0 (A may fail to be C^2 at 0).
    pub a2: Option<f64>,
    pub rel_tol: f64,
}

impl SectionProfile {
    pub fn value(&self, t: f64) -> Result<f64> {
        section_value_at(&self.body, self.beta, self.p, t, self.rel_tol)
    }

    pub fn singular_term(&self) -> Option<(f64, f64)> {
        singular_term(self.n, self.p)
    }

    /// Table of (t, A(t)) on a uniform grid over [0, t_max].
    pub fn table(&self, points: usize) -> Result<Vec<(f64, f64)>> {
        let ts: Vec<f64> = (0..points)
            .map(|i| self.t_max * i as f64 / (points.max(2) - 1) as f64)
            .collect();
        let vals = crate::par::map(&ts, |&t| self.value(t));
        ts.into_iter()
            .zip(vals)
            .map(|(t, v)| v.map(|v| (t, v)))
            .collect()
    }
}

/// Build the section profile along `xi`; A''(0) by Richardson-extrapolated
/// second differences of A minus its non-analytic term.
pub fn build_profile(body: &ConvexBody, xi: &[f64], p: f64, rel_tol: f64) -> Result<SectionProfile> {
    build_profile_at(body, polar_angle(body.n, xi)?, p, rel_tol)
}

pub fn build_profile_at(body: &ConvexBody, beta: f64, p: f64, rel_tol: f64) -> Result<SectionProfile> {
    let n = body.n;
    check_p(n, p)?;
    let t_max = body.support_meridian(beta);
    let a = |t: f64| section_value_at(body, beta, p, t, rel_tol);
    let a0 = a(0.0)?;
    let a2 = if p > 3.0 - n as f64 || p == 0.0 {
        let sing = singular_term(n, p);
        let h = t_max / 200.0;
        let hs = [h, h / 2.0, h / 4.0];
        let vals: Vec<Result<f64>> = crate::par::map(&hs, |&t| a(t));
        let mut d = [0.0; 3];
        for (i, v) in vals.into_iter().enumerate() {
            let mut v = v?;
            if let Some((kappa, e)) = sing {
                v -= kappa * hs[i].powf(e);
            }
            d[i] = 2.0 * (v - a0) / (hs[i] * hs[i]);
        }
        let r1 = (4.0 * d[1] - d[0]) / 3.0;
        let r2 = (4.0 * d[2] - d[1]) / 3.0;
        Some((16.0 * r2 - r1) / 15.0)
    } else {
        None
    };
    Ok(SectionProfile {
        body: body.clone(),
        n,
        beta,
        p,
        t_max,
        a0,
        a2,
        rel_tol,
    })
}
