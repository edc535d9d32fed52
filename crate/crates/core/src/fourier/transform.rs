use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::bodies::{check_fracderiv_domain, polar_angle, BodyKind, ConvexBody, Exponents};
use crate::error::{Error, Result};
use crate::fourier::SphericalFunction;
use crate::fracderiv::{frac_deriv_at_zero, integer_deriv_at_zero, regularized_integral};
use crate::sections::{build_profile, build_profile_at};
use crate::specfun::{
    cos_pi, gamma, gamma_ratio, integrate_adaptive, integrate_smooth, sphere_area, Endpoints,
};

/// |cos(pi q / 2)| below this counts as an odd order.
pub const ODD_ORDER_WINDOW: f64 = 1e-8;
const PROFILE_TOL: f64 = 1e-10;

/// Per-mode factor of the transform r^(-n+q+1) C_m(cos phi) -> r^(-q-1) lambda_m C_m(cos phi).
/// Zero when the denominator Gamma has a pole.
pub fn multiplier(m: usize, q: f64, n: usize) -> Result<f64> {
    if m % 2 == 1 {
        return Err(Error::domain(format!("odd mode m = {m}; only even functions are supported")));
    }
    let a = (m as f64 + q + 1.0) / 2.0;
    let b = (m as f64 + n as f64 - q - 1.0) / 2.0;
    if a <= 0.0 && a == a.round() {
        return Err(Error::domain(format!(
            "multiplier pole at m = {m}, q = {q}, n = {n}: Gamma({a})"
        )));
    }
    if b <= 0.0 && b == b.round() {
        return Ok(0.0);
    }
    let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let c = 2f64.powf(q + 1.0) * PI.powf(n as f64 / 2.0);
    Ok(sign * c * gamma_ratio(a, b)?)
}

/// Transform of |x|^(-n+q+1) at a unit vector.
pub fn ball_transform(n: usize, q: f64) -> Result<f64> {
    multiplier(0, q, n)
}

/// g with (r^(-n+q+1) v)^ = r^(-q-1) g.
pub fn axisym_homogeneous_ft(v: &SphericalFunction, q: f64, n: usize) -> Result<SphericalFunction> {
    if v.n != n {
        return Err(Error::domain(format!("function lives on S^{}, not S^{}", v.n - 1, n - 1)));
    }
    if !(q > -1.0 && q < n as f64 - 1.0) {
        return Err(Error::domain(format!("q = {q} must lie in (-1, n-1) = (-1, {})", n - 1)));
    }
    v.map_modes(|m| multiplier(m, q, n))
}

/// Both sides of the sphere Parseval identity for homogeneous extensions of
/// degrees `deg_f` and `deg_g` (summing to -n).
pub fn parseval_sphere_check(
    f: &SphericalFunction,
    g: &SphericalFunction,
    deg_f: f64,
    deg_g: f64,
    n: usize,
) -> Result<(f64, f64)> {
    if (deg_f + deg_g + n as f64).abs() > 1e-12 {
        return Err(Error::domain(format!(
            "degrees must sum to -n = {}, got {deg_f} + {deg_g}",
            -(n as f64)
        )));
    }
    let qf = deg_f + n as f64 - 1.0;
    let qg = deg_g + n as f64 - 1.0;
    let fh = axisym_homogeneous_ft(f, qf, n)?;
    let gh = axisym_homogeneous_ft(g, qg, n)?;
    let lhs = fh.inner_product(&gh)?;
    let rhs = (2.0 * PI).powi(n as i32) * f.inner_product(g)?;
    Ok((lhs, rhs))
}

fn odd_order_guard(q: f64) -> Result<f64> {
    let c = cos_pi(q / 2.0);
    if c.abs() <= ODD_ORDER_WINDOW {
        return Err(Error::domain(format!(
            "q = {q} is an odd integer where cos(pi q/2) vanishes; use q3_special"
        )));
    }
    Ok(c)
}

fn derivative_at_zero(body: &ConvexBody, beta: f64, p: f64, q: f64) -> Result<f64> {
    let prof = build_profile_at(body, beta, p, PROFILE_TOL)?;
    if (q - q.round()).abs() < 1e-12 {
        integer_deriv_at_zero(&prof, q.round() as usize)
    } else {
        Ok(frac_deriv_at_zero(&prof, q)?.value)
    }
}

/// (||x||^(-n-p+q+1) |x|^p)^ at xi from the q-th derivative of A at 0.
pub fn lemma22_via_fracderiv(body: &ConvexBody, xi: &[f64], p: f64, q: f64) -> Result<f64> {
    Exponents::new(body.n, 0.0, q, p).check_transform()?;
    let c = odd_order_guard(q)?;
    let beta = polar_angle(body.n, xi)?;
    let d = derivative_at_zero(body, beta, p, q)?;
    Ok(PI * (body.n as f64 + p - q - 1.0) / c * d)
}

/// Same transform for q in (-1, 0) as a direct integral over the sphere.
pub fn lemma22_via_sphere(body: &ConvexBody, xi: &[f64], p: f64, q: f64) -> Result<f64> {
    if !(q > -1.0 && q < 0.0) {
        return Err(Error::domain(format!("the sphere route needs q in (-1, 0), got {q}")));
    }
    Exponents::new(body.n, 0.0, q, p).check_transform()?;
    let n = body.n;
    let beta = polar_angle(n, xi)?;
    let power = n as f64 + p - q - 1.0;
    let (sb, cb) = beta.sin_cos();
    let rho_pow = |cos_phi: f64| body.radial_at(cos_phi.clamp(-1.0, 1.0).acos()).powf(power);
    // average over the S^{n-2} of directions at angle chi from xi
    let ring = |chi: f64| -> Result<f64> {
        let (sc, cc) = chi.sin_cos();
        if n == 3 {
            return Ok(rho_pow(cc * cb + sc * sb) + rho_pow(cc * cb - sc * sb));
        }
        if sb.abs() < 1e-15 || sc == 0.0 || matches!(body.kind, BodyKind::Ball { .. }) {
            return Ok(sphere_area(n - 2) * rho_pow(cc * cb));
        }
        let k = (n - 3) as i32;
        let r = integrate_smooth(
            |psi: f64| psi.sin().powi(k) * rho_pow(cc * cb + sc * sb * psi.cos()),
            0.0,
            PI,
            1e-12,
            1e-300,
        )?;
        Ok(sphere_area(n - 3) * r.value)
    };
    // w = pi/2 - chi = s^(-1/q) absorbs |cos chi|^(-q-1)
    let s_max = FRAC_PI_2.powf(-q);
    let mut failure = None;
    let r = integrate_adaptive(
        |s: f64| {
            if s <= 0.0 {
                return 0.0;
            }
            let w = s.powf(-1.0 / q);
            let chi = FRAC_PI_2 - w;
            let damp = if w > 0.0 { (w.sin() / w).powf(-q - 1.0) } else { 1.0 };
            match ring(chi) {
                Ok(v) => damp * chi.sin().powi(n as i32 - 2) * v / -q,
                Err(e) => {
                    failure = Some(e);
                    f64::NAN
                }
            }
        },
        0.0,
        s_max,
        1e-11,
        Endpoints::LEFT,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let integral = 2.0 * r?.value;
    Ok(PI / (2.0 * gamma(-q)? * cos_pi(q / 2.0)) * integral)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Q3Sign {
    Negative,
    ZeroInconclusive,
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Q3Result {
    /// int_0^inf t^-4 (A(t) - A(0) - A''(0) t^2/2) dt; the transform is a
    /// positive multiple of it.
    pub value: f64,
    pub abs_error_estimate: f64,
    pub sign: Q3Sign,
}

/// Sign of (||x||^-1 |x|^(-n+5))^ at xi through the regularized integral.
pub fn q3_special(body: &ConvexBody, xi: &[f64]) -> Result<Q3Result> {
    let p = 5.0 - body.n as f64;
    let prof = build_profile(body, xi, p, PROFILE_TOL)?;
    if prof.a2.is_none() {
        return Err(Error::domain(format!("A''(0) is unavailable for n = {}, p = {p}", body.n)));
    }
    let (value, err) = regularized_integral(&prof, 3.0)?;
    let tol = 10.0 * err + 1e-9 * prof.a0.abs();
    let sign = if value < -tol {
        Q3Sign::Negative
    } else if value > tol {
        Q3Sign::Positive
    } else {
        Q3Sign::ZeroInconclusive
    };
    Ok(Q3Result {
        value,
        abs_error_estimate: err,
        sign,
    })
}

fn laplacian_order(n: usize, alpha: f64) -> Result<f64> {
    if n < 4 {
        return Err(Error::domain(format!("the Laplacian comparison needs n >= 4, got {n}")));
    }
    let q = n as f64 - alpha - 4.0;
    if !(q > -1.0 && q < 3.0) {
        return Err(Error::domain(format!(
            "order n - alpha - 4 = {q} must lie in (-1, 3) (alpha = {alpha}, n = {n})"
        )));
    }
    check_fracderiv_domain(n, q, q)?;
    Ok(q)
}

/// (-Delta)^((n-alpha-4)/2) S_K at xi from the section function of |x|^Q, Q = n-alpha-4.
pub fn frac_laplacian_section(body: &ConvexBody, alpha: f64, xi: &[f64]) -> Result<f64> {
    let q = laplacian_order(body.n, alpha)?;
    let c = odd_order_guard(q)?;
    let beta = polar_angle(body.n, xi)?;
    Ok(derivative_at_zero(body, beta, q, q)? / c)
}

/// The same operator applied mode by mode to rho^(n-1).
pub fn frac_laplacian_spectral(body: &ConvexBody, alpha: f64, max_degree: usize) -> Result<SphericalFunction> {
    let n = body.n;
    let q = laplacian_order(n, alpha)?;
    let k = (n - 1) as i32;
    let v = SphericalFunction::from_fn(n, |phi| body.radial_at(phi).powi(k), max_degree)?;
    let scale = 1.0 / (PI * (n - 1) as f64);
    v.map_modes(|m| Ok(scale * multiplier(m, q, n)?))
}
