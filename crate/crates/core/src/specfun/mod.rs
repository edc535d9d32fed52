//! Special functions and quadrature primitives.

mod gamma;
mod gegenbauer;
mod quadrature;

pub use gamma::{cos_pi, gamma, gamma_ratio, gamma_sign, ln_gamma, sin_pi};
pub use gegenbauer::{gegenbauer, gegenbauer_all, gegenbauer_norm_sq};
pub use quadrature::{
    gauss_legendre, integrate_adaptive, integrate_adaptive_abs, integrate_smooth, Endpoints,
    IntegralResult, QuadratureRule, ABS_FLOOR,
};

/// Surface area of the unit sphere S^k in R^(k+1).
pub fn sphere_area(k: usize) -> f64 {
    let h = (k as f64 + 1.0) / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / gamma(h).expect("positive argument")
}

/// Volume of the unit ball in R^d.
pub fn ball_volume(d: usize) -> f64 {
    sphere_area(d - 1) / d as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(0) - 2.0).abs() < 1e-14);
        assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
    }
}
