use std::f64::consts::PI;

use geotomo::bodies::{direction, make_counterexample_body, ConvexBody, Profile};
use geotomo::fracderiv::{
    cos_profile, exp_profile, frac_deriv_at_zero, integer_deriv_at_zero, FnProfile, ProfileFunction,
};
use geotomo::sections::build_profile;
use geotomo::specfun::gamma;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn cosine_half_order() {
    let r = frac_deriv_at_zero(&cos_profile(), 0.5).unwrap();
    assert!((r.value - 0.5f64.sqrt()).abs() < 1e-6, "{}", r.value);
    assert!(r.abs_error_estimate >= 0.0);
}

#[test]
fn ball_section_closed_form() {
    // A(t) = pi (1 - t^2) on [0, 1]; exact antiderivatives
    let ball = ConvexBody::ball(3, 1.0).unwrap();
    let prof = build_profile(&ball, &direction(3, 0.3), 0.0, 1e-12).unwrap();
    let pinned = (-2.0 * PI / 3.0 - 2.0 * PI) / gamma(-0.5).unwrap();
    let r = frac_deriv_at_zero(&prof, 0.5).unwrap();
    assert!(rel(r.value, pinned) < 1e-8, "{} vs {pinned}", r.value);
    assert_eq!(r.split_point, 1.0);
    for q in [-0.7, 0.5, 1.3, 2.5] {
        let exact = PI * (1.0 / -q - 1.0 / (2.0 - q)) / gamma(-q).unwrap();
        let r = frac_deriv_at_zero(&prof, q).unwrap();
        assert!(rel(r.value, exact) < 1e-7, "q = {q}: {} vs {exact}", r.value);
    }
    assert!(rel(integer_deriv_at_zero(&prof, 0).unwrap(), PI) < 1e-10);
    assert_eq!(integer_deriv_at_zero(&prof, 1).unwrap(), 0.0);
    assert!(rel(integer_deriv_at_zero(&prof, 2).unwrap(), -2.0 * PI) < 1e-6);
}

#[test]
fn singular_profile_closed_form() {
    // n = 3, p = -1/2: A(t) = (4 pi / 3)(1 - t^1.5)
    let ball = ConvexBody::ball(3, 1.0).unwrap();
    let prof = build_profile(&ball, &direction(3, 0.0), -0.5, 1e-12).unwrap();
    for q in [-0.5, 0.5, 1.2] {
        let exact = 4.0 * PI / 3.0 * (1.0 / -q - 1.0 / (1.5 - q)) / gamma(-q).unwrap();
        let r = frac_deriv_at_zero(&prof, q).unwrap();
        assert!(rel(r.value, exact) < 1e-7, "q = {q}: {} vs {exact}", r.value);
    }
}

#[test]
fn continuity_at_integer_orders() {
    // the one-sided gap closes linearly in |q - k|
    let body = make_counterexample_body(5, -0.5, 1.0).unwrap();
    let prof = build_profile(&body, &direction(5, 0.0), -0.5, 1e-11).unwrap();
    for k in [0usize, 2] {
        let exact = integer_deriv_at_zero(&prof, k).unwrap();
        for side in [-1.0, 1.0] {
            let near = frac_deriv_at_zero(&prof, k as f64 + 0.02 * side).unwrap().value;
            let far = frac_deriv_at_zero(&prof, k as f64 + 0.04 * side).unwrap().value;
            let ratio = (far - exact) / (near - exact);
            assert!((1.5..2.5).contains(&ratio), "k = {k}: ratio {ratio}");
            assert!(rel(2.0 * near - far, exact) < 2e-3, "k = {k}: {} vs {exact}", 2.0 * near - far);
        }
    }
}

fn exp_rate(c: f64) -> FnProfile {
    FnProfile {
        f: Box::new(move |t: f64| (-c * t).exp()),
        support: 40.0,
        taylor: vec![1.0, -c, c * c / 2.0, -c * c * c / 6.0, c.powi(4) / 24.0],
        even: false,
        tail: None,
    }
}

#[test]
fn linearity() {
    let (a, b) = (0.7, -1.9);
    let f = exp_profile();
    let g = exp_rate(2.0);
    let h = FnProfile {
        f: Box::new(move |t: f64| a * (-t).exp() + b * (-2.0 * t).exp()),
        support: 40.0,
        taylor: f.taylor().iter().zip(g.taylor()).map(|(x, y)| a * x + b * y).collect(),
        even: false,
        tail: None,
    };
    for q in [-0.4, 0.6, 1.7, 2.4] {
        let lhs = frac_deriv_at_zero(&h, q).unwrap().value;
        let rhs = a * frac_deriv_at_zero(&f, q).unwrap().value + b * frac_deriv_at_zero(&g, q).unwrap().value;
        assert!(rel(lhs, rhs) < 1e-10, "q = {q}: {lhs} vs {rhs}");
        assert!(rel(rhs, a + b * 2f64.powf(q)) < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn sign_laws(seed in any::<u64>(), q in prop_oneof![-0.95..-0.05f64, 0.05..0.95f64, 1.05..1.95f64], beta in 0.0..1.5f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let body = ConvexBody::profile(4, Profile::random(&mut rng)).unwrap();
        let prof = build_profile(&body, &direction(4, beta), -0.5, 1e-10).unwrap();
        let v = frac_deriv_at_zero(&prof, q).unwrap().value;
        if q < 1.0 {
            prop_assert!(v >= -1e-9, "q = {q}: {v}");
        } else {
            prop_assert!(v <= 1e-9, "q = {q}: {v}");
        }
    }
}
