use std::f64::consts::PI;

use geotomo::bodies::{direction, make_counterexample_body, ConvexBody, CounterexampleFamily, Profile};
use geotomo::sections::{
    build_profile, build_profile_at, central_section, closed_a0, closed_a2, section_value,
    section_value_at, section_value_quadrature,
};
use geotomo::specfun::{integrate_adaptive, sphere_area, Endpoints};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// |S^{n-2}| int_0^{f(t)} (t^2+r^2)^{p/2} r^{n-2} dr by direct quadrature
fn axial_oracle(fam: &CounterexampleFamily, t: f64) -> f64 {
    let n = fam.n;
    let p = fam.p;
    let f = fam.f(t);
    let flag = if t == 0.0 { Endpoints::LEFT } else { Endpoints::NONE };
    let v = integrate_adaptive(
        |r: f64| (t * t + r * r).powf(p / 2.0) * r.powi(n as i32 - 2),
        0.0,
        f,
        1e-13,
        flag,
    )
    .unwrap()
    .value;
    sphere_area(n - 2) * v
}

#[test]
fn axial_reduction_matches_general_path() {
    let fam = CounterexampleFamily::new(5, -0.5, 100.0).unwrap();
    let body = fam.body().unwrap();
    for frac in [0.0, 0.1, 0.5, 0.9, 0.999] {
        let t = frac * fam.a_n;
        let general = section_value_quadrature(&body, 0.0, -0.5, t, 1e-12).unwrap();
        let fast = section_value_at(&body, 0.0, -0.5, t, 1e-12).unwrap();
        let oracle = axial_oracle(&fam, t);
        assert!((general - oracle).abs() <= 1e-8 * oracle, "t = {t}: {general} vs {oracle}");
        assert!((fast - oracle).abs() <= 1e-8 * oracle);
    }
    assert_eq!(section_value_at(&body, 0.0, -0.5, 1.01 * fam.a_n, 1e-10).unwrap(), 0.0);
}

#[test]
fn central_sections() {
    let b = ConvexBody::ball(4, 1.0).unwrap();
    let xi = direction(4, 0.7);
    assert!((central_section(&b, &xi).unwrap() - 4.0 * PI / 3.0).abs() < 1e-12);
    let c = 1.3f64;
    let bc = b.scaled(c).unwrap();
    assert!((central_section(&bc, &xi).unwrap() - c.powi(3) * 4.0 * PI / 3.0).abs() < 1e-11);
    let body = make_counterexample_body(5, -0.5, 1e4).unwrap();
    let s = central_section(&body, &direction(5, 0.0)).unwrap();
    assert!((s - PI * PI / 2.0).abs() < 1e-12);
}

#[test]
fn closed_forms_on_counterexample_body() {
    let body = make_counterexample_body(5, -0.5, 1e6).unwrap();
    let prof = build_profile(&body, &direction(5, 0.0), -0.5, 1e-12).unwrap();
    let a0 = closed_a0(5, -0.5).unwrap();
    let a2 = closed_a2(5, -0.5).unwrap();
    assert!((prof.a0 - a0).abs() <= 1e-6 * a0.abs());
    assert!((prof.a2.unwrap() - a2).abs() <= 1e-4 * a2.abs(), "{:?} vs {a2}", prof.a2);
}

#[test]
fn evenness_and_support() {
    let body = make_counterexample_body(5, -0.25, 10.0).unwrap();
    let xi = direction(5, 0.5);
    for t in [0.05, 0.2, 0.4] {
        let a = section_value(&body, &xi, -0.25, t, 1e-10).unwrap();
        let b = section_value(&body, &xi, -0.25, -t, 1e-10).unwrap();
        assert_eq!(a, b);
    }
    let tmax = body.support_halfwidth(&xi).unwrap();
    assert_eq!(section_value(&body, &xi, -0.25, tmax * 1.001, 1e-10).unwrap(), 0.0);
}

#[test]
fn fubini_volume() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let body = ConvexBody::profile(4, Profile::random(&mut rng)).unwrap();
        let beta = 0.8;
        let tmax = body.support_meridian(beta);
        let r = integrate_adaptive(
            |t: f64| section_value_at(&body, beta, 0.0, t, 1e-9).unwrap(),
            0.0,
            tmax,
            1e-7,
            Endpoints::RIGHT,
        )
        .unwrap();
        let vol = body.volume(1e-10).unwrap();
        assert!((2.0 * r.value - vol).abs() <= 1e-4 * vol, "{} vs {vol}", 2.0 * r.value);
    }
}

#[test]
fn brunn_on_off_axis_profile() {
    let body = make_counterexample_body(5, -0.5, 30.0).unwrap();
    let prof = build_profile_at(&body, 0.9, -0.5, 1e-10).unwrap();
    for i in 1..32 {
        let t = prof.t_max * i as f64 / 32.0;
        assert!(prof.value(t).unwrap() <= prof.a0 * (1.0 + 1e-8));
    }
}
