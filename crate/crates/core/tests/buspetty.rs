use geotomo::bodies::{direction, make_counterexample_body, perturb_body, BodyKind, ConvexBody, Profile};
use geotomo::buspetty::{
    build_counterexample, check_condition, critical_exponents, critical_integral, positive_verify, random_pair,
    scan_counterexample, BuildOptions, PositiveVerdict, RECHECK_GRID,
};
use geotomo::fourier::lemma22_via_fracderiv;
use geotomo::fracderiv::regularized_integral;
use geotomo::sections::build_profile;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const THRESHOLD: f64 = 11.7624;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn condition_identity_and_dilation() {
    let l = make_counterexample_body(5, -0.5, 10.0).unwrap();
    let same = check_condition(&l, &l, 0.5, 61).unwrap();
    assert!(same.satisfied);
    assert!(same.margin.abs() <= 1e-10, "margin {}", same.margin);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let l = ConvexBody::profile(4, Profile::random(&mut rng)).unwrap();
    let k = l.scaled(0.9).unwrap();
    let r = check_condition(&k, &l, -0.5, 61).unwrap();
    assert!(r.satisfied);
    for (a, b) in r.lhs.iter().zip(&r.rhs) {
        assert!((a - 0.9f64.powi(3) * b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn condition_guards() {
    let k = ConvexBody::ball(4, 1.0).unwrap();
    let l = ConvexBody::ball(5, 1.0).unwrap();
    assert!(check_condition(&k, &l, 0.0, 11).is_err());
    // n - alpha - 4 must stay in (-1, n-1)
    assert!(check_condition(&k, &k, 1.5, 11).is_err());
}

#[test]
fn positive_part_on_dilates_and_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let l = ConvexBody::profile(4, Profile::random(&mut rng)).unwrap();
    let k = l.scaled(0.9).unwrap();
    let v = positive_verify(&k, &l, 0.0, 61).unwrap();
    assert!(v.is_consistent(), "{v:?}");
    if let PositiveVerdict::Consistent { vol_k, vol_l } = v {
        assert!(rel(vol_k, 0.9f64.powi(4) * vol_l) < 1e-8);
    }

    // precondition and range errors are not verdicts
    assert!(positive_verify(&l.scaled(1.1).unwrap(), &l, 0.0, 61).is_err());
    assert!(positive_verify(&k, &l, 0.5, 61).is_err());
    assert!(positive_verify(&k, &l, -3.0, 61).is_err());

    let mut found = 0;
    for (n, alpha) in [(4, 0.0), (5, -1.0)] {
        for _ in 0..4 {
            if let Some((k, l)) = random_pair(n, alpha, 61, &mut rng).unwrap() {
                let v = positive_verify(&k, &l, alpha, 61).unwrap();
                assert!(v.is_consistent(), "n={n}, alpha={alpha}: {v:?}");
                found += 1;
            }
        }
    }
    assert!(found >= 4, "only {found} admissible random pairs");
}

#[test]
fn critical_integral_signs() {
    assert_eq!(critical_exponents(5, 0.5).unwrap(), (-0.5, 2.5));
    assert!(critical_exponents(4, 0.5).is_err());
    assert!(critical_exponents(5, 0.0).is_err());
    assert!(critical_integral(5, 0.5, 1e-3, 1e-10).unwrap() > 0.0);
    assert!(critical_integral(5, 0.5, 1e10, 1e-10).unwrap() < 0.0);
}

#[test]
fn critical_integral_matches_regularized_section_integral() {
    for big_n in [0.5, 10.0, 1e4] {
        let l = make_counterexample_body(5, -0.5, big_n).unwrap();
        let prof = build_profile(&l, &direction(5, 0.0), -0.5, 1e-11).unwrap();
        let (want, _) = regularized_integral(&prof, 2.5).unwrap();
        let got = critical_integral(5, 0.5, big_n, 1e-11).unwrap();
        assert!((got - want).abs() <= 1e-6 * want.abs().max(1e-3), "N={big_n}: {got} vs {want}");
    }
}

#[test]
fn critical_sign_matches_transform_sign() {
    let axis = direction(5, 0.0);
    for big_n in [1.0, 30.0, 1e3, 1e6] {
        let l = make_counterexample_body(5, -0.5, big_n).unwrap();
        let t = lemma22_via_fracderiv(&l, &axis, -0.5, 2.5).unwrap();
        let i = critical_integral(5, 0.5, big_n, 1e-10).unwrap();
        assert_eq!(t > 0.0, i > 0.0, "N={big_n}: transform {t}, I {i}");
    }
}

#[test]
fn scan_finds_threshold_and_growth() {
    let r = scan_counterexample(5, 0.5, 1.0, 1e12, 4).unwrap();
    assert!(r.rows.windows(2).all(|w| w[0].big_n < w[1].big_n));
    assert_eq!((r.p, r.q), (-0.5, 2.5));
    let t = r.threshold_n.expect("sign change");
    assert!(rel(t, THRESHOLD) < 1e-3, "threshold {t}");
    let e = r.fitted_exponent.unwrap();
    assert!((e - 0.625).abs() <= 0.1, "exponent {e}");

    let r = scan_counterexample(5, 1.0, 1e-2, 1e12, 4).unwrap();
    let t = r.threshold_n.expect("sign change at q = 3");
    // I = C (2a^2 - 4/3) / (4a^3) vanishes at a^2 = 2/3, i.e. N = 3/4
    assert!(rel(t, 0.75) < 1e-6, "threshold {t}");

    let r = scan_counterexample(5, 0.5, 1e3, 1e4, 4).unwrap();
    assert!(r.threshold_n.is_none());
}

#[test]
fn critical_integral_is_continuous_near_threshold() {
    let steps = |per_decade: usize| -> (Vec<f64>, f64) {
        let r = scan_counterexample(5, 0.5, THRESHOLD / 10.0, THRESHOLD * 10.0, per_decade).unwrap();
        let scale = r.rows.iter().fold(0.0f64, |m, row| m.max(row.integral.abs()));
        let d = r.rows.windows(2).map(|w| (w[1].integral - w[0].integral).abs()).collect();
        (d, scale)
    };
    let (fine, scale) = steps(32);
    let (coarse, _) = steps(16);
    let worst = fine.iter().fold(0.0f64, |m, &d| m.max(d));
    assert!(worst < 0.1 * scale, "step {worst}, scale {scale}");
    // steps halve with the spacing
    let ratio = fine.iter().sum::<f64>() / coarse.iter().sum::<f64>();
    assert!((ratio - 1.0).abs() < 0.05, "total variation changed by {ratio}");
    let coarse_worst = coarse.iter().fold(0.0f64, |m, &d| m.max(d));
    assert!((worst / coarse_worst - 0.5).abs() < 0.05, "{worst} vs {coarse_worst}");
}

#[test]
fn construction_refuses_bad_inputs() {
    let err = build_counterexample(5, 0.5, 1.0, BuildOptions::default()).unwrap_err();
    assert!(err.to_string().contains("N below threshold"), "{err}");
    let zero = BuildOptions {
        eps_start: Some(0.0),
        ..Default::default()
    };
    assert!(build_counterexample(5, 0.5, 10.0 * THRESHOLD, zero).is_err());
    let outside = BuildOptions {
        bump_width: Some(1.0),
        ..Default::default()
    };
    assert!(build_counterexample(5, 0.5, 10.0 * THRESHOLD, outside).is_err());
}

#[test]
fn counterexample_end_to_end() {
    let pair = build_counterexample(5, 0.5, 10.0 * THRESHOLD, BuildOptions::default()).unwrap();
    assert!(pair.condition.satisfied);
    assert_eq!(pair.condition.grid.len(), 181);
    assert!(pair.vol_l < pair.vol_k, "{} vs {}", pair.vol_l, pair.vol_k);
    assert!(pair.k.check_convexity(2001).passed());
    let recheck = check_condition(&pair.k, &pair.l, 0.5, RECHECK_GRID).unwrap();
    assert!(recheck.satisfied, "margin {}", recheck.margin);

    // first-order volume change: d(eps) = vol K_eps - vol L is linear for small eps
    let BodyKind::Perturbed { g, .. } = &pair.k.kind else {
        panic!("K is not a perturbed body")
    };
    let d = |eps: f64| perturb_body(&pair.l, g, eps).unwrap().volume(1e-12).unwrap() - pair.vol_l;
    let e = pair.epsilon / 8.0;
    let central = (d(1.5 * e) - d(0.5 * e)) / e;
    for s in [d(e) / e, d(2.0 * e) / (2.0 * e)] {
        assert!(rel(s, central) < 0.1, "slope {s} vs central difference {central}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn dilates_scale_the_condition(seed in 0u64..1000, c in 0.5f64..0.99, alpha in -2.9f64..0.0, n in 4usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = ConvexBody::profile(n, Profile::random(&mut rng)).unwrap();
        let k = l.scaled(c).unwrap();
        let r = check_condition(&k, &l, alpha, 31).unwrap();
        let w = c.powi(n as i32 - 1);
        for (a, b) in r.lhs.iter().zip(&r.rhs) {
            prop_assert!((a - w * b).abs() <= 1e-9 * b.abs().max(1.0));
        }
        if r.satisfied {
            prop_assert!(positive_verify(&k, &l, alpha, 31).unwrap().is_consistent());
        }
    }
}
