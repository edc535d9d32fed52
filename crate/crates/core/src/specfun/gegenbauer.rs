/// Gegenbauer polynomial C_m^lambda(x) by the three-term recurrence.
pub fn gegenbauer(m: usize, lambda: f64, x: f64) -> f64 {
    let mut c0 = 1.0;
    if m == 0 {
        return c0;
    }
    let mut c1 = 2.0 * lambda * x;
    for k in 2..=m {
        let kf = k as f64;
        let c2 = (2.0 * x * (kf + lambda - 1.0) * c1 - (kf + 2.0 * lambda - 2.0) * c0) / kf;
        c0 = c1;
        c1 = c2;
    }
    c1
}

/// Fill `out[m] = C_m^lambda(x)` for m = 0..out.len().
pub fn gegenbauer_all(lambda: f64, x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = 2.0 * lambda * x;
    for k in 2..out.len() {
        let kf = k as f64;
        out[k] = (2.0 * x * (kf + lambda - 1.0) * out[k - 1] - (kf + 2.0 * lambda - 2.0) * out[k - 2])
            / kf;
    }
}

/// Squared norm of C_m^lambda under the weight (1 - x^2)^(lambda - 1/2) on [-1, 1].
pub fn gegenbauer_norm_sq(m: usize, lambda: f64) -> f64 {
    use super::gamma::ln_gamma;
    let mf = m as f64;
    // pi 2^(1-2 lambda) Gamma(m + 2 lambda) / (m! (m + lambda) Gamma(lambda)^2)
    let ln = std::f64::consts::PI.ln() + (1.0 - 2.0 * lambda) * std::f64::consts::LN_2
        + ln_gamma(mf + 2.0 * lambda).unwrap()
        - ln_gamma(mf + 1.0).unwrap()
        - (mf + lambda).ln()
        - 2.0 * ln_gamma(lambda).unwrap();
    ln.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(gegenbauer(0, 2.7, 0.3), 1.0);
        assert!((gegenbauer(1, 1.5, 0.5) - 1.5).abs() < 1e-15);
        assert!((gegenbauer(2, 1.5, 1.0) - 6.0).abs() < 1e-14);
    }

    #[test]
    fn recurrence_holds() {
        let lambda = 1.5;
        let mut buf = vec![0.0; 20];
        for &x in &[-0.9, -0.2, 0.0, 0.37, 0.99] {
            gegenbauer_all(lambda, x, &mut buf);
            for m in 2..20 {
                let mf = m as f64;
                let lhs = mf * buf[m];
                let rhs = 2.0 * x * (mf + lambda - 1.0) * buf[m - 1]
                    - (mf + 2.0 * lambda - 2.0) * buf[m - 2];
                assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
                assert!((buf[m] - gegenbauer(m, lambda, x)).abs() <= 1e-12 * buf[m].abs().max(1.0));
            }
        }
    }

    #[test]
    fn norm_matches_legendre_case() {
        // lambda = 1/2: Legendre, norm 2/(2m+1)
        for m in 0..10 {
            let expect = 2.0 / (2.0 * m as f64 + 1.0);
            assert!((gegenbauer_norm_sq(m, 0.5) - expect).abs() < 1e-13);
        }
    }
}
