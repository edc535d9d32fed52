use crate::bodies::CounterexampleFamily;
use crate::error::{Error, Result};
use crate::sections::{closed_a0, closed_a2, radial_weight_integral};
use crate::specfun::{integrate_adaptive, integrate_smooth, sphere_area, Endpoints};

/// (p, q) = (-n+alpha+4, alpha+2) for the construction, alpha in (0, 1], n >= 5.
pub fn critical_exponents(n: usize, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("the construction needs alpha in (0, 1], got {alpha}")));
    }
    if n < 5 {
        return Err(Error::domain(format!("the construction needs n >= 5, got {n}")));
    }
    let q = alpha + 2.0;
    Ok((-(n as f64) + q + 2.0, q))
}

// (1+s)^(p/2) - 1 - (p/2) s
fn binomial_remainder(h: f64, s: f64) -> f64 {
    if s < 0.1 {
        let mut term = h * (h - 1.0) / 2.0 * s * s;
        let mut sum = term;
        let mut k = 2.0;
        while term.abs() > 1e-18 * sum.abs() && k < 60.0 {
            term *= (h - k) / (k + 1.0) * s;
            sum += term;
            k += 1.0;
        }
        sum
    } else {
        (h * s.ln_1p()).exp_m1() - h * s
    }
}

/// I(N) = int_0^inf t^(-q-1) (A(t) - A(0) - A''(0) t^2 / 2) dt for the
/// counterexample body along its axis, q = alpha+2, p = -n+q+2.
pub fn critical_integral(n: usize, alpha: f64, big_n: f64, rel_tol: f64) -> Result<f64> {
    let (p, q) = critical_exponents(n, alpha)?;
    let fam = CounterexampleFamily::new(n, p, big_n)?;
    let a = fam.a_n;
    let a0 = closed_a0(n, p)?;
    let a2 = closed_a2(n, p)?;
    let c = sphere_area(n - 2);
    let e1 = n as f64 + p - 1.0;
    let e3 = n as f64 + p - 3.0;
    let h = 0.5 * p;
    // int_0^f r^(n-2) [(r^2+t^2)^(p/2) - r^p - (p/2) t^2 r^(p-2)] dr
    let j2 = |t: f64, f: f64| -> Result<f64> {
        if p == 0.0 {
            return Ok(0.0);
        }
        let r1 = t.min(f);
        let near = radial_weight_integral(n, p, t, r1)? - r1.powf(e1) / e1 - h * t * t * r1.powf(e3) / e3;
        if f <= t {
            return Ok(near);
        }
        // r = t e^u
        let far = integrate_smooth(
            |u: f64| {
                let r = t * u.exp();
                r.powf(e1) * binomial_remainder(h, (-2.0 * u).exp())
            },
            0.0,
            (f / t).ln(),
            1e-12,
            0.0,
        )?
        .value;
        Ok(near + far)
    };
    let mut failure = None;
    let body = integrate_adaptive(
        |t: f64| {
            if t <= 0.0 {
                return 0.0;
            }
            let w = -t * t - big_n * t.powi(4);
            let f = fam.f(t);
            let mid = if p == 0.0 {
                0.0
            } else {
                h * t * t * (e3 / e1 * w.ln_1p()).exp_m1() / e3
            };
            match j2(t, f) {
                Ok(j) => t.powf(-q - 1.0) * (-big_n * t.powi(4) / e1 + mid + j),
                Err(e) => {
                    failure = Some(e);
                    f64::NAN
                }
            }
        },
        0.0,
        a,
        rel_tol,
        Endpoints::BOTH,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let tail = -a0 * a.powf(-q) / q - 0.5 * a2 * a.powf(2.0 - q) / (q - 2.0);
    Ok(c * body?.value + tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remainder_series_matches_direct() {
        for s in [0.05f64, 0.09, 0.11, 0.5] {
            let direct = (1.0 + s).powf(-0.25) - 1.0 + 0.25 * s;
            assert!((binomial_remainder(-0.25, s) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn q3_closed_form() {
        // n = 5, p = 0: I = C (2a^2 - 4/3) / (4 a^3)
        for big_n in [0.3, 0.75, 5.0, 1e4] {
            let a = CounterexampleFamily::new(5, 0.0, big_n).unwrap().a_n;
            let want = sphere_area(3) * (2.0 * a * a - 4.0 / 3.0) / (4.0 * a.powi(3));
            let got = critical_integral(5, 1.0, big_n, 1e-12).unwrap();
            assert!((got - want).abs() < 1e-8 * want.abs().max(1.0), "N={big_n}: {got} vs {want}");
        }
    }
}
