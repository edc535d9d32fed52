use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// A fixed quadrature rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureRule {
    /// Apply the rule on [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * x);
        }
        acc * h
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (c + h * x, w * h))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn build_gauss_legendre(order: usize) -> QuadratureRule {
    if order == 1 {
        return QuadratureRule {
            nodes: vec![0.0],
            weights: vec![2.0],
            order,
        };
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1e-3) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule {
        nodes,
        weights,
        order,
    }
}

/// Gauss-Legendre rule with `order` nodes; tables are built once per order.
pub fn gauss_legendre(order: usize) -> Arc<QuadratureRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    let order = order.max(1);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&order) {
        return rule.clone();
    }
    let rule = Arc::new(build_gauss_legendre(order));
    cache.lock().unwrap().entry(order).or_insert(rule).clone()
}

// 21-point Kronrod extension of the 10-point Gauss rule (nonnegative half,
// Gauss nodes at odd indices).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_74,
    0.973_906_528_517_171_720_08,
    0.930_157_491_355_708_226,
    0.865_063_366_688_984_510_73,
    0.780_817_726_586_416_897_06,
    0.679_409_568_299_024_406_23,
    0.562_757_134_668_604_683_34,
    0.433_395_394_129_247_190_8,
    0.294_392_862_701_460_198_13,
    0.148_874_338_981_631_210_88,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278,
    0.032_558_162_307_964_727_479,
    0.054_755_896_574_351_996_031,
    0.075_039_674_810_919_952_767,
    0.093_125_454_583_697_605_535,
    0.109_387_158_802_297_641_9,
    0.123_491_976_262_065_851_08,
    0.134_709_217_311_473_325_93,
    0.142_775_938_577_060_080_8,
    0.147_739_104_901_338_491_37,
    0.149_445_554_002_916_905_66,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_594,
    0.149_451_349_150_580_593_15,
    0.219_086_362_515_982_044,
    0.269_266_719_309_996_355_09,
    0.295_524_224_714_752_870_17,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    roundoff: f64,
}

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = WGK[10] * fc;
    let mut rg = 0.0;
    let mut res_abs = rk.abs();
    let mut fv = [0.0f64; 20];
    for j in 0..10 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        rk += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            rg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * rk;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let ah = h.abs();
    let value = rk * h;
    res_abs *= ah;
    res_asc *= ah;
    let mut err = ((rk - rg) * h).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let roundoff = 50.0 * f64::EPSILON * res_abs;
    if roundoff > err {
        err = roundoff;
    }
    Segment {
        a,
        b,
        value,
        error: err,
        roundoff,
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Which endpoints carry an integrable power-law singularity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Endpoints {
    pub left: bool,
    pub right: bool,
}

impl Endpoints {
    pub const NONE: Endpoints = Endpoints {
        left: false,
        right: false,
    };
    pub const LEFT: Endpoints = Endpoints {
        left: true,
        right: false,
    };
    pub const RIGHT: Endpoints = Endpoints {
        left: false,
        right: true,
    };
    pub const BOTH: Endpoints = Endpoints {
        left: true,
        right: true,
    };
}

/// Absolute tolerance floor shared by the adaptive routines.
pub const ABS_FLOOR: f64 = 1e-14;
const MAX_SEGMENTS: usize = 4000;
const MAX_LEVELS: usize = 400;

/// Globally adaptive Gauss-Kronrod (10/21) integration of a smooth integrand,
/// stopping when the error estimate is below `max(rel_tol |I|, abs_tol)`.
pub fn integrate_smooth<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<IntegralResult> {
    if a == b {
        return Ok(IntegralResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let mut segs = vec![gk21(&mut f, a, b)];
    let mut evaluations = 21;
    loop {
        let value: f64 = segs.iter().map(|s| s.value).sum();
        let error: f64 = segs.iter().map(|s| s.error).sum();
        let roundoff: f64 = segs.iter().map(|s| s.roundoff).sum();
        let tol = (rel_tol * value.abs()).max(abs_tol);
        if !value.is_finite() {
            return Err(Error::NonConvergence {
                estimate: value,
                abs_error: f64::INFINITY,
                evaluations,
            });
        }
        if error <= tol || error <= 2.0 * roundoff {
            return Ok(IntegralResult {
                value,
                abs_error_estimate: error,
                evaluations,
            });
        }
        if segs.len() >= MAX_SEGMENTS {
            return Err(Error::NonConvergence {
                estimate: value,
                abs_error: error,
                evaluations,
            });
        }
        // bisect the segment with the largest non-roundoff error
        let (idx, worst) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| {
                (x.1.error - x.1.roundoff)
                    .partial_cmp(&(y.1.error - y.1.roundoff))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|(i, s)| (i, *s))
            .unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            return Ok(IntegralResult {
                value,
                abs_error_estimate: error,
                evaluations,
            });
        }
        let left = gk21(&mut f, worst.a, mid);
        let right = gk21(&mut f, mid, worst.b);
        evaluations += 42;
        segs[idx] = left;
        segs.push(right);
    }
}

/// Integrate over [a, b] with geometric (ratio 1/2) grading toward a
/// singular endpoint. When the level contributions settle into a
/// geometric sequence the remaining tail is summed in closed form.
fn integrate_graded<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    toward_a: bool,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<IntegralResult> {
    let width = (b - a).abs();
    let sign = if b > a { 1.0 } else { -1.0 };
    let (anchor, dir) = if toward_a { (a, 1.0) } else { (b, -1.0) };
    let mut total = 0.0;
    let mut err = 0.0;
    let mut evaluations = 0;
    let mut prev: Option<f64> = None;
    let mut prev_ratio: Option<f64> = None;
    let mut small_run = 0;
    for j in 0..MAX_LEVELS {
        let hi = width * 0.5f64.powi(j as i32);
        let lo = 0.5 * hi;
        let x_hi = anchor + dir * sign * hi;
        let x_lo = anchor + dir * sign * lo;
        if x_lo == anchor || x_lo == x_hi {
            // ran out of resolution; treat what is left as a geometric tail
            break;
        }
        let (s, e) = {
            let r = integrate_smooth(
                &mut *f,
                x_lo.min(x_hi),
                x_lo.max(x_hi),
                rel_tol * 0.1,
                abs_tol * 0.01,
            )?;
            evaluations += r.evaluations;
            (r.value * sign, r.abs_error_estimate)
        };
        total += s;
        err += e;
        let tol = (rel_tol * total.abs()).max(abs_tol);
        if let Some(p) = prev {
            if p != 0.0 {
                let ratio = s / p;
                if let Some(pr) = prev_ratio {
                    let stable = (ratio - pr).abs() <= 1e-3 * ratio.abs();
                    if j >= 4 && stable && ratio > 0.0 && ratio < 0.999 {
                        let tail = s * ratio / (1.0 - ratio);
                        let tail_err = tail.abs() * (ratio - pr).abs() / (1.0 - ratio);
                        if tail_err <= 0.1 * tol {
                            total += tail;
                            err += tail_err;
                            return Ok(IntegralResult {
                                value: total,
                                abs_error_estimate: err,
                                evaluations,
                            });
                        }
                    }
                }
                prev_ratio = Some(ratio);
            }
        }
        if s.abs() <= 0.01 * tol {
            small_run += 1;
            if small_run >= 3 {
                return Ok(IntegralResult {
                    value: total,
                    abs_error_estimate: err + s.abs(),
                    evaluations,
                });
            }
        } else {
            small_run = 0;
        }
        prev = Some(s);
    }
    // resolution exhausted: estimate the remainder from the last ratio
    let tail = match (prev, prev_ratio) {
        (Some(s), Some(r)) if r > 0.0 && r < 1.0 => s * r / (1.0 - r),
        _ => 0.0,
    };
    let tol = (rel_tol * total.abs()).max(abs_tol);
    if tail.abs() <= tol {
        Ok(IntegralResult {
            value: total + tail,
            abs_error_estimate: err + tail.abs(),
            evaluations,
        })
    } else {
        Err(Error::NonConvergence {
            estimate: total + tail,
            abs_error: err + tail.abs(),
            evaluations,
        })
    }
}

/// Adaptive integration of `f` over [a, b].
///
/// Endpoints flagged in `singular` are approached by geometric subdivision;
/// the integrand may have an integrable power singularity there.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    singular: Endpoints,
) -> Result<IntegralResult> {
    integrate_adaptive_abs(&mut f, a, b, rel_tol, ABS_FLOOR, singular)
}

/// As [`integrate_adaptive`] with an explicit absolute tolerance floor.
pub fn integrate_adaptive_abs<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    singular: Endpoints,
) -> Result<IntegralResult> {
    if !(a < b) {
        return Err(Error::domain(format!(
            "integration interval must satisfy a < b, got [{a}, {b}]"
        )));
    }
    match (singular.left, singular.right) {
        (false, false) => integrate_smooth(&mut f, a, b, rel_tol, abs_tol),
        (true, false) => integrate_graded(&mut f, a, b, true, rel_tol, abs_tol),
        (false, true) => integrate_graded(&mut f, a, b, false, rel_tol, abs_tol),
        (true, true) => {
            let m = 0.5 * (a + b);
            let l = integrate_graded(&mut f, a, m, true, rel_tol, abs_tol * 0.5)?;
            let r = integrate_graded(&mut f, m, b, false, rel_tol, abs_tol * 0.5)?;
            Ok(IntegralResult {
                value: l.value + r.value,
                abs_error_estimate: l.abs_error_estimate + r.abs_error_estimate,
                evaluations: l.evaluations + r.evaluations,
            })
        }
    }
}
