//! Comparison pipelines: the Laplacian condition, the volume verdict for
//! alpha in (-3, 0], and the counterexample construction for alpha in (0, 1].

mod critical;

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::Serialize;

use crate::bodies::{direction, perturb_body, BodyKind, ConvexBody, CounterexampleFamily, Profile};
use crate::error::{Error, Result};
use crate::fourier::{
    axisym_homogeneous_ft, lemma22_via_fracderiv, multiplier, q3_special, Q3Sign, SphericalFunction,
};
use crate::par;

pub use critical::{critical_integral, critical_exponents};

/// Default polar-angle grid for the condition check.
pub const DEFAULT_GRID: usize = 181;
/// Grid used to re-check a constructed pair.
pub const RECHECK_GRID: usize = 361;
/// Cap on the Gegenbauer degree used by the spectral Laplacian.
pub const MAX_DEGREE: usize = 1024;
const VOLUME_TOL: f64 = 1e-10;
const VOLUME_SLACK: f64 = 1e-6;
const CONVEXITY_GRID: usize = 2001;
const EPS_FLOOR: f64 = 1e-12;
const REFINE_STEPS: usize = 8;

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub alpha: f64,
    pub grid: Vec<f64>,
    /// (-Delta)^((n-alpha-4)/2) S_K on the grid.
    pub lhs: Vec<f64>,
    /// (-Delta)^((n-alpha-4)/2) S_L on the grid.
    pub rhs: Vec<f64>,
    pub margin: f64,
    pub satisfied: bool,
}

fn laplacian_order(n: usize, alpha: f64) -> Result<f64> {
    if n < 4 {
        return Err(Error::domain(format!("the condition needs n >= 4, got {n}")));
    }
    let q = n as f64 - alpha - 4.0;
    if !(q > -1.0 && q < n as f64 - 1.0) {
        return Err(Error::domain(format!(
            "Laplacian order n - alpha - 4 = {q} must lie in (-1, n-1)"
        )));
    }
    Ok(q)
}

fn radial_power(body: &ConvexBody) -> impl Fn(f64) -> f64 + Sync + '_ {
    let k = (body.n - 1) as i32;
    move |phi| body.radial_at(phi).powi(k)
}

/// Spectral Laplacians of S_K and S_L, expanded to a common degree so the
/// difference is exactly the transform of the difference of rho^(n-1).
fn paired_laplacians(k: &ConvexBody, l: &ConvexBody, alpha: f64) -> Result<(SphericalFunction, SphericalFunction)> {
    let n = k.n;
    let q = laplacian_order(n, alpha)?;
    let fk = radial_power(k);
    let fl = radial_power(l);
    let dk = SphericalFunction::from_fn(n, &fk, MAX_DEGREE)?.degree;
    let dl = SphericalFunction::from_fn(n, &fl, MAX_DEGREE)?.degree;
    // a perturbation series must be resolved exactly, however small eps is
    let degree = dk.max(dl).max(series_degree(k)).max(series_degree(l));
    let scale = 1.0 / (PI * (n - 1) as f64);
    let op = |v: SphericalFunction| v.map_modes(|m| Ok(scale * multiplier(m, q, n)?));
    Ok((
        op(SphericalFunction::project(n, &fk, degree))?,
        op(SphericalFunction::project(n, &fl, degree))?,
    ))
}

fn series_degree(body: &ConvexBody) -> usize {
    match &body.kind {
        BodyKind::Perturbed { base, g, .. } => g.degree.max(series_degree(base)),
        _ => 0,
    }
}

fn angle_grid(size: usize) -> Vec<f64> {
    let size = size.max(2);
    (0..size)
        .map(|i| FRAC_PI_2 * i as f64 / (size - 1) as f64)
        .collect()
}

/// Compare (-Delta)^((n-alpha-4)/2) S_K with the same for L on a grid of
/// polar angles in [0, pi/2].
pub fn check_condition(k: &ConvexBody, l: &ConvexBody, alpha: f64, grid_size: usize) -> Result<ConditionReport> {
    if k.n != l.n {
        return Err(Error::domain(format!(
            "dimension mismatch: K lives in R^{}, L in R^{}",
            k.n, l.n
        )));
    }
    let (lk, ll) = paired_laplacians(k, l, alpha)?;
    let grid = angle_grid(grid_size);
    let lhs = par::map(&grid, |&phi| lk.eval(phi));
    let rhs = par::map(&grid, |&phi| ll.eval(phi));
    let margin = lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| b - a)
        .fold(f64::INFINITY, f64::min);
    let scale = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(ConditionReport {
        alpha,
        grid,
        lhs,
        rhs,
        margin,
        satisfied: margin >= -1e-9 * scale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PositiveVerdict {
    Consistent { vol_k: f64, vol_l: f64 },
    Violation { vol_k: f64, vol_l: f64, details: String },
}

impl PositiveVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, PositiveVerdict::Consistent { .. })
    }
}

/// Given the condition, vol(K) <= vol(L) must hold for alpha in (-3, 0].
pub fn positive_verify(k: &ConvexBody, l: &ConvexBody, alpha: f64, grid_size: usize) -> Result<PositiveVerdict> {
    if !(alpha > -3.0 && alpha <= 0.0) {
        return Err(Error::domain(format!("volume comparison needs alpha in (-3, 0], got {alpha}")));
    }
    if k.n < 4 {
        return Err(Error::domain(format!("volume comparison needs n >= 4, got {}", k.n)));
    }
    let report = check_condition(k, l, alpha, grid_size)?;
    if !report.satisfied {
        return Err(Error::domain(format!(
            "precondition failed: the Laplacian condition is violated (margin {:e})",
            report.margin
        )));
    }
    let vol_k = k.volume(VOLUME_TOL)?;
    let vol_l = l.volume(VOLUME_TOL)?;
    if vol_k > vol_l * (1.0 + VOLUME_SLACK) {
        Ok(PositiveVerdict::Violation {
            vol_k,
            vol_l,
            details: format!("vol(K) = {vol_k} exceeds vol(L) = {vol_l} despite the condition"),
        })
    } else {
        Ok(PositiveVerdict::Consistent { vol_k, vol_l })
    }
}

/// Random pair (K, L) of profile bodies with K dilated so that the
/// condition holds and touches; None when no dilation works.
pub fn random_pair<R: Rng + ?Sized>(n: usize, alpha: f64, grid_size: usize, rng: &mut R) -> Result<Option<(ConvexBody, ConvexBody)>> {
    let l = ConvexBody::profile(n, Profile::random(rng))?;
    let k0 = ConvexBody::profile(n, Profile::random(rng))?;
    let report = check_condition(&k0, &l, alpha, grid_size)?;
    let ratio = report
        .lhs
        .iter()
        .zip(&report.rhs)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| b / a)
        .fold(f64::INFINITY, f64::min);
    if !(ratio.is_finite() && ratio > 0.0) {
        return Ok(None);
    }
    let c = (ratio * (1.0 - 1e-9)).powf(1.0 / (n - 1) as f64);
    let k = k0.scaled(c)?;
    if check_condition(&k, &l, alpha, grid_size)?.satisfied {
        Ok(Some((k, l)))
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    #[serde(rename = "N")]
    pub big_n: f64,
    #[serde(rename = "I")]
    pub integral: f64,
    pub sign: i8,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub n: usize,
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    pub rows: Vec<ScanRow>,
    #[serde(rename = "threshold_N")]
    pub threshold_n: Option<f64>,
    pub fitted_exponent: Option<f64>,
}

fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

const SCAN_TOL: f64 = 1e-10;

/// I(N) on a geometric grid, the first sign change and the growth exponent
/// of |I| well past it.
pub fn scan_counterexample(n: usize, alpha: f64, n_min: f64, n_max: f64, per_decade: usize) -> Result<ScanReport> {
    let (p, q) = critical_exponents(n, alpha)?;
    if !(n_min > 0.0 && n_max > n_min) || per_decade == 0 {
        return Err(Error::domain(format!(
            "need 0 < N_min < N_max and per_decade >= 1, got [{n_min}, {n_max}], {per_decade}"
        )));
    }
    let decades = (n_max / n_min).log10();
    let count = (decades * per_decade as f64).round() as usize + 1;
    let grid: Vec<f64> = (0..count)
        .map(|i| {
            if i + 1 == count {
                n_max
            } else {
                n_min * 10f64.powf(i as f64 / per_decade as f64)
            }
        })
        .collect();
    let values = par::map(&grid, |&big_n| critical_integral(n, alpha, big_n, SCAN_TOL));
    let mut rows = Vec::with_capacity(count);
    for (big_n, v) in grid.iter().zip(values) {
        let v = v?;
        rows.push(ScanRow {
            big_n: *big_n,
            integral: v,
            sign: sign_of(v),
        });
    }
    let mut threshold_n = None;
    for w in rows.windows(2) {
        if w[0].sign != w[1].sign && w[0].sign != 0 && w[1].sign != 0 {
            let s0 = w[0].sign;
            let (mut lo, mut hi) = (w[0].big_n.ln(), w[1].big_n.ln());
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                if sign_of(critical_integral(n, alpha, mid.exp(), SCAN_TOL)?) == s0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            threshold_n = Some((0.5 * (lo + hi)).exp());
            break;
        } else if w[0].sign == 0 {
            threshold_n = Some(w[0].big_n);
            break;
        }
    }
    let fitted_exponent = threshold_n.and_then(|th| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.big_n >= 100.0 * th && r.integral != 0.0)
            .map(|r| (r.big_n.ln(), r.integral.abs().ln()))
            .collect();
        least_squares_slope(&pts)
    });
    Ok(ScanReport {
        n,
        alpha,
        p,
        q,
        rows,
        threshold_n,
        fitted_exponent,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bump {
    pub center: f64,
    pub width: f64,
}

impl Bump {
    fn profile(&self, phi: f64) -> f64 {
        let x = (phi - self.center) / self.width;
        if x.abs() >= 1.0 {
            0.0
        } else {
            -(-1.0 / (1.0 - x * x)).exp()
        }
    }

    /// Non-positive even bump on the sphere: mirrored about the axis and the
    /// equator.
    pub fn value(&self, phi: f64) -> f64 {
        let phi = crate::bodies::fold_angle(phi);
        if self.center == 0.0 {
            self.profile(phi)
        } else {
            self.profile(phi) + self.profile(-phi)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexamplePair {
    #[serde(rename = "L")]
    pub l: ConvexBody,
    #[serde(rename = "K")]
    pub k: ConvexBody,
    pub epsilon: f64,
    pub bump: Bump,
    pub condition: ConditionReport,
    #[serde(rename = "vol_L")]
    pub vol_l: f64,
    #[serde(rename = "vol_K")]
    pub vol_k: f64,
}

/// Options for [`build_counterexample`]; `None` picks the documented default.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    pub bump_center: Option<f64>,
    pub bump_width: Option<f64>,
    pub eps_start: Option<f64>,
    pub grid_size: Option<usize>,
}

fn transform_is_negative(l: &ConvexBody, alpha: f64, phi: f64) -> Result<bool> {
    let (p, q) = critical_exponents(l.n, alpha)?;
    let xi = direction(l.n, phi);
    if (q - 3.0).abs() < 1e-12 {
        Ok(q3_special(l, &xi)?.sign == Q3Sign::Negative)
    } else {
        Ok(lemma22_via_fracderiv(l, &xi, p, q)? < 0.0)
    }
}

/// Polar extent of the cap around the axis where (||x||_L^-1 |x|^p)^ < 0.
pub fn negative_cap(l: &ConvexBody, alpha: f64) -> Result<f64> {
    if !transform_is_negative(l, alpha, 0.0)? {
        return Err(Error::Pipeline(
            "N below threshold: the transform is not negative on the axis".into(),
        ));
    }
    let step = 0.02;
    let mut inside = 0.0;
    let mut outside = None;
    let mut phi = step;
    while phi < FRAC_PI_2 {
        if transform_is_negative(l, alpha, phi)? {
            inside = phi;
            phi += step;
        } else {
            outside = Some(phi);
            break;
        }
    }
    let Some(mut outside) = outside else {
        return Ok(FRAC_PI_2);
    };
    for _ in 0..20 {
        let mid = 0.5 * (inside + outside);
        if transform_is_negative(l, alpha, mid)? {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(inside)
}

/// Bump function v smoothed by the heat kernel of the sphere (time
/// (width/12)^2), which keeps it non-positive while its Gegenbauer
/// coefficients decay like a Gaussian. Any positive truncation ripple left
/// is removed by lowering the constant mode.
pub fn bump_series(n: usize, bump: Bump) -> Result<SphericalFunction> {
    if !(bump.width > 0.0) {
        return Err(Error::domain(format!("bump width must be positive, got {}", bump.width)));
    }
    // exp(-tau m^2) < 1e-18 by the cap
    let tau = (bump.width / 12.0).powi(2).max(42.0 / (MAX_DEGREE * MAX_DEGREE) as f64);
    let degree = ((42.0 / tau).sqrt().ceil() as usize).clamp(64, MAX_DEGREE);
    let raw = SphericalFunction::project(n, &|phi| bump.value(phi), degree);
    let v = raw.map_modes(|m| Ok((-tau * (m * (m + n - 2)) as f64).exp()))?;
    let grid = 8 * v.degree;
    let ripple = (0..=grid)
        .map(|i| v.eval(FRAC_PI_2 * i as f64 / grid as f64))
        .fold(0.0f64, f64::max);
    if ripple <= 0.0 {
        return Ok(v);
    }
    let mut coeffs = v.coeffs.clone();
    coeffs[0] -= 1.1 * ripple;
    SphericalFunction::from_coeffs(n, coeffs)
}

/// g with (r^(-n+q+1) g)^ proportional to r^(-q-1) v, q = alpha + 2.
pub fn perturbation_for(n: usize, alpha: f64, v: &SphericalFunction) -> Result<SphericalFunction> {
    axisym_homogeneous_ft(v, alpha + 2.0, n)
}

/// Construct L from the counterexample family and K = L + eps g with
/// vol(L) < vol(K) while the Laplacian condition holds.
pub fn build_counterexample(n: usize, alpha: f64, big_n: f64, opts: BuildOptions) -> Result<CounterexamplePair> {
    let (p, _) = critical_exponents(n, alpha)?;
    let l = CounterexampleFamily::new(n, p, big_n)?.body()?;
    let cap = negative_cap(&l, alpha)?;
    let bump = Bump {
        center: opts.bump_center.unwrap_or(0.0),
        width: opts.bump_width.unwrap_or(cap),
    };
    if !(bump.width > 0.0) || bump.center < 0.0 || bump.center + bump.width > cap + 1e-12 {
        return Err(Error::domain(format!(
            "bump [{} +- {}] must lie inside the negative cap [0, {cap}]",
            bump.center, bump.width
        )));
    }
    let v = bump_series(n, bump)?;
    let g = perturbation_for(n, alpha, &v)?;
    let grid_size = opts.grid_size.unwrap_or(DEFAULT_GRID);
    let g_max = angle_grid(4097)
        .iter()
        .map(|&phi| g.eval(phi).abs())
        .fold(0.0f64, f64::max);
    let rho_min = angle_grid(4097)
        .iter()
        .map(|&phi| l.radial_at(phi))
        .fold(f64::INFINITY, f64::min)
        .powi(n as i32 - 1);
    let mut eps = opts.eps_start.unwrap_or(0.1 * rho_min / g_max);
    if !(eps > 0.0) {
        return Err(Error::domain(format!("eps_start must be positive, got {eps}")));
    }
    let vol_l = l.volume(VOLUME_TOL)?;
    let first = eps;
    let mut last = String::new();
    while eps >= EPS_FLOOR {
        match try_epsilon(&l, &g, alpha, eps, grid_size) {
            Ok(Some(found)) => {
                let (eps, (k, condition)) = if eps < first {
                    refine_epsilon(&l, &g, alpha, eps, grid_size, (eps, found))?
                } else {
                    (eps, found)
                };
                let vol_k = k.volume(VOLUME_TOL)?;
                if !(vol_l < vol_k) {
                    return Err(Error::Pipeline(format!(
                        "vol(L) = {vol_l} is not below vol(K) = {vol_k} at eps = {eps}"
                    )));
                }
                return Ok(CounterexamplePair {
                    l,
                    k,
                    epsilon: eps,
                    bump,
                    condition,
                    vol_l,
                    vol_k,
                });
            }
            Ok(None) => {}
            Err(e) => last = e.to_string(),
        }
        if last.is_empty() {
            last = format!("convexity or condition failed at eps = {eps}");
        }
        eps *= 0.5;
    }
    Err(Error::Pipeline(format!(
        "eps underflow below {EPS_FLOOR}: no admissible perturbation ({last})"
    )))
}

type Admissible = (ConvexBody, ConditionReport);

/// Largest admissible eps in [lo, 2 lo) by geometric bisection; lo passes.
fn refine_epsilon(
    l: &ConvexBody,
    g: &SphericalFunction,
    alpha: f64,
    lo: f64,
    grid_size: usize,
    best: (f64, Admissible),
) -> Result<(f64, Admissible)> {
    let (mut lo, mut hi) = (lo, 2.0 * lo);
    let mut best = best;
    for _ in 0..REFINE_STEPS {
        let mid = (lo * hi).sqrt();
        match try_epsilon(l, g, alpha, mid, grid_size)? {
            Some(found) => {
                lo = mid;
                best = (mid, found);
            }
            None => hi = mid,
        }
    }
    Ok(best)
}

fn try_epsilon(
    l: &ConvexBody,
    g: &SphericalFunction,
    alpha: f64,
    eps: f64,
    grid_size: usize,
) -> Result<Option<(ConvexBody, ConditionReport)>> {
    let k = perturb_body(l, g, eps)?;
    if !k.check_convexity(CONVEXITY_GRID).passed() {
        return Ok(None);
    }
    let condition = check_condition(&k, l, alpha, grid_size)?;
    Ok(condition.satisfied.then_some((k, condition)))
}
