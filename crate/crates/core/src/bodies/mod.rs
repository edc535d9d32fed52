//! Origin-symmetric bodies of revolution in R^n.
//!
//! The symmetry axis is the last coordinate. Every body is described by its
//! radial function as a function of the polar angle `phi` measured from the
//! axis; evenness makes `rho(phi) = rho(-phi) = rho(pi - phi)`.

mod montecarlo;
mod spline;

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::SphericalFunction;
use crate::specfun::{integrate_smooth, sphere_area};

pub use montecarlo::{monte_carlo_volume, MonteCarloEstimate};
pub use spline::PeriodicSpline;

const UNIT_TOL: f64 = 1e-12;
/// Tolerance on second differences in the convexity certificate.
pub const CONVEXITY_TOL: f64 = 1e-9;

/// Exponent bundle (n, alpha, q, p).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub n: usize,
    pub alpha: f64,
    pub q: f64,
    pub p: f64,
}

impl Exponents {
    pub fn new(n: usize, alpha: f64, q: f64, p: f64) -> Self {
        Exponents { n, alpha, q, p }
    }

    /// q = alpha + 2, p = -n + q + 2.
    pub fn negative_part(n: usize, alpha: f64) -> Self {
        let q = alpha + 2.0;
        Exponents::new(n, alpha, q, -(n as f64) + q + 2.0)
    }

    /// q = alpha + 2, p = -n + alpha + 4.
    pub fn positive_part(n: usize, alpha: f64) -> Self {
        Exponents::new(n, alpha, alpha + 2.0, -(n as f64) + alpha + 4.0)
    }

    /// Domain of the fractional derivative of A_{K,xi,p} at zero.
    pub fn check_fracderiv(&self) -> Result<()> {
        check_fracderiv_domain(self.n, self.p, self.q)
    }

    pub fn check_transform(&self) -> Result<()> {
        self.check_fracderiv()?;
        let crit = self.n as f64 + self.p - 1.0;
        if (self.q - crit).abs() < 1e-12 {
            return Err(Error::domain(format!(
                "q = {} must differ from n + p - 1 = {crit} (transform pole)",
                self.q
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_fracderiv_domain(n: usize, p: f64, q: f64) -> Result<()> {
    if !(q > -1.0) {
        return Err(Error::domain(format!("q = {q} must exceed -1 (differentiability guard)")));
    }
    let bound = -(n as f64) + q.floor() + 2.0;
    if p <= 0.0 && !(p > bound) {
        return Err(Error::domain(format!(
            "p = {p} must exceed -n+floor(q)+2 = {bound} (differentiability guard)"
        )));
    }
    if !(p > -(n as f64) + 1.0) {
        return Err(Error::domain(format!(
            "p = {p} must exceed -n+1 = {} for A to be finite",
            1.0 - n as f64
        )));
    }
    Ok(())
}

/// Even profile `f(t) = scale * (sum_k coeffs[k] t^(2k))^gamma` on
/// [-half_width, half_width]; the body is `{|x'| <= f(x_n)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub coeffs: Vec<f64>,
    pub gamma: f64,
    pub scale: f64,
    pub half_width: f64,
}

impl Profile {
    pub fn value(&self, t: f64) -> f64 {
        let t = t.abs();
        if t > self.half_width {
            return 0.0;
        }
        let s = t * t;
        let base = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c);
        if base <= 0.0 {
            0.0
        } else {
            self.scale * base.powf(self.gamma)
        }
    }

    /// Largest value on a fine grid (exact at 0 for concave profiles).
    pub fn max_value(&self) -> f64 {
        (0..=512)
            .map(|i| self.value(self.half_width * i as f64 / 512.0))
            .fold(0.0, f64::max)
    }

    /// Profile of the dilated body c*K.
    pub fn scaled(&self, c: f64) -> Profile {
        let mut p = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let v = a / p;
                p *= c * c;
                v
            })
            .collect();
        Profile {
            coeffs,
            gamma: self.gamma,
            scale: self.scale * c,
            half_width: self.half_width * c,
        }
    }

    /// Random concave profile `b (1 - a1 (t/h)^2 - a2 (t/h)^4)^gamma` with
    /// a1 + a2 = 1 and gamma in {1/2, 1/4}.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Profile {
        let b = rng.gen_range(0.5..1.5);
        let h = rng.gen_range(0.5..1.5);
        let a1 = rng.gen_range(0.0..1.0);
        let a2 = 1.0 - a1;
        let gamma = if rng.gen_bool(0.5) { 0.5 } else { 0.25 };
        Profile {
            coeffs: vec![1.0, -a1 / (h * h), -a2 / h.powi(4)],
            gamma,
            scale: b,
            half_width: h,
        }
    }
}

/// Radial samples over polar angles in [0, pi/2], extended by symmetry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tabulated {
    pub angles: Vec<f64>,
    pub rho: Vec<f64>,
    #[serde(skip)]
    spline: Option<PeriodicSpline>,
}

impl Tabulated {
    pub fn new(angles: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        if angles.len() != rho.len() || angles.len() < 2 {
            return Err(Error::domain("tabulated body needs matching angle/rho columns"));
        }
        if angles.iter().any(|a| !(0.0..=FRAC_PI_2 + 1e-12).contains(a)) {
            return Err(Error::domain("tabulated angles must lie in [0, pi/2]"));
        }
        if rho.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(Error::domain("tabulated radial values must be positive and finite"));
        }
        // mirror into one period [0, pi) of rho(phi) = rho(phi + pi)
        let mut pts: Vec<(f64, f64)> = angles.iter().copied().zip(rho.iter().copied()).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut x = Vec::new();
        let mut y = Vec::new();
        for &(a, r) in &pts {
            x.push(a.min(FRAC_PI_2));
            y.push(r);
        }
        for &(a, r) in pts.iter().rev() {
            let m = PI - a;
            if m > FRAC_PI_2 + 1e-12 && m < PI - 1e-12 {
                x.push(m);
                y.push(r);
            }
        }
        let spline = PeriodicSpline::new(x, y, PI)?;
        Ok(Tabulated {
            angles,
            rho,
            spline: Some(spline),
        })
    }

    fn eval(&self, phi: f64) -> f64 {
        match &self.spline {
            Some(s) => s.eval(phi),
            None => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodyKind {
    Ball {
        radius: f64,
    },
    Profile(Profile),
    /// rho^(n-1) = rho_base^(n-1) + epsilon * g
    Perturbed {
        base: Box<ConvexBody>,
        epsilon: f64,
        g: SphericalFunction,
    },
    Tabulated(Tabulated),
}

/// Sampled convexity certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Convexity {
    Pass,
    /// `location` is t for profile bodies and the polar angle otherwise.
    Fail { location: f64, defect: f64 },
}

impl Convexity {
    pub fn passed(&self) -> bool {
        matches!(self, Convexity::Pass)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexBody {
    pub n: usize,
    pub kind: BodyKind,
}

/// Fold any polar angle into [0, pi/2] using evenness.
pub fn fold_angle(phi: f64) -> f64 {
    let mut a = phi.abs() % (2.0 * PI);
    if a > PI {
        a = 2.0 * PI - a;
    }
    if a > FRAC_PI_2 {
        a = PI - a;
    }
    a
}

/// Polar angle (from the last axis) of a unit vector, validated.
pub fn polar_angle(n: usize, xi: &[f64]) -> Result<f64> {
    if xi.len() != n {
        return Err(Error::domain(format!(
            "direction has {} components, body lives in R^{n}",
            xi.len()
        )));
    }
    let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::domain(format!("direction must be a unit vector, |xi| = {norm}")));
    }
    let perp = xi[..n - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(perp.atan2(xi[n - 1]))
}

/// Unit vector in R^n at polar angle `phi` in the (x_1, x_n) plane.
pub fn direction(n: usize, phi: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[0] = phi.sin();
    v[n - 1] = phi.cos();
    v
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("dimension must be at least 2, got {n}")));
    }
    Ok(())
}

impl ConvexBody {
    pub fn ball(n: usize, radius: f64) -> Result<Self> {
        check_dim(n)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain(format!("ball radius must be positive, got {radius}")));
        }
        Ok(ConvexBody {
            n,
            kind: BodyKind::Ball { radius },
        })
    }

    pub fn profile(n: usize, profile: Profile) -> Result<Self> {
        check_dim(n)?;
        if !(profile.half_width > 0.0) || !(profile.value(0.0) > 0.0) {
            return Err(Error::domain("profile must be positive at 0 with positive half-width"));
        }
        Ok(ConvexBody {
            n,
            kind: BodyKind::Profile(profile),
        })
    }

    pub fn tabulated(n: usize, angles: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        Ok(ConvexBody {
            n,
            kind: BodyKind::Tabulated(Tabulated::new(angles, rho)?),
        })
    }

    /// Rebuild caches dropped by deserialization.
    pub fn rebuild(self) -> Result<Self> {
        let n = self.n;
        Ok(match self.kind {
            BodyKind::Tabulated(t) => ConvexBody::tabulated(n, t.angles, t.rho)?,
            BodyKind::Perturbed { base, epsilon, g } => ConvexBody {
                n,
                kind: BodyKind::Perturbed {
                    base: Box::new(base.rebuild()?),
                    epsilon,
                    g,
                },
            },
            kind => ConvexBody { n, kind },
        })
    }

    pub fn is_axisymmetric(&self) -> bool {
        true
    }

    pub fn as_profile(&self) -> Option<&Profile> {
        match &self.kind {
            BodyKind::Profile(p) => Some(p),
            _ => None,
        }
    }

    /// Radial function at polar angle `phi`.
    pub fn radial_at(&self, phi: f64) -> f64 {
        let phi = fold_angle(phi);
        match &self.kind {
            BodyKind::Ball { radius } => *radius,
            BodyKind::Profile(p) => profile_radial(p, phi),
            BodyKind::Perturbed { base, epsilon, g } => {
                let k = (self.n - 1) as f64;
                let v = base.radial_at(phi).powf(k) + epsilon * g.eval(phi);
                v.max(0.0).powf(1.0 / k)
            }
            BodyKind::Tabulated(t) => t.eval(phi),
        }
    }

    /// Radial function in direction `xi` (unit vector in R^n).
    pub fn radial(&self, xi: &[f64]) -> Result<f64> {
        Ok(self.radial_at(polar_angle(self.n, xi)?))
    }

    pub fn minkowski_norm(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::domain("point dimension does not match the body"));
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return Err(Error::domain("the Minkowski norm needs x != 0"));
        }
        let perp = x[..self.n - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(r / self.radial_at(perp.atan2(x[self.n - 1])))
    }

    /// Membership of the point with |x'| = `perp` and x_n = `z`.
    pub fn contains_meridian(&self, perp: f64, z: f64) -> bool {
        match &self.kind {
            BodyKind::Ball { radius } => perp * perp + z * z <= radius * radius,
            BodyKind::Profile(p) => profile_contains(p, perp, z),
            _ => {
                let r = perp.hypot(z);
                r == 0.0 || r <= self.radial_at(perp.atan2(z))
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let perp = x[..self.n - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
        self.contains_meridian(perp, x[self.n - 1])
    }

    /// Volume from the polar formula reduced to the polar angle.
    pub fn volume(&self, rel_tol: f64) -> Result<f64> {
        let n = self.n;
        if let BodyKind::Ball { radius } = self.kind {
            return Ok(sphere_area(n - 1) / n as f64 * radius.powi(n as i32));
        }
        let w = if n >= 3 { sphere_area(n - 2) } else { 2.0 };
        let r = integrate_smooth(
            |phi: f64| self.radial_at(phi).powi(n as i32) * phi.sin().powi(n as i32 - 2),
            0.0,
            FRAC_PI_2,
            rel_tol,
            1e-15,
        )?;
        Ok(2.0 * w / n as f64 * r.value)
    }

    /// Support function in the direction at polar angle `beta`.
    pub fn support_meridian(&self, beta: f64) -> f64 {
        let beta = fold_angle(beta);
        let (sb, cb) = beta.sin_cos();
        match &self.kind {
            BodyKind::Ball { radius } => *radius,
            BodyKind::Profile(p) => {
                let h = p.half_width;
                let obj = |t: f64| t * cb + p.value(t) * sb;
                let grid = 256;
                let (mut best, mut bv) = (0, f64::NEG_INFINITY);
                for i in 0..=grid {
                    let t = -h + 2.0 * h * i as f64 / grid as f64;
                    let v = obj(t);
                    if v > bv {
                        bv = v;
                        best = i;
                    }
                }
                let step = 2.0 * h / grid as f64;
                let t0 = -h + step * best as f64;
                let v = golden_max(&obj, (t0 - step).max(-h), (t0 + step).min(h));
                v.max(bv)
            }
            _ => {
                let obj = |phi: f64| self.radial_at(phi) * (phi - beta).cos();
                let grid = 720;
                let lo = beta - FRAC_PI_2;
                let step = PI / grid as f64;
                let (mut best, mut bv) = (0, f64::NEG_INFINITY);
                for i in 0..=grid {
                    let v = obj(lo + step * i as f64);
                    if v > bv {
                        bv = v;
                        best = i;
                    }
                }
                let p0 = lo + step * best as f64;
                golden_max(&obj, p0 - step, p0 + step).max(bv)
            }
        }
    }

    /// max over the body of <x, xi>.
    pub fn support_halfwidth(&self, xi: &[f64]) -> Result<f64> {
        Ok(self.support_meridian(polar_angle(self.n, xi)?))
    }

    /// Sampled second-difference convexity certificate.
    pub fn check_convexity(&self, grid_size: usize) -> Convexity {
        let grid = grid_size.max(8);
        match &self.kind {
            BodyKind::Ball { .. } => Convexity::Pass,
            BodyKind::Profile(p) => {
                let h = p.half_width;
                let step = 2.0 * h / (grid - 1) as f64;
                let f: Vec<f64> = (0..grid).map(|i| p.value(-h + step * i as f64)).collect();
                let mut worst: Option<(f64, f64)> = None;
                for i in 1..grid - 1 {
                    let d2 = f[i - 1] - 2.0 * f[i] + f[i + 1];
                    if d2 > CONVEXITY_TOL && worst.map_or(true, |(_, w)| d2 > w) {
                        worst = Some((-h + step * i as f64, d2));
                    }
                }
                match worst {
                    None => Convexity::Pass,
                    Some((location, defect)) => Convexity::Fail { location, defect },
                }
            }
            _ => {
                // turn test on the closed meridian curve
                let step = 2.0 * PI / grid as f64;
                let pts: Vec<(f64, f64)> = (0..grid)
                    .map(|i| {
                        let phi = step * i as f64;
                        let r = self.radial_at(phi);
                        (r * phi.cos(), r * phi.sin())
                    })
                    .collect();
                let mut worst: Option<(f64, f64)> = None;
                for i in 0..grid {
                    let a = pts[(i + grid - 1) % grid];
                    let b = pts[i];
                    let c = pts[(i + 1) % grid];
                    let e1 = (b.0 - a.0, b.1 - a.1);
                    let e2 = (c.0 - b.0, c.1 - b.1);
                    let cross = e1.0 * e2.1 - e1.1 * e2.0;
                    let norm = e1.0.hypot(e1.1) * e2.0.hypot(e2.1);
                    let turn = cross / norm;
                    if turn < -CONVEXITY_TOL && worst.map_or(true, |(_, w)| -turn > w) {
                        worst = Some((fold_angle(step * i as f64), -turn));
                    }
                }
                match worst {
                    None => Convexity::Pass,
                    Some((location, defect)) => Convexity::Fail { location, defect },
                }
            }
        }
    }

    /// The dilate c*K.
    pub fn scaled(&self, c: f64) -> Result<ConvexBody> {
        if !(c > 0.0) {
            return Err(Error::domain(format!("dilation factor must be positive, got {c}")));
        }
        let n = self.n;
        Ok(match &self.kind {
            BodyKind::Ball { radius } => ConvexBody::ball(n, radius * c)?,
            BodyKind::Profile(p) => ConvexBody::profile(n, p.scaled(c))?,
            BodyKind::Perturbed { base, epsilon, g } => ConvexBody {
                n,
                kind: BodyKind::Perturbed {
                    base: Box::new(base.scaled(c)?),
                    epsilon: epsilon * c.powi(n as i32 - 1),
                    g: g.clone(),
                },
            },
            BodyKind::Tabulated(t) => {
                ConvexBody::tabulated(n, t.angles.clone(), t.rho.iter().map(|r| r * c).collect())?
            }
        })
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match &self.kind {
            BodyKind::Ball { radius } => format!("ball radius={radius} n={}", self.n),
            BodyKind::Profile(p) => format!(
                "profile n={} half_width={} gamma={} coeffs={:?}",
                self.n, p.half_width, p.gamma, p.coeffs
            ),
            BodyKind::Perturbed { base, epsilon, g } => format!(
                "perturbed n={} eps={epsilon} degree={} base=({})",
                self.n,
                g.degree,
                base.describe()
            ),
            BodyKind::Tabulated(t) => format!("tabulated n={} samples={}", self.n, t.angles.len()),
        }
    }
}

// Root of h(r) = f(r cos phi) - r sin phi, which decreases from f(0) > 0
// for concave even profiles; Illinois false position on a sign bracket.
fn profile_radial(p: &Profile, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let f0 = p.value(0.0);
    if s <= 0.0 {
        return p.half_width;
    }
    if c <= 0.0 {
        return f0;
    }
    let h = |r: f64| p.value(r * c) - r * s;
    let cap = p.half_width / c;
    let mut b = cap.min(f0 / s);
    let mut fb = h(b);
    if fb >= 0.0 {
        // flat cap at z = half_width
        return b;
    }
    let (mut a, mut fa) = (0.0, f0);
    let mut side = 0;
    for _ in 0..200 {
        let r = (a * fb - b * fa) / (fb - fa);
        let fr = h(r);
        if fr == 0.0 {
            return r;
        }
        if fr > 0.0 {
            a = r;
            fa = fr;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = r;
            fb = fr;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
        if b - a <= 4.0 * f64::EPSILON * b {
            break;
        }
    }
    0.5 * (a + b)
}

fn profile_contains(p: &Profile, perp: f64, z: f64) -> bool {
    z.abs() <= p.half_width && perp <= p.value(z)
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// K with rho_K^(n-1) = rho_L^(n-1) + epsilon * g.
pub fn perturb_body(l: &ConvexBody, g: &SphericalFunction, epsilon: f64) -> Result<ConvexBody> {
    if g.n != l.n {
        return Err(Error::domain(format!(
            "perturbation lives on S^{}, body in R^{}",
            g.n - 1,
            l.n
        )));
    }
    let k = (l.n - 1) as f64;
    let grid = 2048;
    let check = |phi: f64| -> Result<()> {
        let v = l.radial_at(phi).powf(k) + epsilon * g.eval(phi);
        if !(v > 0.0) {
            return Err(Error::domain(format!(
                "rho_L^(n-1) + eps*g = {v:e} is not positive at polar angle {phi}"
            )));
        }
        Ok(())
    };
    for i in 0..=grid {
        check(FRAC_PI_2 * i as f64 / grid as f64)?;
    }
    for &phi in &g.nodes {
        check(phi)?;
    }
    Ok(ConvexBody {
        n: l.n,
        kind: BodyKind::Perturbed {
            base: Box::new(l.clone()),
            epsilon,
            g: g.clone(),
        },
    })
}

/// The family f(t) = (1 - t^2 - N t^4)^(1/(n+p-1)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleFamily {
    pub n: usize,
    pub p: f64,
    #[serde(rename = "N")]
    pub big_n: f64,
    pub a_n: f64,
}

/// Positive root of `g` on [0, 1] for g decreasing with g(0) > 0 > g(1).
fn decreasing_root<F: Fn(f64) -> f64>(g: F) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl CounterexampleFamily {
    pub fn new(n: usize, p: f64, big_n: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain(format!("counterexample bodies need n >= 3, got {n}")));
        }
        if !(n as f64 + p - 1.0 > 0.0) {
            return Err(Error::domain(format!("need n + p - 1 > 0, got {}", n as f64 + p - 1.0)));
        }
        if !(big_n > 0.0) || !big_n.is_finite() {
            return Err(Error::domain(format!("N must be positive, got {big_n}")));
        }
        let a_n = decreasing_root(|t| 1.0 - t * t - big_n * t.powi(4));
        Ok(CounterexampleFamily { n, p, big_n, a_n })
    }

    pub fn exponent(&self) -> f64 {
        1.0 / (self.n as f64 + self.p - 1.0)
    }

    pub fn profile(&self) -> Profile {
        Profile {
            coeffs: vec![1.0, -1.0, -self.big_n],
            gamma: self.exponent(),
            scale: 1.0,
            half_width: self.a_n,
        }
    }

    pub fn f(&self, t: f64) -> f64 {
        self.profile().value(t)
    }

    /// Positive root of 1 - t^2 - N t^4 = t^(q+1).
    pub fn b_n(&self, q: f64) -> f64 {
        let nn = self.big_n;
        decreasing_root(|t| 1.0 - t * t - nn * t.powi(4) - t.powf(q + 1.0))
    }

    pub fn body(&self) -> Result<ConvexBody> {
        ConvexBody::profile(self.n, self.profile())
    }
}

/// Body of revolution with profile (1 - t^2 - N t^4)^(1/(n+p-1)).
pub fn make_counterexample_body(n: usize, p: f64, big_n: f64) -> Result<ConvexBody> {
    let body = CounterexampleFamily::new(n, p, big_n)?.body()?;
    match body.check_convexity(2001) {
        Convexity::Pass => Ok(body),
        Convexity::Fail { location, defect } => Err(Error::Pipeline(format!(
            "counterexample profile failed the convexity certificate at t = {location} (defect {defect:e})"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_examples() {
        let b = ConvexBody::ball(3, 2.0).unwrap();
        assert_eq!(b.radial(&[0.6, 0.0, 0.8]).unwrap(), 2.0);
        let u = ConvexBody::ball(3, 1.0).unwrap();
        assert!((u.minkowski_norm(&[0.0, 3.0, 0.0]).unwrap() - 3.0).abs() < 1e-15);
        assert!((u.volume(1e-10).unwrap() - 4.0 * PI / 3.0).abs() < 1e-12);
        let c = 1.7f64;
        let b4 = ConvexBody::ball(4, c).unwrap();
        assert!((b4.volume(1e-10).unwrap() - c.powi(4) * PI * PI / 2.0).abs() < 1e-10);
        assert!(b.check_convexity(100).passed());
        assert_eq!(b.support_meridian(0.3), 2.0);
    }

    #[test]
    fn a_n_examples() {
        let fam = CounterexampleFamily::new(5, -0.5, 1.0).unwrap();
        let exact = ((5f64.sqrt() - 1.0) / 2.0).sqrt();
        assert!((fam.a_n - exact).abs() < 1e-14);
        assert!((fam.a_n - 0.78615).abs() < 1e-5);
        let r = 1.0 - fam.a_n.powi(2) - fam.a_n.powi(4);
        assert!(r.abs() < 1e-12);
        assert_eq!(fam.f(0.0), 1.0);
        let tiny = CounterexampleFamily::new(5, -0.5, 1e-12).unwrap();
        assert!((tiny.a_n - 1.0).abs() < 1e-9);
        assert!((tiny.f(0.5) - 0.75f64.powf(2.0 / 7.0)).abs() < 1e-9);
    }

    #[test]
    fn axis_radius_is_a_n() {
        let fam = CounterexampleFamily::new(5, -0.5, 100.0).unwrap();
        let body = fam.body().unwrap();
        let r = body.radial(&direction(5, 0.0)).unwrap();
        assert!((r - fam.a_n).abs() < 1e-14);
        assert!((body.support_meridian(0.0) - fam.a_n).abs() < 1e-12);
        assert!((body.support_meridian(FRAC_PI_2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn convexity_examples() {
        let body = make_counterexample_body(5, -0.5, 1e6).unwrap();
        assert!(body.check_convexity(2001).passed());
        let bump = Profile {
            coeffs: vec![1.0, 1.0],
            gamma: 1.0,
            scale: 1.0,
            half_width: 1.0,
        };
        let b = ConvexBody::profile(3, bump).unwrap();
        assert!(!b.check_convexity(201).passed());
    }

    #[test]
    fn identity_perturbations() {
        let l = make_counterexample_body(5, -0.5, 10.0).unwrap();
        let g = SphericalFunction::from_coeffs(5, vec![1.0, 0.0, 0.5]).unwrap();
        let k0 = perturb_body(&l, &g, 0.0).unwrap();
        let zero = SphericalFunction::constant(5, 0.0).unwrap();
        let kz = perturb_body(&l, &zero, 0.3).unwrap();
        for i in 0..50 {
            let phi = i as f64 * 0.07;
            let r = l.radial_at(phi);
            assert!((k0.radial_at(phi) - r).abs() <= 1e-15 * 4.0);
            assert!((kz.radial_at(phi) - r).abs() <= 1e-15 * 4.0);
        }
        let neg = SphericalFunction::constant(5, -1.0).unwrap();
        let err = perturb_body(&l, &neg, 10.0).unwrap_err();
        assert!(err.to_string().contains("polar angle"));
    }

    #[test]
    fn tabulated_matches_smooth_body() {
        let angles: Vec<f64> = (0..=90).map(|i| FRAC_PI_2 * i as f64 / 90.0).collect();
        let rho: Vec<f64> = angles.iter().map(|a| 1.0 + 0.1 * (2.0 * a).cos()).collect();
        let t = ConvexBody::tabulated(3, angles, rho).unwrap();
        for phi in [0.0f64, 0.33, 1.2, 2.0, -0.7] {
            let exact = 1.0 + 0.1 * (2.0 * phi).cos();
            assert!((t.radial_at(phi) - exact).abs() < 1e-6);
        }
        assert!(t.check_convexity(720).passed());
    }

    #[test]
    fn direction_validation() {
        let b = ConvexBody::ball(3, 1.0).unwrap();
        assert!(b.radial(&[1.0, 1.0, 0.0]).is_err());
        assert!(b.minkowski_norm(&[0.0, 0.0, 0.0]).is_err());
    }
}
