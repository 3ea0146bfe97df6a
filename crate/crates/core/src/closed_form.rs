//! Exact formulas: j, the hyperbolic metrics of the ball and half-space, the
//! chordal metric, radial quasihyperbolic distances, modulus bounds and inversion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DomainOracle, Point};
use crate::vecmath::{dist, dot, norm, sub};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub value: f64,
    pub method: Method,
    pub error_bound: f64,
}

impl MetricResult {
    pub fn exact(value: f64) -> Self {
        MetricResult {
            value,
            method: Method::ClosedForm,
            error_bound: 0.0,
        }
    }
}

/// `arsinh(z)` through `log1p`, accurate near 0.
pub fn arsinh(z: f64) -> f64 {
    let a = z.abs();
    let v = (a + a * a / (1.0 + (1.0 + a * a).sqrt())).ln_1p();
    v.copysign(z)
}

/// `artanh(z)` for |z| < 1 through `log1p`.
pub fn artanh(z: f64) -> f64 {
    0.5 * (2.0 * z / (1.0 - z)).ln_1p()
}

/// `log(1 + d / min(dx, dy))`.
#[inline]
pub fn j_formula(d: f64, dx: f64, dy: f64) -> f64 {
    if d == 0.0 {
        0.0
    } else {
        (d / dx.min(dy)).ln_1p()
    }
}

/// j on raw coordinates; both points assumed interior.
#[inline]
pub fn j_at(oracle: &DomainOracle, x: &[f64], y: &[f64]) -> f64 {
    j_formula(dist(x, y), oracle.delta_at(x), oracle.delta_at(y))
}

/// The distance ratio metric `j_G(x, y) = log(1 + |x-y| / min(δ(x), δ(y)))`.
pub fn j_metric(oracle: &DomainOracle, x: &Point, y: &Point) -> Result<MetricResult> {
    let dx = oracle.interior_delta(x)?;
    let dy = oracle.interior_delta(y)?;
    Ok(MetricResult::exact(j_formula(x.distance(y), dx, dy)))
}

fn same_dim(x: &Point, y: &Point) -> Result<()> {
    if x.dim() != y.dim() {
        Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        })
    } else {
        Ok(())
    }
}

/// `1 - |x|²` computed as `(1 - |x|)(1 + |x|)`.
fn one_minus_sq(x: &[f64]) -> f64 {
    let r = norm(x);
    (1.0 - r) * (1.0 + r)
}

/// `ρ_B(x, y) = 2 arsinh(|x-y| / t)`, `t = sqrt((1-|x|²)(1-|y|²))`, raw coordinates in the unit ball.
pub fn rho_ball_at(x: &[f64], y: &[f64]) -> f64 {
    let d = dist(x, y);
    if d == 0.0 {
        return 0.0;
    }
    let t = (one_minus_sq(x) * one_minus_sq(y)).sqrt();
    2.0 * arsinh(d / t)
}

/// The product `t = sqrt((1-|x|²)(1-|y|²))` appearing in the ball formula.
pub fn rho_t(x: &[f64], y: &[f64]) -> f64 {
    (one_minus_sq(x) * one_minus_sq(y)).sqrt()
}

fn in_unit_ball(x: &Point) -> Result<()> {
    if x.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::PointOutsideDomain(format!(
            "{:?} is not in the unit ball",
            x.coords()
        )))
    }
}

/// Hyperbolic distance of the unit ball.
pub fn rho_ball(x: &Point, y: &Point) -> Result<MetricResult> {
    same_dim(x, y)?;
    in_unit_ball(x)?;
    in_unit_ball(y)?;
    Ok(MetricResult::exact(rho_ball_at(x.coords(), y.coords())))
}

/// `k_H = ρ_H` with `cosh ρ = 1 + |x-y|² / (2 xₙ yₙ)`, i.e. `ρ = 2 arsinh(|x-y| / (2 sqrt(xₙ yₙ)))`.
pub fn k_halfspace_at(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let d = dist(x, y);
    if d == 0.0 {
        return 0.0;
    }
    2.0 * arsinh(d / (2.0 * (x[n - 1] * y[n - 1]).sqrt()))
}

pub fn k_halfspace(x: &Point, y: &Point) -> Result<MetricResult> {
    same_dim(x, y)?;
    let n = x.dim();
    for p in [x, y] {
        if p.coords()[n - 1] <= 0.0 {
            return Err(Error::PointOutsideDomain(format!(
                "{:?} is not in the upper half-space",
                p.coords()
            )));
        }
    }
    Ok(MetricResult::exact(k_halfspace_at(x.coords(), y.coords())))
}

/// `q(x, y) = |x-y| / (sqrt(1+|x|²) sqrt(1+|y|²))`.
pub fn chordal_at(x: &[f64], y: &[f64]) -> f64 {
    dist(x, y) / ((1.0 + dot(x, x)).sqrt() * (1.0 + dot(y, y)).sqrt())
}

pub fn chordal(x: &Point, y: &Point) -> Result<MetricResult> {
    same_dim(x, y)?;
    Ok(MetricResult::exact(chordal_at(x.coords(), y.coords())))
}

/// `q(x, ∞) = 1 / sqrt(1+|x|²)`.
pub fn chordal_to_infinity(x: &Point) -> MetricResult {
    MetricResult::exact(1.0 / (1.0 + dot(x.coords(), x.coords())).sqrt())
}

/// Relative tolerance for collinearity tests.
pub const COLLINEAR_TOL: f64 = 1e-9;

/// `sqrt(|x|²|y|² - (x·y)²)` via the Lagrange identity, as a sum of squared
/// 2×2 minors, so nearly parallel vectors do not cancel.
fn cross_norm(x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let m = x[i] * y[j] - x[j] * y[i];
            s += m * m;
        }
    }
    s.sqrt()
}

/// Quasihyperbolic distance in the unit ball for `x`, `y`, `0` collinear.
///
/// Both on one radius: `|log((1-|x|)/(1-|y|))|`. Origin between them:
/// `log(1/((1-|x|)(1-|y|)))`.
pub fn k_radial_at(x: &[f64], y: &[f64]) -> Option<f64> {
    let (r, s) = (norm(x), norm(y));
    if r >= 1.0 || s >= 1.0 {
        return None;
    }
    let c = dot(x, y);
    if cross_norm(x, y) > COLLINEAR_TOL * r * s {
        return None;
    }
    let (lr, ls) = ((-r).ln_1p(), (-s).ln_1p());
    Some(if c >= 0.0 { (lr - ls).abs() } else { -lr - ls })
}

pub fn k_radial_ball(x: &Point, y: &Point) -> Result<MetricResult> {
    same_dim(x, y)?;
    in_unit_ball(x)?;
    in_unit_ball(y)?;
    k_radial_at(x.coords(), y.coords())
        .map(MetricResult::exact)
        .ok_or(Error::NotRadialConfiguration)
}

/// True when `u` lies on a segment from `z0` to a nearest boundary point of `z0`,
/// i.e. `δ(u) = δ(z0) - |u - z0|`.
pub fn on_nearest_segment(oracle: &DomainOracle, z0: &[f64], u: &[f64]) -> bool {
    let d0 = oracle.delta_at(z0);
    let du = oracle.delta_at(u);
    du > 0.0 && (du - (d0 - dist(u, z0))).abs() <= COLLINEAR_TOL * d0.max(1.0)
}

/// `k_G(u, v) = |log(δ(u)/δ(v))|` for `u`, `v` on one nearest-boundary segment from `z0`.
pub fn k_segment_to_boundary(
    oracle: &DomainOracle,
    z0: &Point,
    u: &Point,
    v: &Point,
) -> Result<MetricResult> {
    oracle.interior_delta(z0)?;
    let du = oracle.interior_delta(u)?;
    let dv = oracle.interior_delta(v)?;
    let (z, a, b) = (z0.coords(), u.coords(), v.coords());
    if !on_nearest_segment(oracle, z, a) || !on_nearest_segment(oracle, z, b) {
        return Err(Error::NotOnNearestBoundarySegment);
    }
    let (p, q) = (sub(a, z), sub(b, z));
    let (np, nq) = (norm(&p), norm(&q));
    if np > 0.0 && nq > 0.0 && (dot(&p, &q) < 0.0 || cross_norm(&p, &q) > COLLINEAR_TOL * np * nq) {
        return Err(Error::NotOnNearestBoundarySegment);
    }
    Ok(MetricResult::exact((du / dv).ln().abs()))
}

/// `h(x) = a + r² (x - a) / |x - a|²`.
pub fn inversion_at(a: &[f64], r: f64, x: &[f64]) -> Option<Vec<f64>> {
    let d = sub(x, a);
    let d2 = dot(&d, &d);
    if d2 == 0.0 {
        return None;
    }
    let s = r * r / d2;
    Some(a.iter().zip(&d).map(|(ai, di)| ai + s * di).collect())
}

pub fn inversion_map(a: &Point, r: f64, x: &Point) -> Result<Point> {
    same_dim(a, x)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::OutOfRange("inversion radius must be positive".into()));
    }
    let h = inversion_at(a.coords(), r, x.coords()).ok_or(Error::CenterSingularity)?;
    Point::new(h)
}

/// `r² |x-y| / (|x-a| |y-a|)`, the distance between the images under inversion.
pub fn inversion_distance(a: &[f64], r: f64, x: &[f64], y: &[f64]) -> f64 {
    r * r * dist(x, y) / (dist(x, a) * dist(y, a))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusKind {
    /// `2r(1 - exp(-t/2))`: Euclidean distance bound from k in a ball of radius r.
    EuclidFromK,
    /// `2r tanh(t/2)`: Euclidean distance bound from j.
    EuclidFromJ,
    /// `t / (1 + (t/2)²)` for `0 <= t < 2`: chordal distance bound from Euclidean distance.
    ChordalFromEuclid,
}

pub fn modulus_bounds(kind: ModulusKind, t: f64, r: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::OutOfRange(format!("t = {t} must be finite and >= 0")));
    }
    match kind {
        ModulusKind::EuclidFromK | ModulusKind::EuclidFromJ if !(r > 0.0 && r.is_finite()) => {
            Err(Error::OutOfRange(format!("r = {r} must be positive")))
        }
        ModulusKind::EuclidFromK => Ok(-2.0 * r * (-t / 2.0).exp_m1()),
        ModulusKind::EuclidFromJ => Ok(2.0 * r * (t / 2.0).tanh()),
        ModulusKind::ChordalFromEuclid => {
            if t >= 2.0 {
                Err(Error::OutOfRange(format!("chordal bound needs t < 2, got {t}")))
            } else {
                Ok(t / (1.0 + (t / 2.0) * (t / 2.0)))
            }
        }
    }
}
