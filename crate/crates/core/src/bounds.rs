//! Constants, moduli of φ-uniformity, and a catalog of inequalities checked by sampling.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{
    artanh, chordal_at, inversion_at, j_formula, k_halfspace_at, k_radial_at, rho_ball_at,
    rho_t,
};
use crate::error::{Error, Result};
use crate::geometry::{make_domain, DomainOracle, DomainSpec, Point};
use crate::qh_solver::{k_estimate, MethodChoice, SolverOptions};
use crate::rng::{in_ball, on_sphere, uniform, uniform_in, Stream};
use crate::vecmath::{dist, norm, scale, sub};

fn unit_interval(what: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(Error::OutOfRange(format!("{what} = {v} must lie in (0, 1)")))
    }
}

/// `a(θ) = 1 + 2/θ + π / (2 log((2+2θ)/(2+θ)))`, the puncture constant.
pub fn a_theta(theta: f64) -> Result<f64> {
    let t = unit_interval("theta", theta)?;
    Ok(1.0 + 2.0 / t + PI / (2.0 * (t / (2.0 + t)).ln_1p()))
}

/// `a(α,θ) = (2+θ+αθ)/(θ(1-α²)) + (1+α)π / (2(1-α) log((2+2θ)/(2+θ+αθ)))`,
/// the constant for removing a closed ball of radius `αθδ(z)`.
pub fn a_alpha_theta(alpha: f64, theta: f64) -> Result<f64> {
    let a = unit_interval("alpha", alpha)?;
    let t = unit_interval("theta", theta)?;
    let d = 2.0 + t + a * t;
    let first = d / (t * (1.0 - a) * (1.0 + a));
    let second = (1.0 + a) * PI / (2.0 * (1.0 - a) * ((t - a * t) / d).ln_1p());
    Ok(first + second)
}

/// Radius `sqrt(n/(2n+2)) diam` of a ball containing any set of the given diameter.
pub fn jung_radius(n: usize, diam: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("dimension {n} < 2")));
    }
    if !(diam > 0.0 && diam.is_finite()) {
        return Err(Error::OutOfRange(format!("diameter {diam} must be positive")));
    }
    let n = n as f64;
    Ok((n / (2.0 * n + 2.0)).sqrt() * diam)
}

/// An increasing function `[0, ∞) → [0, ∞)` vanishing at 0, as an expression tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Modulus {
    /// `slope · t`
    Linear { slope: f64 },
    /// `coef · log(1 + t)`
    LogOnePlus { coef: f64 },
    /// `factor · inner(arg_factor · t)`
    Scale {
        factor: f64,
        arg_factor: f64,
        inner: Box<Modulus>,
    },
    /// Pointwise maximum.
    Max { terms: Vec<Modulus> },
}

impl Modulus {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Modulus::Linear { slope } => slope * t,
            Modulus::LogOnePlus { coef } => coef * t.ln_1p(),
            Modulus::Scale {
                factor,
                arg_factor,
                inner,
            } => factor * inner.eval(arg_factor * t),
            Modulus::Max { terms } => terms.iter().map(|m| m.eval(t)).fold(0.0, f64::max),
        }
    }

    pub fn scaled(self, factor: f64, arg_factor: f64) -> Modulus {
        Modulus::Scale {
            factor,
            arg_factor,
            inner: Box::new(self),
        }
    }

    /// Structural check that the expression is strictly increasing with value 0 at 0.
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::OutOfRange(format!("{what} = {v} must be positive")))
            }
        };
        match self {
            Modulus::Linear { slope } => pos(*slope, "slope"),
            Modulus::LogOnePlus { coef } => pos(*coef, "coef"),
            Modulus::Scale {
                factor,
                arg_factor,
                inner,
            } => {
                pos(*factor, "factor")?;
                pos(*arg_factor, "arg_factor")?;
                inner.validate()
            }
            Modulus::Max { terms } => {
                if terms.is_empty() {
                    return Err(Error::OutOfRange("max of no terms".into()));
                }
                terms.iter().try_for_each(|m| m.validate())
            }
        }
    }
}

/// `(π / log 3) log(1 + t)`, the modulus of a punctured space.
pub fn phi_punctured_space() -> Modulus {
    Modulus::LogOnePlus { coef: PI / 3f64.ln() }
}

/// Ways of producing a new modulus from old ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transfer {
    /// Image under an `L`-bilipschitz map: `L² φ(L² t)`.
    Bilipschitz { l: f64, phi: Modulus },
    /// Image under inversion of a domain in `{m < |z - z0| < M}`: `(M/m)² φ(M² t / m²)`.
    Inversion { m: f64, big_m: f64, phi: Modulus },
    /// One point removed: `2 max{φ₂(3t), a(θ/2) φ₁(3t)}` with `φ₂` the punctured-space modulus.
    Puncture { theta: f64, phi1: Modulus },
    /// `m` points removed: `2^m a(θ/2)^(m-1) max{π log(1+3t)/log 3, a(θ/2) φ₀(3t)}`.
    MultiPoint { m: u32, theta: f64, phi0: Modulus },
    /// Uniformity constant after removing `m` points from a `c`-uniform domain,
    /// `6^m a(θ/2)^m c`, returned as the modulus `c' log(1 + t)`.
    UniformRemoval { m: u32, theta: f64, c: f64 },
    /// A small closed set removed: `4 a(1/4, θ/3) max{φ₁(30t), φ₂(30t)}`.
    RemoveSet { theta: f64, phi1: Modulus, phi2: Modulus },
}

/// `6^m a(θ/2)^m c`.
pub fn uniform_removal_constant(m: u32, theta: f64, c: f64) -> Result<f64> {
    if m < 1 {
        return Err(Error::OutOfRange("m must be >= 1".into()));
    }
    if !(c >= 1.0 && c.is_finite()) {
        return Err(Error::OutOfRange(format!("c = {c} must be >= 1")));
    }
    let a = a_theta(theta / 2.0)?;
    Ok(6f64.powi(m as i32) * a.powi(m as i32) * c)
}

/// The modulus produced by a transfer, validated.
pub fn phi_transfer(kind: &Transfer) -> Result<Modulus> {
    let out = match kind {
        Transfer::Bilipschitz { l, phi } => {
            if !(*l >= 1.0 && l.is_finite()) {
                return Err(Error::OutOfRange(format!("L = {l} must be >= 1")));
            }
            phi.validate()?;
            phi.clone().scaled(l * l, l * l)
        }
        Transfer::Inversion { m, big_m, phi } => {
            if !(*m > 0.0 && m < big_m && big_m.is_finite()) {
                return Err(Error::OutOfRange(format!("need 0 < m < M, got m = {m}, M = {big_m}")));
            }
            phi.validate()?;
            let r = big_m / m;
            phi.clone().scaled(r * r, r * r)
        }
        Transfer::Puncture { theta, phi1 } => {
            phi1.validate()?;
            let a = a_theta(theta / 2.0)?;
            Modulus::Max {
                terms: vec![
                    phi_punctured_space().scaled(2.0, 3.0),
                    phi1.clone().scaled(2.0 * a, 3.0),
                ],
            }
        }
        Transfer::MultiPoint { m, theta, phi0 } => {
            if *m < 1 {
                return Err(Error::OutOfRange("m must be >= 1".into()));
            }
            phi0.validate()?;
            let a = a_theta(theta / 2.0)?;
            let front = 2f64.powi(*m as i32) * a.powi(*m as i32 - 1);
            Modulus::Max {
                terms: vec![
                    phi_punctured_space().scaled(front, 3.0),
                    phi0.clone().scaled(front * a, 3.0),
                ],
            }
        }
        Transfer::UniformRemoval { m, theta, c } => Modulus::LogOnePlus {
            coef: uniform_removal_constant(*m, *theta, *c)?,
        },
        Transfer::RemoveSet { theta, phi1, phi2 } => {
            phi1.validate()?;
            phi2.validate()?;
            let a = a_alpha_theta(0.25, unit_interval("theta", *theta)? / 3.0)?;
            Modulus::Max {
                terms: vec![
                    phi1.clone().scaled(4.0 * a, 30.0),
                    phi2.clone().scaled(4.0 * a, 30.0),
                ],
            }
        }
    };
    out.validate()?;
    Ok(out)
}

/// Which metric evaluations a check may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Exact formulas only.
    ClosedOnly,
    /// Exact formulas plus the numeric k̂.
    WithNumeric,
}

/// A sampled configuration: two points plus optional auxiliary data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub w: Vec<f64>,
    /// Scalars used by some entries (e.g. `a`, `t`, the inversion radius).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<f64>,
}

impl Config {
    fn pair(x: Vec<f64>, y: Vec<f64>) -> Self {
        Config {
            x,
            y,
            w: Vec::new(),
            extra: Vec::new(),
        }
    }
}

/// One inequality `lhs <= rhs` of an assertion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ineq {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    /// True when one side is the numeric k̂; the slack is then `tol`.
    pub numeric: bool,
}

fn le(label: &str, lhs: f64, rhs: f64) -> Ineq {
    Ineq {
        label: label.to_string(),
        lhs,
        rhs,
        numeric: false,
    }
}

/// `a == b` as two inequalities.
fn eq(label: &str, a: f64, b: f64) -> [Ineq; 2] {
    [le(label, a, b), le(label, b, a)]
}

fn le_num(label: &str, lhs: f64, rhs: f64) -> Ineq {
    Ineq {
        numeric: true,
        ..le(label, lhs, rhs)
    }
}

pub type Params = BTreeMap<String, f64>;

/// Evaluation context for one check.
pub struct Ctx<'a> {
    pub backend: Backend,
    pub tol: f64,
    pub params: &'a Params,
    pub domains: &'a [DomainOracle],
}

impl Ctx<'_> {
    fn p(&self, key: &str) -> f64 {
        self.params[key]
    }

    fn dim(&self) -> usize {
        self.params.get("n").map_or(2, |v| *v as usize)
    }

    fn numeric(&self) -> bool {
        self.backend == Backend::WithNumeric
    }

    /// k̂ on domain `i`; a non-converged estimate is still an upper bound and is used as is.
    fn k(&self, i: usize, x: &[f64], y: &[f64]) -> Result<f64> {
        let opts = SolverOptions {
            method: MethodChoice::Auto,
            ..SolverOptions::default()
        };
        let (x, y) = (Point::new(x.to_vec())?, Point::new(y.to_vec())?);
        match k_estimate(&self.domains[i], &x, &y, self.tol, &opts) {
            Ok(e) => Ok(e.value),
            Err(Error::BudgetExceeded(e)) if e.value.is_finite() => Ok(e.value),
            Err(e) => Err(e),
        }
    }

    fn delta(&self, i: usize, x: &[f64]) -> f64 {
        self.domains[i].delta_at(x)
    }
}

type Sampler = fn(&mut Stream, &Ctx) -> Config;
/// `Ok(None)` when the hypothesis fails.
type Assertion = fn(&Config, &Ctx) -> Result<Option<Vec<Ineq>>>;
type Witness = fn(&Ctx) -> Config;

/// A machine-checkable inequality.
#[derive(Clone)]
pub struct BoundSpec {
    pub name: &'static str,
    /// The inequality in symbols, with its hypothesis.
    pub statement: &'static str,
    /// Backend the assertion needs.
    pub backend: Backend,
    /// How sampled configurations are drawn.
    pub sampling: &'static str,
    pub params: Params,
    /// Domains the entry evaluates on, built from `params`.
    pub domains: fn(&Params) -> Vec<DomainSpec>,
    sampler: Sampler,
    assertion: Assertion,
    /// Configuration with claimed equality, and the index of the inequality that is tight.
    witness: Option<(Witness, usize)>,
}

impl std::fmt::Debug for BoundSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundSpec")
            .field("name", &self.name)
            .field("backend", &self.backend)
            .field("params", &self.params)
            .finish()
    }
}

impl BoundSpec {
    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn has_witness(&self) -> bool {
        self.witness.is_some()
    }

    fn build_domains(&self) -> Result<Vec<DomainOracle>> {
        (self.domains)(&self.params).iter().map(make_domain).collect()
    }

    /// Draw one configuration and evaluate the assertion on it.
    pub fn evaluate(&self, cfg: &Config, backend: Backend, tol: f64) -> Result<Option<Vec<Ineq>>> {
        let domains = self.build_domains()?;
        let ctx = Ctx {
            backend,
            tol,
            params: &self.params,
            domains: &domains,
        };
        (self.assertion)(cfg, &ctx)
    }

    /// `|lhs - rhs|` of the tight inequality at the witness configuration.
    pub fn sharpness_defect(&self) -> Result<Option<f64>> {
        let Some((w, idx)) = self.witness else {
            return Ok(None);
        };
        let domains = self.build_domains()?;
        let ctx = Ctx {
            backend: Backend::ClosedOnly,
            tol: 1e-12,
            params: &self.params,
            domains: &domains,
        };
        let cfg = w(&ctx);
        let ineqs = (self.assertion)(&cfg, &ctx)?
            .ok_or_else(|| Error::InvalidSpec(format!("{}: witness violates the hypothesis", self.name)))?;
        let q = ineqs
            .get(idx)
            .ok_or_else(|| Error::InvalidSpec(format!("{}: witness index out of range", self.name)))?;
        Ok(Some((q.lhs - q.rhs).abs()))
    }
}

/// Relative margin for closed-form comparisons.
pub const CLOSED_MARGIN: f64 = 1e-12;
/// Violations stored per report; the count is always exact.
pub const MAX_STORED_VIOLATIONS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: u64,
    pub label: String,
    pub config: Config,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs - slack`, positive for a violation.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub name: String,
    pub citation: String,
    pub backend: Backend,
    pub params: Params,
    pub seed: u64,
    pub tol: f64,
    pub samples: u64,
    pub hits: u64,
    /// Inequalities evaluated over all hits.
    pub checks: u64,
    pub violation_count: u64,
    /// The first violations by sample index.
    pub violations: Vec<Violation>,
    /// Largest `lhs - rhs` seen (negative when every check had room to spare).
    pub worst_gap: f64,
    pub max_sharpness_defect: Option<f64>,
    /// Sample indices skipped because the numeric solver failed.
    pub solver_failures: u64,
}

impl ViolationReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0 && self.solver_failures == 0
    }
}

fn slack(q: &Ineq, tol: f64) -> f64 {
    if q.numeric {
        tol
    } else {
        CLOSED_MARGIN * 1f64.max(q.lhs.abs()).max(q.rhs.abs())
    }
}

struct Partial {
    hits: u64,
    checks: u64,
    count: u64,
    failures: u64,
    worst: f64,
    stored: Vec<Violation>,
}

impl Partial {
    fn empty() -> Self {
        Partial {
            hits: 0,
            checks: 0,
            count: 0,
            failures: 0,
            worst: f64::NEG_INFINITY,
            stored: Vec::new(),
        }
    }

    fn merge(mut self, o: Partial) -> Partial {
        self.hits += o.hits;
        self.checks += o.checks;
        self.count += o.count;
        self.failures += o.failures;
        self.worst = self.worst.max(o.worst);
        self.stored.extend(o.stored);
        self.stored.sort_by_key(|v| v.index);
        self.stored.truncate(MAX_STORED_VIOLATIONS);
        self
    }
}

/// Sample `samples` configurations from stream `(seed, i)`, filter by the
/// hypothesis and evaluate the assertion.
///
/// Closed-form inequalities fail when `lhs > rhs + 1e-12 max(1, |lhs|, |rhs|)`.
/// Inequalities involving k̂ fail when `lhs > rhs + tol`: for an upper bound on k
/// that is the `+tol` slack on k̂, and for a lower bound `B <= k` it fails only when
/// `k̂ + tol < B`, which certifies `k < B` up to the solver tolerance.
pub fn check_bound(spec: &BoundSpec, samples: u64, seed: u64, backend: Backend, tol: f64) -> Result<ViolationReport> {
    if samples == 0 {
        return Err(Error::Usage("samples must be positive".into()));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Usage(format!("tol must be positive, got {tol}")));
    }
    if spec.backend == Backend::WithNumeric && backend == Backend::ClosedOnly {
        return Err(Error::NoClosedForm);
    }
    let domains = spec.build_domains()?;
    let ctx = Ctx {
        backend,
        tol,
        params: &spec.params,
        domains: &domains,
    };
    let total = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut s = Stream::new(seed, i);
            let cfg = (spec.sampler)(&mut s, &ctx);
            let mut p = Partial::empty();
            match (spec.assertion)(&cfg, &ctx) {
                Ok(None) => {}
                Ok(Some(ineqs)) => {
                    p.hits = 1;
                    for q in ineqs {
                        p.checks += 1;
                        let gap = q.lhs - q.rhs;
                        p.worst = p.worst.max(gap);
                        let m = gap - slack(&q, tol);
                        if m > 0.0 || !gap.is_finite() {
                            p.count += 1;
                            if p.stored.len() < MAX_STORED_VIOLATIONS {
                                p.stored.push(Violation {
                                    index: i,
                                    label: q.label.clone(),
                                    config: cfg.clone(),
                                    lhs: q.lhs,
                                    rhs: q.rhs,
                                    margin: m,
                                });
                            }
                        }
                    }
                }
                Err(_) => p.failures = 1,
            }
            p
        })
        .reduce(Partial::empty, Partial::merge);
    if total.hits == 0 {
        return Err(Error::NoHypothesisHits(spec.name.to_string()));
    }
    Ok(ViolationReport {
        name: spec.name.to_string(),
        citation: spec.statement.to_string(),
        backend,
        params: spec.params.clone(),
        seed,
        tol,
        samples,
        hits: total.hits,
        checks: total.checks,
        violation_count: total.count,
        violations: total.stored,
        worst_gap: total.worst,
        max_sharpness_defect: spec.sharpness_defect()?,
        solver_failures: total.failures,
    })
}

// ---- samplers ------------------------------------------------------------

fn ball_pair(s: &mut Stream, n: usize, r: f64) -> Config {
    Config::pair(in_ball(s, n, r), in_ball(s, n, r))
}

/// Two points of one diameter of the unit ball.
fn diameter_pair(s: &mut Stream, n: usize) -> Config {
    let b = on_sphere(s, n);
    let (r, t) = (uniform_in(s, -1.0, 1.0), uniform_in(s, -1.0, 1.0));
    Config::pair(scale(&b, r), scale(&b, t))
}

/// Points with log-uniform height in the upper half-space.
fn halfspace_point(s: &mut Stream, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n - 1).map(|_| uniform_in(s, -2.0, 2.0)).collect();
    v.push(uniform_in(s, -6.0, 1.0).exp());
    v
}

/// Points of Rⁿ spread over several scales.
fn multiscale_point(s: &mut Stream, n: usize) -> Vec<f64> {
    let r = uniform_in(s, -2.0, 2.0).exp();
    in_ball(s, n, r)
}

fn unit_ball_domain(p: &Params) -> Vec<DomainSpec> {
    vec![DomainSpec::unit_ball(p.get("n").map_or(2, |v| *v as usize))]
}

fn no_domain(_: &Params) -> Vec<DomainSpec> {
    Vec::new()
}

fn params(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn j_ball(x: &[f64], y: &[f64]) -> f64 {
    j_formula(dist(x, y), 1.0 - norm(x), 1.0 - norm(y))
}

fn antipodal_witness(ctx: &Ctx) -> Config {
    let n = ctx.dim();
    let mut x = vec![0.0; n];
    x[0] = 0.6;
    x[1] = -0.3;
    let y = scale(&x, -1.0);
    Config::pair(x, y)
}

/// Radial k in the unit ball when `0, x, y` are collinear.
fn k_ball_closed(x: &[f64], y: &[f64]) -> Option<f64> {
    k_radial_at(x, y)
}

// ---- catalog ---------------------------------------------------------------

/// Every catalog entry with default parameters.
pub fn catalog() -> Vec<BoundSpec> {
    vec![
        BoundSpec {
            name: "j_le_k_halfspace",
            statement: "k_G(x,y) >= log(1 + L/min(δ(x),δ(y))) >= j_G(x,y), L the infimal Euclidean path length; G = Hⁿ where L = |x-y| and k = ρ_H",
            backend: Backend::ClosedOnly,
            sampling: "coordinates uniform in [-2,2], height log-uniform in [e^-6, e]",
            params: params(&[("n", 2.0)]),
            domains: no_domain,
            sampler: |s, c| {
                let n = c.dim();
                Config::pair(halfspace_point(s, n), halfspace_point(s, n))
            },
            assertion: |c, _| {
                let n = c.x.len();
                let (dx, dy) = (c.x[n - 1], c.y[n - 1]);
                let l = dist(&c.x, &c.y);
                let mid = (l / dx.min(dy)).ln_1p();
                Ok(Some(vec![
                    le("log(1+L/min δ) <= k", mid, k_halfspace_at(&c.x, &c.y)),
                    le("j <= log(1+L/min δ)", j_formula(l, dx, dy), mid),
                ]))
            },
            witness: None,
        },
        BoundSpec {
            name: "j_le_k_radial",
            statement: "j_B(x,y) <= k_B(x,y) for x, y on a diameter of the unit ball",
            backend: Backend::ClosedOnly,
            sampling: "common direction uniform on the sphere, signed radii uniform in (-1,1)",
            params: params(&[("n", 2.0)]),
            domains: no_domain,
            sampler: |s, c| diameter_pair(s, c.dim()),
            assertion: |c, _| {
                let Some(k) = k_ball_closed(&c.x, &c.y) else { return Ok(None) };
                Ok(Some(vec![le("j <= k", j_ball(&c.x, &c.y), k)]))
            },
            witness: None,
        },
        BoundSpec {
            name: "radial_k_equals_j",
            statement: "k_B(br,bs) = j_B(br,bs) = log((1-r)/(1-s)) for |b| = 1, 0 <= r < s < 1; r = 0 gives log(1/(1-s))",
            backend: Backend::ClosedOnly,
            sampling: "b uniform on the sphere, r < s uniform in [0,1), r = 0 for one sample in eight",
            params: params(&[("n", 2.0)]),
            domains: no_domain,
            sampler: |s, c| {
                let b = on_sphere(s, c.dim());
                let (u, v) = (uniform(s), uniform(s));
                let zero = uniform(s) < 0.125;
                let (r, t) = if zero { (0.0, u.max(v)) } else { (u.min(v), u.max(v)) };
                Config {
                    extra: vec![r, t],
                    ..Config::pair(scale(&b, r), scale(&b, t))
                }
            },
            assertion: |c, _| {
                let (r, s) = (c.extra[0], c.extra[1]);
                if r >= s {
                    return Ok(None);
                }
                let Some(k) = k_ball_closed(&c.x, &c.y) else { return Ok(None) };
                let f = (-r).ln_1p() - (-s).ln_1p();
                let j = j_ball(&c.x, &c.y);
                let mut v = Vec::new();
                v.extend(eq("k = log((1-r)/(1-s))", k, f));
                v.extend(eq("j = log((1-r)/(1-s))", j, f));
                Ok(Some(v))
            },
            witness: None,
        },
        BoundSpec {
            name: "nearest_segment",
            statement: "k_G(u,v) = j_G(u,v) = |log((δ(z0)-|z0-u|)/(δ(z0)-|z0-v|))| = |log(δ(u)/δ(v))| for u, v on a segment from z0 to a nearest boundary point; G the unit cube",
            backend: Backend::ClosedOnly,
            sampling: "z0 uniform in the cube, u and v at uniform fractions of the segment to the nearest face",
            params: params(&[("n", 2.0)]),
            domains: |p| {
                let n = p.get("n").map_or(2, |v| *v as usize);
                vec![DomainSpec::rectangle(&vec![0.0; n], &vec![1.0; n])]
            },
            sampler: |s, c| {
                let n = c.dim();
                let z0: Vec<f64> = (0..n).map(|_| uniform(s)).collect();
                // nearest face of [0,1]^n
                let (mut axis, mut side, mut best) = (0, 0.0, f64::INFINITY);
                for (k, &zk) in z0.iter().enumerate() {
                    for (sd, d) in [(0.0, zk), (1.0, 1.0 - zk)] {
                        if d < best {
                            (axis, side, best) = (k, sd, d);
                        }
                    }
                }
                let mut z = z0.clone();
                z[axis] = side;
                let (a, b) = (uniform(s), uniform(s));
                let at = |t: f64| -> Vec<f64> { z0.iter().zip(&z).map(|(p, q)| p + t * (q - p)).collect() };
                Config {
                    w: z0.clone(),
                    ..Config::pair(at(a), at(b))
                }
            },
            assertion: |c, ctx| {
                let (du, dv, d0) = (ctx.delta(0, &c.x), ctx.delta(0, &c.y), ctx.delta(0, &c.w));
                if du <= 0.0 || dv <= 0.0 || c.x == c.y {
                    return Ok(None);
                }
                let f = ((d0 - dist(&c.w, &c.x)) / (d0 - dist(&c.w, &c.y))).ln().abs();
                let g = (du / dv).ln().abs();
                let j = j_formula(dist(&c.x, &c.y), du, dv);
                let mut v = Vec::new();
                v.extend(eq("j = |log(δ(u)/δ(v))|", j, g));
                v.extend(eq("segment form = |log(δ(u)/δ(v))|", f, g));
                Ok(Some(v))
            },
            witness: None,
        },
        BoundSpec {
            name: "rho_j_sandwich",
            statement: "j_B(x,y) <= ρ_B(x,y) <= 2 j_B(x,y) for x, y in the unit ball, equality on the right for y = -x",
            backend: Backend::ClosedOnly,
            sampling: "x, y uniform in the unit ball",
            params: params(&[("n", 2.0)]),
            domains: no_domain,
            sampler: |s, c| ball_pair(s, c.dim(), 1.0),
            assertion: |c, _| {
                let (j, rho) = (j_ball(&c.x, &c.y), rho_ball_at(&c.x, &c.y));
                Ok(Some(vec![le("j <= ρ", j, rho), le("ρ <= 2j", rho, 2.0 * j)]))
            },
            witness: Some((antipodal_witness, 1)),
        },
        BoundSpec {
            name: "rho_k_sandwich_radial",
            statement: "ρ_B(x,y)/2 <= k_B(x,y) <= ρ_B(x,y), checked where k_B has a closed form (x, y on a diameter)",
            backend: Backend::ClosedOnly,
            sampling: "common direction uniform on the sphere, signed radii uniform in (-1,1)",
            params: params(&[("n", 2.0)]),
            domains: no_domain,
            sampler: |s, c| diameter_pair(s, c.dim()),
            assertion: |c, _| {
                let Some(k) = k_ball_closed(&c.x, &c.y) else { return Ok(None) };
                let rho = rho_ball_at(&c.x, &c.y);
                Ok(Some(vec![le("ρ/2 <= k", rho / 2.0, k), le("k <= ρ", k, rho)]))
            },
            witness: None,
        },
        BoundSpec {
            name: "rhoineq",
            statement: "tanh²(ρ_B/2) = |x-y|²/(|x-y|²+t²) and |x-y| <= 2 tanh(ρ_B/4) = 2|x-y|/(sqrt(|x-y|²+t²)+t), t = sqrt((1-|x|²)(1-|y|²)); equality for y = -x",
            backend: Backend::ClosedOnly,
            sampling: "x, y uniform in the unit ball",
            params: params(&[("n", 2.0)]),
            domains: no_domain,
            sampler: |s, c| ball_pair(s, c.dim(), 1.0),
            assertion: |c, _| {
                let d = dist(&c.x, &c.y);
                let rho = rho_ball_at(&c.x, &c.y);
                let t = rho_t(&c.x, &c.y);
                let th = (rho / 4.0).tanh();
                let form = 2.0 * d / ((d * d + t * t).sqrt() + t);
                let mut v = vec![le("|x-y| <= 2 tanh(ρ/4)", d, 2.0 * th)];
                v.extend(eq("2 tanh(ρ/4) = 2|x-y|/(sqrt(|x-y|²+t²)+t)", 2.0 * th, form));
                let h = (rho / 2.0).tanh();
                v.extend(eq("tanh²(ρ/2) = |x-y|²/(|x-y|²+t²)", h * h, d * d / (d * d + t * t)));
                Ok(Some(v))
            },
            witness: Some((antipodal_witness, 0)),
        },
        BoundSpec {
            name: "chordal_remark",
            statement: "|x-y| >= 2q/(1+sqrt(1-q²)) for all x, y; q(x,y) <= |x-y|/(1+(|x-y|/2)²) for |x-y| < 2, equality for y = -x",
            backend: Backend::ClosedOnly,
            sampling: "x, y uniform in a ball of log-uniform radius in [e^-2, e^2]",
            params: params(&[("n", 2.0)]),
            domains: no_domain,
            sampler: |s, c| {
                let n = c.dim();
                let r = uniform_in(s, -2.0, 2.0).exp();
                Config::pair(in_ball(s, n, r), in_ball(s, n, r))
            },
            assertion: |c, _| {
                let d = dist(&c.x, &c.y);
                if d >= 2.0 {
                    return Ok(None);
                }
                let q = chordal_at(&c.x, &c.y);
                let h = d / 2.0;
                Ok(Some(vec![
                    le("q <= |x-y|/(1+(|x-y|/2)²)", q, d / (1.0 + h * h)),
                    le("2q/(1+sqrt(1-q²)) <= |x-y|", 2.0 * q / (1.0 + (1.0 - q * q).max(0.0).sqrt()), d),
                ]))
            },
            witness: Some((antipodal_witness, 0)),
        },
        BoundSpec {
            name: "jung_appl_1",
            statement: "x, y on a diameter of B: k_B(x,y) >= k_B(-w,w) = 2 k_B(0,w) = 2 log(2/(2-|x-y|)) >= |x-y|, w = |x-y| e1/2; equality first for y = -x",
            backend: Backend::ClosedOnly,
            sampling: "common direction uniform on the sphere, signed radii uniform in (-1,1)",
            params: params(&[("n", 2.0)]),
            domains: no_domain,
            sampler: |s, c| diameter_pair(s, c.dim()),
            assertion: |c, ctx| {
                let Some(k) = k_ball_closed(&c.x, &c.y) else { return Ok(None) };
                Ok(Some(jung_chain(k, &c.x, &c.y, ctx.dim())))
            },
            witness: Some((antipodal_witness, 0)),
        },
        BoundSpec {
            name: "jung_appl_2",
            statement: "x, y in B arbitrary: k_B(x,y) >= k_B(-w,w) = 2 k_B(0,w) = 2 log(2/(2-|x-y|)) >= |x-y|, w = |x-y| e1/2; equality first for y = -x",
            backend: Backend::ClosedOnly,
            sampling: "x, y uniform in the unit ball; k_B(x,y) exact on diameters, numeric otherwise (numeric backend only)",
            params: params(&[("n", 2.0)]),
            domains: unit_ball_domain,
            sampler: |s, c| {
                if uniform(s) < 0.5 {
                    diameter_pair(s, c.dim())
                } else {
                    ball_pair(s, c.dim(), 1.0)
                }
            },
            assertion: |c, ctx| {
                let mut v = jung_chain(f64::NAN, &c.x, &c.y, ctx.dim());
                match k_ball_closed(&c.x, &c.y) {
                    Some(k) => v[0] = le("k(-w,w) <= k(x,y)", v[0].lhs, k),
                    None if ctx.numeric() => {
                        let k = ctx.k(0, &c.x, &c.y)?;
                        v[0] = le_num("k(-w,w) <= k(x,y)", v[0].lhs, k);
                    }
                    None => {
                        v.remove(0);
                    }
                }
                Ok(Some(v))
            },
            witness: Some((antipodal_witness, 0)),
        },
        BoundSpec {
            name: "jung_appl_3",
            statement: "G bounded, r = sqrt(n/(2n+2)) diam G: k_G(x,y) >= 2 log(2/(2-t)) >= t, t = |x-y|/r; G = B(0,R), exact on diameters; witness takes r = R and y = -x",
            backend: Backend::ClosedOnly,
            sampling: "x, y on a diameter of B(0,R)",
            params: params(&[("n", 2.0), ("R", 1.0)]),
            domains: no_domain,
            sampler: |s, c| {
                let cfg = diameter_pair(s, c.dim());
                let r = c.p("R");
                Config::pair(scale(&cfg.x, r), scale(&cfg.y, r))
            },
            assertion: |c, ctx| {
                let big_r = ctx.p("R");
                let n = ctx.dim();
                let (u, v) = (scale(&c.x, 1.0 / big_r), scale(&c.y, 1.0 / big_r));
                let Some(k) = k_ball_closed(&u, &v) else { return Ok(None) };
                // extra = [1] marks the witness, which uses the ball radius itself
                let r = if c.extra.first() == Some(&1.0) { big_r } else { jung_radius(n, 2.0 * big_r)? };
                let t = dist(&c.x, &c.y) / r;
                if t == 0.0 {
                    return Ok(None);
                }
                let b = 2.0 * (2.0 / (2.0 - t)).ln();
                Ok(Some(vec![le("2 log(2/(2-t)) <= k", b, k), le("t <= 2 log(2/(2-t))", t, b)]))
            },
            witness: Some((
                |ctx| {
                    let mut c = antipodal_witness(ctx);
                    let r = ctx.p("R");
                    c.x = scale(&c.x, r);
                    c.y = scale(&c.y, r);
                    c.extra = vec![1.0];
                    c
                },
                0,
            )),
        },
        BoundSpec {
            name: "jung_appl2_cor",
            statement: "x, y in B: |x-y| <= 2(1-exp(-k_B/2)) <= k_B, equality first for y = -x; G = B(0,R) with r the Jung radius: |x-y|/r <= 2(1-exp(-k_G/2)) <= k_G",
            backend: Backend::ClosedOnly,
            sampling: "x, y on a diameter of the unit ball (exact k)",
            params: params(&[("n", 2.0)]),
            domains: no_domain,
            sampler: |s, c| diameter_pair(s, c.dim()),
            assertion: |c, ctx| {
                let Some(k) = k_ball_closed(&c.x, &c.y) else { return Ok(None) };
                let d = dist(&c.x, &c.y);
                if d == 0.0 {
                    return Ok(None);
                }
                let e = -2.0 * (-k / 2.0).exp_m1();
                let r = jung_radius(ctx.dim(), 2.0)?;
                Ok(Some(vec![
                    le("|x-y| <= 2(1-exp(-k/2))", d, e),
                    le("2(1-exp(-k/2)) <= k", e, k),
                    le("|x-y|/r <= 2(1-exp(-k/2))", d / r, e),
                ]))
            },
            witness: Some((antipodal_witness, 0)),
        },
        BoundSpec {
            name: "jung_appl_j",
            statement: "x, y in B: j_B(x,y) >= j_B(-w,w) = log((2+t)/(2-t)) = 2 artanh(t/2) >= t, t = |x-y|; G bounded: j_G >= log((2+t)/(2-t)) >= t, t = |x-y|/r, r the Jung radius (G the unit square)",
            backend: Backend::ClosedOnly,
            sampling: "x, y uniform in the unit ball (half the samples on one diameter); u, v uniform in the unit square",
            params: params(&[("n", 2.0)]),
            domains: |_| vec![DomainSpec::unit_square()],
            sampler: |s, c| {
                let mut cfg = if uniform(s) < 0.5 {
                    diameter_pair(s, c.dim())
                } else {
                    ball_pair(s, c.dim(), 1.0)
                };
                cfg.w = vec![uniform(s), uniform(s), uniform(s), uniform(s)];
                cfg
            },
            assertion: |c, ctx| {
                let t = dist(&c.x, &c.y);
                if t == 0.0 {
                    return Ok(None);
                }
                let n = c.x.len();
                let mut w = vec![0.0; n];
                w[0] = t / 2.0;
                let jw = j_ball(&scale(&w, -1.0), &w);
                let f = ((2.0 + t) / (2.0 - t)).ln();
                let mut v = vec![le("j(-w,w) <= j(x,y)", jw, j_ball(&c.x, &c.y))];
                v.extend(eq("j(-w,w) = log((2+t)/(2-t))", jw, f));
                v.extend(eq("log((2+t)/(2-t)) = 2 artanh(t/2)", f, 2.0 * artanh(t / 2.0)));
                v.push(le("t <= log((2+t)/(2-t))", t, f));
                if c.w.len() < 4 {
                    return Ok(Some(v));
                }
                let (p, q) = (&c.w[0..2], &c.w[2..4]);
                let (dp, dq) = (ctx.delta(0, p), ctx.delta(0, q));
                if dp > 0.0 && dq > 0.0 && p != q {
                    let r = jung_radius(2, 2f64.sqrt())?;
                    let tg = dist(p, q) / r;
                    let fg = ((2.0 + tg) / (2.0 - tg)).ln();
                    v.push(le("log((2+t)/(2-t)) <= j_G", fg, j_formula(dist(p, q), dp, dq)));
                    v.push(le("t <= log((2+t)/(2-t)) (G)", tg, fg));
                }
                Ok(Some(v))
            },
            witness: Some((antipodal_witness, 0)),
        },
        BoundSpec {
            name: "jung_appl_j_cor",
            statement: "x, y in B: |x-y| <= 2 tanh(j_B/2) <= j_B, equality first for y = -x; G bounded with Jung radius r: |x-y|/r <= 2 tanh(j_G/2) <= j_G (G the unit square)",
            backend: Backend::ClosedOnly,
            sampling: "x, y uniform in the unit ball; u, v uniform in the unit square",
            params: params(&[("n", 2.0)]),
            domains: |_| vec![DomainSpec::unit_square()],
            sampler: |s, c| {
                let mut cfg = ball_pair(s, c.dim(), 1.0);
                cfg.w = vec![uniform(s), uniform(s), uniform(s), uniform(s)];
                cfg
            },
            assertion: |c, ctx| {
                let d = dist(&c.x, &c.y);
                let j = j_ball(&c.x, &c.y);
                let th = 2.0 * (j / 2.0).tanh();
                let mut v = vec![le("|x-y| <= 2 tanh(j/2)", d, th), le("2 tanh(j/2) <= j", th, j)];
                if c.w.len() < 4 {
                    return Ok(Some(v));
                }
                let (p, q) = (&c.w[0..2], &c.w[2..4]);
                let (dp, dq) = (ctx.delta(0, p), ctx.delta(0, q));
                if dp > 0.0 && dq > 0.0 {
                    let r = jung_radius(2, 2f64.sqrt())?;
                    let jg = j_formula(dist(p, q), dp, dq);
                    let tg = 2.0 * (jg / 2.0).tanh();
                    v.push(le("|x-y|/r <= 2 tanh(j_G/2)", dist(p, q) / r, tg));
                    v.push(le("2 tanh(j_G/2) <= j_G", tg, jg));
                }
                Ok(Some(v))
            },
            witness: Some((antipodal_witness, 0)),
        },
        BoundSpec {
            name: "bernoulli",
            statement: "log(1+at) <= a log(1+t) for a >= 1, t >= 0; equality for a = 1",
            backend: Backend::ClosedOnly,
            sampling: "a log-uniform in [1, e^5], t log-uniform in [e^-10, e^10], t = 0 for one sample in sixteen",
            params: Params::new(),
            domains: no_domain,
            sampler: |s, _| {
                let a = uniform_in(s, 0.0, 5.0).exp();
                let t = if uniform(s) < 1.0 / 16.0 { 0.0 } else { uniform_in(s, -10.0, 10.0).exp() };
                Config {
                    extra: vec![a, t],
                    ..Config::pair(Vec::new(), Vec::new())
                }
            },
            assertion: |c, _| {
                let (a, t) = (c.extra[0], c.extra[1]);
                if a < 1.0 || t < 0.0 {
                    return Ok(None);
                }
                Ok(Some(vec![le("log(1+at) <= a log(1+t)", (a * t).ln_1p(), a * t.ln_1p())]))
            },
            witness: Some((
                |_| Config {
                    extra: vec![1.0, 0.7],
                    ..Config::pair(Vec::new(), Vec::new())
                },
                0,
            )),
        },
        BoundSpec {
            name: "inversion_identity",
            statement: "|h(x)-h(y)| = r²|x-y|/(|x-a||y-a|) for the inversion h(x) = a + r²(x-a)/|x-a|²",
            backend: Backend::ClosedOnly,
            sampling: "a, x, y multiscale in Rⁿ, r log-uniform in [e^-2, e^2]",
            params: params(&[("n", 2.0)]),
            domains: no_domain,
            sampler: |s, c| {
                let n = c.dim();
                let (x, y) = (multiscale_point(s, n), multiscale_point(s, n));
                Config {
                    w: multiscale_point(s, n),
                    extra: vec![uniform_in(s, -2.0, 2.0).exp()],
                    ..Config::pair(x, y)
                }
            },
            assertion: |c, _| {
                let (a, r) = (&c.w, c.extra[0]);
                if inversion_at(a, r, &c.x).is_none() || inversion_at(a, r, &c.y).is_none() {
                    return Ok(None);
                }
                // h(x) - h(y) = r² (u/|u|² - v/|v|²) with u = x-a, v = y-a; the numerator
                // u|v|² - v|u|² is rewritten as d|v|² - v (d·(u+v)), d = x-y, so nearby images
                // do not cancel
                let (u, v, d) = (sub(&c.x, a), sub(&c.y, a), sub(&c.x, &c.y));
                let (uu, vv) = (crate::vecmath::dot(&u, &u), crate::vecmath::dot(&v, &v));
                let du = crate::vecmath::dot(&d, &crate::vecmath::add(&u, &v));
                let num: Vec<f64> = d.iter().zip(&v).map(|(di, vi)| di * vv - vi * du).collect();
                let lhs = r * r * norm(&num) / (uu * vv);
                let rhs = r * r * dist(&c.x, &c.y) / (dist(&c.x, a) * dist(&c.y, a));
                // relative comparison: both sides are scale covariant
                let s = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
                Ok(Some(eq("|h(x)-h(y)| = r²|x-y|/(|x-a||y-a|)", lhs / s, rhs / s).to_vec()))
            },
            witness: None,
        },
        BoundSpec {
            name: "diameter_additivity",
            statement: "k_B(-x,x) = k_B(-x,0) + k_B(0,x) while j_B(-x,x) < j_B(-x,0) + j_B(0,x) for x ≠ 0",
            backend: Backend::ClosedOnly,
            sampling: "x uniform in the unit ball",
            params: params(&[("n", 2.0)]),
            domains: no_domain,
            sampler: |s, c| {
                let x = in_ball(s, c.dim(), 1.0);
                let y = scale(&x, -1.0);
                Config::pair(x, y)
            },
            assertion: |c, _| {
                if norm(&c.x) == 0.0 {
                    return Ok(None);
                }
                let o = vec![0.0; c.x.len()];
                let k = |a: &[f64], b: &[f64]| k_ball_closed(a, b).unwrap_or(f64::NAN);
                let mut v = eq("k(-x,x) = k(-x,0) + k(0,x)", k(&c.y, &c.x), k(&c.y, &o) + k(&o, &c.x)).to_vec();
                let (jl, jr) = (j_ball(&c.y, &c.x), j_ball(&c.y, &o) + j_ball(&o, &c.x));
                // strict: a tie counts as a failure
                v.push(le("j(-x,x) < j(-x,0) + j(0,x)", jl, jr - CLOSED_MARGIN * jr.max(1.0) * 2.0));
                Ok(Some(v))
            },
            witness: None,
        },
        BoundSpec {
            name: "complementofB_angle",
            statement: "|x| = |y|: θ = angle(x,0,y) <= π|x-y|/(2|x|), the angular step behind k_G(x,y) <= π|x-y|/(2(|x|-r)) in G = Rⁿ minus the closed ball B(r)",
            backend: Backend::ClosedOnly,
            sampling: "x, y uniform on a sphere of log-uniform radius",
            params: params(&[("n", 2.0)]),
            domains: no_domain,
            sampler: |s, c| {
                let r = uniform_in(s, -3.0, 3.0).exp();
                Config::pair(scale(&on_sphere(s, c.dim()), r), scale(&on_sphere(s, c.dim()), r))
            },
            assertion: |c, _| {
                let r = norm(&c.x);
                let cos = crate::vecmath::dot(&c.x, &c.y) / (r * norm(&c.y));
                let theta = cos.clamp(-1.0, 1.0).acos();
                Ok(Some(vec![le("θ <= π|x-y|/(2|x|)", theta, PI * dist(&c.x, &c.y) / (2.0 * r))]))
            },
            witness: None,
        },
        // ---- numeric entries ----
        BoundSpec {
            name: "newlem1",
            statement: "0 < s < 1, x, y in B(s): j_B(x,y) <= k_B(x,y) <= (1+s) j_B(x,y)",
            backend: Backend::WithNumeric,
            sampling: "x, y uniform in B(s)",
            params: params(&[("n", 2.0), ("s", 0.9)]),
            domains: unit_ball_domain,
            sampler: |s, c| ball_pair(s, c.dim(), c.p("s")),
            assertion: |c, ctx| {
                let k = ctx.k(0, &c.x, &c.y)?;
                let j = j_ball(&c.x, &c.y);
                Ok(Some(vec![le_num("j <= k", j, k), le_num("k <= (1+s) j", k, (1.0 + ctx.p("s")) * j)]))
            },
            witness: None,
        },
        BoundSpec {
            name: "newlem2",
            statement: "w in G, w0 a nearest boundary point of w, x, y in B(w, sδ(w)) with δ(x) = |x-w0| <= δ(y): k_G(x,y) <= (1+s) j_G(x,y); G the unit square",
            backend: Backend::WithNumeric,
            sampling: "w uniform in the square; x on [w, w0] inside B(w, sδ(w)); y uniform in B(w, sδ(w))",
            params: params(&[("s", 0.9)]),
            domains: |_| vec![DomainSpec::unit_square()],
            sampler: |s, c| {
                let w = vec![uniform(s), uniform(s)];
                let d = c.delta(0, &w);
                let mut w0 = w.clone();
                let cands = [(0, 0.0, w[0]), (0, 1.0, 1.0 - w[0]), (1, 0.0, w[1]), (1, 1.0, 1.0 - w[1])];
                let (axis, side, _) = cands.iter().copied().fold((0, 0.0, f64::INFINITY), |b, q| if q.2 < b.2 { q } else { b });
                w0[axis] = side;
                let sd = c.p("s") * d;
                let t = uniform(s) * sd;
                let dir = scale(&sub(&w0, &w), 1.0 / d.max(f64::MIN_POSITIVE));
                let x: Vec<f64> = w.iter().zip(&dir).map(|(a, b)| a + t * b).collect();
                let y: Vec<f64> = w.iter().zip(in_ball(s, 2, sd)).map(|(a, b)| a + b).collect();
                Config {
                    w: [w, w0].concat(),
                    ..Config::pair(x, y)
                }
            },
            assertion: |c, ctx| {
                let (w, w0) = (&c.w[0..2], &c.w[2..4]);
                let sd = ctx.p("s") * ctx.delta(0, w);
                let (dx, dy) = (ctx.delta(0, &c.x), ctx.delta(0, &c.y));
                let on_segment = (dx - dist(&c.x, w0)).abs() <= 1e-12;
                if !(dist(&c.x, w) < sd && dist(&c.y, w) < sd && on_segment && dx <= dy && dy > 0.0) {
                    return Ok(None);
                }
                let k = ctx.k(0, &c.x, &c.y)?;
                let j = j_formula(dist(&c.x, &c.y), dx, dy);
                Ok(Some(vec![le_num("k <= (1+s) j", k, (1.0 + ctx.p("s")) * j)]))
            },
            witness: None,
        },
        BoundSpec {
            name: "newlem3",
            statement: "G = Rⁿ minus {0}, |x| <= |y|, |x-w| < sδ(w), |y-w| < sδ(w): k_G(x,y) <= (1+s) j_G(x,y)",
            backend: Backend::WithNumeric,
            sampling: "w multiscale in the plane; x, y uniform in B(w, s|w|), ordered by norm",
            params: params(&[("s", 0.9)]),
            domains: |_| vec![DomainSpec::punctured_space(&[0.0, 0.0])],
            sampler: |s, c| {
                let w = multiscale_point(s, 2);
                let r = c.p("s") * norm(&w);
                let mut x: Vec<f64> = w.iter().zip(in_ball(s, 2, r)).map(|(a, b)| a + b).collect();
                let mut y: Vec<f64> = w.iter().zip(in_ball(s, 2, r)).map(|(a, b)| a + b).collect();
                if norm(&x) > norm(&y) {
                    std::mem::swap(&mut x, &mut y);
                }
                Config { w, ..Config::pair(x, y) }
            },
            assertion: |c, ctx| {
                let sd = ctx.p("s") * norm(&c.w);
                if !(norm(&c.x) <= norm(&c.y) && dist(&c.x, &c.w) < sd && dist(&c.y, &c.w) < sd && norm(&c.x) > 0.0) {
                    return Ok(None);
                }
                let k = ctx.k(0, &c.x, &c.y)?;
                let j = j_formula(dist(&c.x, &c.y), norm(&c.x), norm(&c.y));
                Ok(Some(vec![le_num("k <= (1+s) j", k, (1.0 + ctx.p("s")) * j)]))
            },
            witness: None,
        },
        BoundSpec {
            name: "complementofB",
            statement: "r > 0, G = Rⁿ minus the closed ball B(r), |x| = |y|: k_G(x,y) <= π|x-y|/(2(|x|-r))",
            backend: Backend::WithNumeric,
            sampling: "x, y uniform on the circle of radius `norm`",
            params: params(&[("r", 1.0), ("norm", 2.0)]),
            domains: |p| vec![DomainSpec::complement_closed_ball(&[0.0, 0.0], p["r"])],
            sampler: |s, c| {
                let m = c.p("norm");
                Config::pair(scale(&on_sphere(s, 2), m), scale(&on_sphere(s, 2), m))
            },
            assertion: |c, ctx| {
                let (r, m) = (ctx.p("r"), norm(&c.x));
                if c.x == c.y || m <= r {
                    return Ok(None);
                }
                let k = ctx.k(0, &c.x, &c.y)?;
                Ok(Some(vec![le_num("k <= π|x-y|/(2(|x|-r))", k, PI * dist(&c.x, &c.y) / (2.0 * (m - r)))]))
            },
            witness: None,
        },
        BoundSpec {
            name: "rho_k_sandwich",
            statement: "ρ_B(x,y)/2 <= k_B(x,y) <= ρ_B(x,y) for x, y in the unit ball",
            backend: Backend::WithNumeric,
            sampling: "x, y uniform in B(0.95)",
            params: params(&[("n", 2.0)]),
            domains: unit_ball_domain,
            sampler: |s, c| ball_pair(s, c.dim(), 0.95),
            assertion: |c, ctx| {
                let k = ctx.k(0, &c.x, &c.y)?;
                let rho = rho_ball_at(&c.x, &c.y);
                Ok(Some(vec![le_num("ρ/2 <= k", rho / 2.0, k), le_num("k <= ρ", k, rho)]))
            },
            witness: None,
        },
        BoundSpec {
            name: "convex_modulus",
            statement: "G convex: k_G(x,y) <= t, t = |x-y|/min(δ(x),δ(y)), checked as k̂ <= t(1 + tol_rel); G the unit square and the unit disk",
            backend: Backend::WithNumeric,
            sampling: "a fair coin picks the square or the disk, then x, y uniform in it",
            params: params(&[("tol_rel", 0.05)]),
            domains: |_| vec![DomainSpec::unit_square(), DomainSpec::unit_ball(2)],
            sampler: |s, _| {
                let disk = uniform(s) < 0.5;
                let mut c = if disk {
                    ball_pair(s, 2, 1.0)
                } else {
                    Config::pair(vec![uniform(s), uniform(s)], vec![uniform(s), uniform(s)])
                };
                c.extra = vec![if disk { 1.0 } else { 0.0 }];
                c
            },
            assertion: |c, ctx| {
                let i = c.extra[0] as usize;
                let (dx, dy) = (ctx.delta(i, &c.x), ctx.delta(i, &c.y));
                if dx <= 0.0 || dy <= 0.0 || c.x == c.y {
                    return Ok(None);
                }
                let k = ctx.k(i, &c.x, &c.y)?;
                let t = dist(&c.x, &c.y) / dx.min(dy);
                Ok(Some(vec![le_num("k <= t (1 + tol_rel)", k, t * (1.0 + ctx.p("tol_rel")))]))
            },
            witness: None,
        },
        BoundSpec {
            name: "vu2_puncture",
            statement: "θ in (0,1), x, y in G outside B(z, θδ(z)): k_{G minus z}(x,y) <= a(θ) k_G(x,y); G = H², k_G = ρ_H",
            backend: Backend::WithNumeric,
            sampling: "z = (0,1); x, y uniform in [-3,3]x(0,3] outside B(z, θ)",
            params: params(&[("theta", 0.5)]),
            domains: |_| vec![DomainSpec::remove_points(DomainSpec::half_space(2), &[vec![0.0, 1.0]])],
            sampler: |s, _| {
                let p = |s: &mut Stream| vec![uniform_in(s, -3.0, 3.0), uniform_in(s, 0.0, 3.0)];
                Config::pair(p(s), p(s))
            },
            assertion: |c, ctx| {
                let z = [0.0, 1.0];
                let th = ctx.p("theta");
                if dist(&c.x, &z) < th || dist(&c.y, &z) < th || c.x[1] <= 0.0 || c.y[1] <= 0.0 || c.x == c.y {
                    return Ok(None);
                }
                let k = ctx.k(0, &c.x, &c.y)?;
                Ok(Some(vec![le_num("k' <= a(θ) k", k, a_theta(th)? * k_halfspace_at(&c.x, &c.y))]))
            },
            witness: None,
        },
        BoundSpec {
            name: "genvu2",
            statement: "α, θ in (0,1), x, y in G outside B(z, θδ(z)), G' = G minus the closed ball B(z, αθδ(z)): k_G'(x,y) <= a(α,θ) k_G(x,y); G = H², k_G = ρ_H",
            backend: Backend::WithNumeric,
            sampling: "z = (0,1); x, y uniform in [-3,3]x(0,3] outside B(z, θ)",
            params: params(&[("alpha", 0.2), ("theta", 0.5)]),
            domains: |p| vec![DomainSpec::remove_closed_ball(DomainSpec::half_space(2), &[0.0, 1.0], p["alpha"] * p["theta"])],
            sampler: |s, _| {
                let p = |s: &mut Stream| vec![uniform_in(s, -3.0, 3.0), uniform_in(s, 0.0, 3.0)];
                Config::pair(p(s), p(s))
            },
            assertion: |c, ctx| {
                let z = [0.0, 1.0];
                let (al, th) = (ctx.p("alpha"), ctx.p("theta"));
                if dist(&c.x, &z) < th || dist(&c.y, &z) < th || c.x[1] <= 0.0 || c.y[1] <= 0.0 || c.x == c.y {
                    return Ok(None);
                }
                let k = ctx.k(0, &c.x, &c.y)?;
                Ok(Some(vec![le_num("k' <= a(α,θ) k", k, a_alpha_theta(al, th)? * k_halfspace_at(&c.x, &c.y))]))
            },
            witness: None,
        },
    ]
}

/// The chain `k(-w,w) <= k(x,y)`, `k(-w,w) = 2 k(0,w) = 2 log(2/(2-|x-y|))`, `2 log(2/(2-|x-y|)) >= |x-y|`
/// in the unit ball, with `k(x,y)` supplied by the caller.
fn jung_chain(k: f64, x: &[f64], y: &[f64], n: usize) -> Vec<Ineq> {
    let d = dist(x, y);
    let mut w = vec![0.0; n];
    w[0] = d / 2.0;
    let mw = scale(&w, -1.0);
    let o = vec![0.0; n];
    let kw = k_ball_closed(&mw, &w).unwrap_or(f64::NAN);
    let k0 = k_ball_closed(&o, &w).unwrap_or(f64::NAN);
    let f = -2.0 * (-d / 2.0).ln_1p();
    let mut v = vec![le("k(-w,w) <= k(x,y)", kw, k)];
    v.extend(eq("k(-w,w) = 2 k(0,w)", kw, 2.0 * k0));
    v.extend(eq("2 k(0,w) = 2 log(2/(2-|x-y|))", 2.0 * k0, f));
    v.push(le("|x-y| <= 2 log(2/(2-|x-y|))", d, f));
    v
}

/// Look up a catalog entry.
pub fn find(name: &str) -> Result<BoundSpec> {
    catalog()
        .into_iter()
        .find(|b| b.name == name)
        .ok_or_else(|| Error::UnknownBound(name.to_string()))
}
