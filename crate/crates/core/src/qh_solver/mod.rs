//! Numerical quasihyperbolic distance and geodesics.
//!
//! The estimate `k̂` is always the length of an explicit polyline inside the
//! domain, so `k ≤ k̂`. The lower bracket is `j ≤ k`.

mod mesh;
mod quad;
mod smooth;

use serde::{Deserialize, Serialize};

pub use mesh::MeshGraph;
pub use quad::{k_length_raw, ABS_TOL};

use crate::closed_form::{
    j_at, k_halfspace_at, k_radial_at, on_nearest_segment, Method, MetricResult,
};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, DomainOracle, Model, Point};
use crate::vecmath::{dist, lerp};

use mesh::{shortest_path, Ends, MeshParams};

/// k-length of the straight segment `[a, b]`.
pub fn segment_k_length(oracle: &DomainOracle, a: &Point, b: &Point) -> Result<f64> {
    check_pair(oracle, a, b)?;
    if a == b {
        return Ok(0.0);
    }
    if !oracle.segment_inside(a.coords(), b.coords()) {
        return Err(Error::SegmentExitsDomain);
    }
    Ok(quad::k_length(oracle, a.coords(), b.coords()))
}

fn check_pair(oracle: &DomainOracle, x: &Point, y: &Point) -> Result<()> {
    oracle.interior_delta(x)?;
    oracle.interior_delta(y)?;
    Ok(())
}

/// Which evaluation routes are allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    /// Closed form when the configuration matches one, numeric otherwise.
    #[default]
    Auto,
    Closed,
    Numeric,
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub method: MethodChoice,
    pub max_levels: usize,
    pub max_nodes: usize,
    /// Region doublings allowed for unbounded domains.
    pub max_doublings: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            method: MethodChoice::Auto,
            max_levels: 6,
            max_nodes: 5_000_000,
            max_doublings: 12,
        }
    }
}

/// A k estimate with its bracket and the polyline realizing it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KEstimate {
    pub value: f64,
    /// `j(x, y)`, a lower bound for k.
    pub lower: f64,
    pub error_bound: f64,
    pub method: Method,
    pub converged: bool,
    /// Last refinement level run (0 when no mesh was needed).
    pub level: usize,
    /// Largest cell size at the last level.
    pub spacing: f64,
    pub nodes: usize,
    pub tol: f64,
    #[serde(skip)]
    pub path: Vec<Vec<f64>>,
}

impl KEstimate {
    pub fn metric(&self) -> MetricResult {
        MetricResult {
            value: self.value,
            method: self.method,
            error_bound: self.error_bound,
        }
    }

    fn exact(value: f64, lower: f64, path: Vec<Vec<f64>>, tol: f64) -> Self {
        KEstimate {
            value,
            lower,
            error_bound: 0.0,
            method: Method::ClosedForm,
            converged: true,
            level: 0,
            spacing: 0.0,
            nodes: 0,
            tol,
            path,
        }
    }
}

/// Closed-form k when `(x, y)` matches a known configuration.
pub fn closed_form_k(oracle: &DomainOracle, x: &[f64], y: &[f64]) -> Option<f64> {
    match oracle.model() {
        Model::Ball { center, radius } => {
            let u: Vec<f64> = x.iter().zip(center).map(|(a, c)| (a - c) / radius).collect();
            let v: Vec<f64> = y.iter().zip(center).map(|(a, c)| (a - c) / radius).collect();
            if let Some(k) = k_radial_at(&u, &v) {
                return Some(k);
            }
        }
        Model::HalfSpace { .. } => return Some(k_halfspace_at(x, y)),
        Model::General => {}
    }
    if on_nearest_segment(oracle, x, y) || on_nearest_segment(oracle, y, x) {
        return Some((oracle.delta_at(x) / oracle.delta_at(y)).ln().abs());
    }
    None
}

/// Quasihyperbolic distance estimate with bracket `[j, k̂]`.
pub fn k_estimate(oracle: &DomainOracle, x: &Point, y: &Point, tol: f64, opts: &SolverOptions) -> Result<KEstimate> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Usage(format!("tol must be positive, got {tol}")));
    }
    check_pair(oracle, x, y)?;
    let (xc, yc) = (x.coords(), y.coords());
    let lower = j_at(oracle, xc, yc);
    if x == y {
        return Ok(KEstimate::exact(0.0, 0.0, vec![xc.to_vec()], tol));
    }
    if opts.method != MethodChoice::Numeric {
        if let Some(k) = closed_form_k(oracle, xc, yc) {
            let path = if oracle.segment_inside(xc, yc) {
                vec![xc.to_vec(), yc.to_vec()]
            } else {
                Vec::new()
            };
            return Ok(KEstimate::exact(k, lower, path, tol));
        }
        if opts.method == MethodChoice::Closed {
            return Err(Error::NoClosedForm);
        }
    }
    let n = oracle.dim();
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    numeric(oracle, xc, yc, lower, tol, opts)
}

/// k̂ as a `MetricResult`.
pub fn k_distance(oracle: &DomainOracle, x: &Point, y: &Point, tol: f64) -> Result<MetricResult> {
    k_estimate(oracle, x, y, tol, &SolverOptions::default()).map(|e| e.metric())
}

/// Level cap per region while no path has been found in an unbounded domain.
const SEARCH_LEVELS: usize = 1;

struct Best {
    len: f64,
    path: Vec<Vec<f64>>,
}

struct LevelRun {
    level: usize,
    spacing: f64,
    nodes: usize,
    converged: bool,
    delta: f64,
    over_budget: bool,
}

fn numeric(oracle: &DomainOracle, x: &[f64], y: &[f64], lower: f64, tol: f64, opts: &SolverOptions) -> Result<KEstimate> {
    let mut best = Best {
        len: f64::INFINITY,
        path: Vec::new(),
    };
    if oracle.segment_inside(x, y) {
        best.len = quad::k_length(oracle, x, y);
        best.path = vec![x.to_vec(), y.to_vec()];
    }
    let finish = |best: Best, run: Option<&LevelRun>, converged: bool, delta: f64| -> Result<KEstimate> {
        let est = KEstimate {
            value: best.len,
            lower,
            error_bound: delta.abs().max(best.len - lower).max(0.0),
            method: Method::Numeric,
            converged,
            level: run.map_or(0, |r| r.level),
            spacing: run.map_or(0.0, |r| r.spacing),
            nodes: run.map_or(0, |r| r.nodes),
            tol,
            path: best.path,
        };
        if !est.value.is_finite() {
            return Err(Error::BudgetExceeded(Box::new(est)));
        }
        if converged {
            Ok(est)
        } else {
            Err(Error::BudgetExceeded(Box::new(est)))
        }
    };
    if best.len - lower <= tol {
        return finish(best, None, true, 0.0);
    }
    let ends = Ends {
        x,
        y,
        dx: oracle.delta_at(x),
        dy: oracle.delta_at(y),
    };
    let bounded = oracle.bounding_box().is_some();
    let start = oracle.query_region(x, y);
    let mut half = start.max_side() / 2.0;
    let center = start.center();
    let mut prev: Option<f64> = None;
    let mut last: Option<LevelRun> = None;
    for doubling in 0..=opts.max_doublings {
        let region = Aabb::cube(&center, half);
        // Without any path yet the region may simply miss the way around; grow it
        // after a shallow search instead of refining deep first.
        let searching = !bounded && !best.len.is_finite() && doubling < opts.max_doublings;
        let levels = if searching { SEARCH_LEVELS.min(opts.max_levels) } else { opts.max_levels };
        let run = refine(oracle, &region, &ends, tol, levels, opts, &mut best);
        if searching && !best.len.is_finite() && !run.over_budget {
            half *= 2.0;
            continue;
        }
        let (conv, delta, over) = (run.converged, run.delta, run.over_budget);
        last = Some(run);
        if over {
            return finish(best, last.as_ref(), false, delta);
        }
        if bounded {
            return finish(best, last.as_ref(), conv, delta);
        }
        if best.len.is_finite() {
            if ellipse_box(&ends, best.len).is_some_and(|b| region.covers(&b)) {
                return finish(best, last.as_ref(), conv, delta);
            }
            if let Some(p) = prev {
                let change = p - best.len;
                if change < tol {
                    return finish(best, last.as_ref(), conv, delta.max(change));
                }
            }
            prev = Some(best.len);
        }
        half *= 2.0;
    }
    let d = last.as_ref().map_or(0.0, |r| r.delta);
    finish(best, last.as_ref(), false, d)
}

/// Box containing every z with `j(x,z) + j(z,y) ≤ cap`, hence every path of
/// k-length at most `cap`.
fn ellipse_box(e: &Ends, cap: f64) -> Option<Aabb> {
    let rx = e.dx * cap.exp_m1();
    let ry = e.dy * cap.exp_m1();
    let lo: Vec<f64> = (0..e.x.len()).map(|k| (e.x[k] - rx).max(e.y[k] - ry)).collect();
    let hi: Vec<f64> = (0..e.x.len()).map(|k| (e.x[k] + rx).min(e.y[k] + ry)).collect();
    Aabb::new(lo, hi).ok()
}

/// Spacing schedule at `level` on a cube of side `side`.
fn params(level: usize, side: f64, ends: &Ends, cap: f64, floor_rel: f64, max_nodes: usize) -> MeshParams {
    let rel = 0.25 * 0.5f64.powi(level as i32);
    MeshParams {
        h: side / 8.0 * 0.5f64.powi(level as i32),
        rel,
        floor_abs: rel * ends.dx.min(ends.dy) / 2.0,
        floor_rel: floor_rel * rel,
        cap,
        max_nodes,
    }
}

/// Slack above the incumbent within which graph paths are still explored,
/// since unsmoothed graph paths run longer than their smoothed versions.
fn cap_for(best: f64, tol: f64) -> f64 {
    if best.is_finite() {
        best + (0.2 * best).max(4.0 * tol)
    } else {
        f64::INFINITY
    }
}

fn refine(
    oracle: &DomainOracle,
    region: &Aabb,
    ends: &Ends,
    tol: f64,
    max_levels: usize,
    opts: &SolverOptions,
    best: &mut Best,
) -> LevelRun {
    let side = region.max_side();
    let mut run = LevelRun {
        level: 0,
        spacing: side / 8.0,
        nodes: 0,
        converged: false,
        delta: f64::INFINITY,
        over_budget: false,
    };
    let mut floor_rel = 0.5;
    let mut prev: Option<f64> = None;
    for level in 0..max_levels.max(1) {
        let cap = cap_for(best.len, tol);
        let p = params(level, side, ends, cap, floor_rel, opts.max_nodes);
        run.level = level;
        run.spacing = p.h;
        let sigma = |d: f64| (p.rel * d).min(p.h).max(p.floor_abs);
        let mesh = match MeshGraph::build(oracle, region, &p, ends) {
            Ok(m) => m,
            Err(mesh::OverBudget(k)) => {
                run.nodes = k;
                run.over_budget = true;
                return run;
            }
        };
        run.nodes = mesh.len();
        match shortest_path(&mesh, oracle, ends, (sigma(ends.dx), sigma(ends.dy)), cap) {
            Some((_, path)) => {
                let (sm, len) = smooth::smooth(oracle, path, tol);
                if len < best.len {
                    best.len = len;
                    best.path = sm;
                }
            }
            None if !best.len.is_finite() => {
                // Nothing reachable yet: resolve thin passages far from the endpoints too.
                floor_rel *= 0.25;
            }
            None => {}
        }
        if best.len - ends_lower(ends) <= tol && best.len.is_finite() {
            run.converged = true;
            run.delta = 0.0;
            return run;
        }
        if let Some(p) = prev {
            run.delta = p - best.len;
            if p.is_finite() && run.delta < tol {
                run.converged = true;
                return run;
            }
        }
        prev = Some(best.len);
    }
    run
}

fn ends_lower(e: &Ends) -> f64 {
    crate::closed_form::j_formula(dist(e.x, e.y), e.dx, e.dy)
}

/// A polyline realizing a k̂ value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub vertices: Vec<Point>,
    /// k-length of each segment.
    pub segment_lengths: Vec<f64>,
    /// Sum of `segment_lengths`.
    pub k_length: f64,
    pub refinement_level: usize,
    /// Largest mesh cell size at the final level (0 when no mesh was built).
    pub spacing: f64,
    pub tol: f64,
    pub converged: bool,
}

impl GeodesicPath {
    fn from_polyline(oracle: &DomainOracle, pts: Vec<Vec<f64>>, est: &KEstimate) -> Result<Self> {
        let segment_lengths: Vec<f64> = pts.windows(2).map(|w| quad::k_length(oracle, &w[0], &w[1])).collect();
        let k_length = segment_lengths.iter().sum();
        Ok(GeodesicPath {
            vertices: pts.into_iter().map(Point::new).collect::<Result<_>>()?,
            segment_lengths,
            k_length,
            refinement_level: est.level,
            spacing: est.spacing,
            tol: est.tol,
            converged: est.converged,
        })
    }

    /// Cumulative k-length at each vertex.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = vec![0.0];
        for s in &self.segment_lengths {
            acc += s;
            out.push(acc);
        }
        out
    }

    /// CSV with columns `x1..xn,cumulative_k`.
    pub fn to_csv(&self) -> String {
        let n = self.vertices.first().map_or(0, |v| v.dim());
        let mut s = (1..=n).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
        s.push_str(",cumulative_k\n");
        for (v, c) in self.vertices.iter().zip(self.cumulative()) {
            for x in v.coords() {
                s.push_str(&crate::report::fmt_f64(*x));
                s.push(',');
            }
            s.push_str(&crate::report::fmt_f64(c));
            s.push('\n');
        }
        s
    }
}

/// Split segments so each carries k-length at most `step`.
fn densify(oracle: &DomainOracle, pts: &[Vec<f64>], step: f64) -> Vec<Vec<f64>> {
    let mut out = vec![pts[0].clone()];
    for w in pts.windows(2) {
        let l = quad::k_length(oracle, &w[0], &w[1]);
        let k = ((l / step).ceil() as usize).clamp(1, 256);
        for s in 1..k {
            out.push(lerp(&w[0], &w[1], s as f64 / k as f64));
        }
        out.push(w[1].clone());
    }
    out
}

/// Geodesic polyline from the numeric solver (closed forms are not used, so the
/// path is always the realized competitor).
pub fn geodesic(oracle: &DomainOracle, x: &Point, y: &Point, tol: f64) -> Result<GeodesicPath> {
    geodesic_with(oracle, x, y, tol, &SolverOptions::default())
}

pub fn geodesic_with(oracle: &DomainOracle, x: &Point, y: &Point, tol: f64, opts: &SolverOptions) -> Result<GeodesicPath> {
    let opts = SolverOptions {
        method: MethodChoice::Numeric,
        ..opts.clone()
    };
    if x == y {
        check_pair(oracle, x, y)?;
        return Ok(GeodesicPath {
            vertices: vec![x.clone()],
            segment_lengths: Vec::new(),
            k_length: 0.0,
            refinement_level: 0,
            spacing: 0.0,
            tol,
            converged: true,
        });
    }
    let est = k_estimate(oracle, x, y, tol, &opts)?;
    let step = (est.value / 16.0).max(tol);
    let pts = densify(oracle, &est.path, step);
    GeodesicPath::from_polyline(oracle, pts, &est)
}

/// `|k̂(x,z) + k̂(z,y) - k̂(x,y)|` for the vertex `z = path[z_index]`.
pub fn additivity_check(oracle: &DomainOracle, path: &GeodesicPath, z_index: usize) -> Result<f64> {
    let m = path.vertices.len();
    if z_index == 0 || z_index + 1 >= m {
        return Err(Error::IndexOutOfRange { index: z_index, len: m });
    }
    let opts = SolverOptions {
        method: MethodChoice::Numeric,
        ..SolverOptions::default()
    };
    let (x, z, y) = (&path.vertices[0], &path.vertices[z_index], &path.vertices[m - 1]);
    let k = |a: &Point, b: &Point| -> Result<f64> {
        match k_estimate(oracle, a, b, path.tol, &opts) {
            Ok(e) => Ok(e.value),
            Err(Error::BudgetExceeded(e)) => Ok(e.value),
            Err(e) => Err(e),
        }
    };
    Ok((k(x, z)? + k(z, y)? - k(x, y)?).abs())
}

/// Build the mesh the solver would use at `level` for the query `(x, y)`,
/// without pruning; exposed for inspection and invariant tests.
pub fn mesh_for(oracle: &DomainOracle, x: &Point, y: &Point, level: usize, max_nodes: usize) -> Result<MeshGraph> {
    check_pair(oracle, x, y)?;
    let ends = Ends {
        x: x.coords(),
        y: y.coords(),
        dx: oracle.delta_at(x.coords()),
        dy: oracle.delta_at(y.coords()),
    };
    let region = oracle.query_region(x.coords(), y.coords());
    let side = region.max_side();
    let region = Aabb::cube(&region.center(), side / 2.0);
    let p = params(level, side, &ends, f64::INFINITY, 0.5, max_nodes);
    MeshGraph::build(oracle, &region, &p, &ends).map_err(|mesh::OverBudget(k)| {
        Error::InvalidSpec(format!("mesh exceeds {max_nodes} nodes ({k} built)"))
    })
}

/// Independent estimates for a batch of pairs, computed in parallel.
pub fn k_batch(oracle: &DomainOracle, pairs: &[(Point, Point)], tol: f64) -> Vec<Result<KEstimate>> {
    use rayon::prelude::*;
    pairs
        .par_iter()
        .map(|(x, y)| k_estimate(oracle, x, y, tol, &SolverOptions::default()))
        .collect()
}
