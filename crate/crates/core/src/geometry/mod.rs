//! Domains in Rⁿ: membership, exact distance to the boundary, and sampling.

mod shape;
mod spec;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use shape::{radial_height, segment_distance, ExpCusp, Obstacle, Polygon, Region, Shape};
pub use spec::{comb_points, staircase_vertices, DomainSpec, Model};

use crate::error::{Error, Result};
use crate::rng::{uniform, Stream};
use crate::vecmath::dist;

/// A point of Rⁿ with n ≥ 2 and finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidPoint(format!(
                "dimension {} < 2",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        Ok(Point(coords))
    }

    /// Panics on invalid input; for literals in tests and examples.
    pub fn from_slice(coords: &[f64]) -> Self {
        Point::new(coords.to_vec()).expect("valid point")
    }

    pub fn origin(n: usize) -> Self {
        Point::from_slice(&vec![0.0; n])
    }

    /// `t e_i` in Rⁿ.
    pub fn on_axis(n: usize, i: usize, t: f64) -> Self {
        let mut c = vec![0.0; n];
        c[i] = t;
        Point::from_slice(&c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        crate::vecmath::norm(&self.0)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        dist(&self.0, &other.0)
    }

    pub fn neg(&self) -> Point {
        Point(self.0.iter().map(|c| -c).collect())
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Aabb {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.iter().chain(&hi).any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec("region bounds must be finite".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::InvalidSpec("region needs lo <= hi".into()));
        }
        Ok(Aabb { lo, hi })
    }

    /// Cube with the given center and half-side.
    pub fn cube(center: &[f64], half: f64) -> Self {
        Aabb {
            lo: center.iter().map(|c| c - half).collect(),
            hi: center.iter().map(|c| c + half).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    pub fn diameter(&self) -> f64 {
        dist(&self.lo, &self.hi)
    }

    pub fn max_side(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| b - a)
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(c, (a, b))| *a <= *c && *c <= *b)
    }

    /// True when `other` lies inside `self`.
    pub fn covers(&self, other: &Aabb) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }
}

/// Recursive bisection certificate that `[a, b]` lies in `{sdf > 0}`.
///
/// A piece `[p, q]` is accepted when `|p - q| < sdf(p) + sdf(q)`, since then it is
/// covered by the two open balls `B(p, sdf(p))` and `B(q, sdf(q))`. A segment
/// touching the boundary can never be accepted, so the test is sound; very
/// tangential segments may be rejected once the depth limit is hit.
pub fn segment_certified(sdf: &dyn Fn(&[f64]) -> f64, a: &[f64], b: &[f64]) -> bool {
    let (da, db) = (sdf(a), sdf(b));
    if da <= 0.0 || db <= 0.0 {
        return false;
    }
    certify(sdf, a, b, da, db, 0)
}

const CERTIFY_DEPTH: usize = 52;

fn certify(sdf: &dyn Fn(&[f64]) -> f64, a: &[f64], b: &[f64], da: f64, db: f64, depth: usize) -> bool {
    if dist(a, b) < da + db {
        return true;
    }
    if depth >= CERTIFY_DEPTH {
        return false;
    }
    let m = crate::vecmath::lerp(a, b, 0.5);
    let dm = sdf(&m);
    dm > 0.0 && certify(sdf, a, &m, da, dm, depth + 1) && certify(sdf, &m, b, dm, db, depth + 1)
}

/// An immutable domain with exact distance-to-boundary queries.
#[derive(Clone, Debug)]
pub struct DomainOracle {
    spec: DomainSpec,
    region: Region,
    model: Model,
    dim: usize,
    bbox: Option<Aabb>,
}

/// Build an oracle, validating the domain parameters.
pub fn make_domain(spec: &DomainSpec) -> Result<DomainOracle> {
    let (region, model) = spec::build(spec)?;
    let dim = region.dim();
    let bbox = region.bbox().map(|(lo, hi)| Aabb { lo, hi });
    Ok(DomainOracle {
        spec: spec.clone(),
        region,
        model,
        dim,
        bbox,
    })
}

impl DomainOracle {
    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    /// Bounding box of the domain, `None` when it is unbounded.
    pub fn bounding_box(&self) -> Option<&Aabb> {
        self.bbox.as_ref()
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn delta(&self, x: &Point) -> Result<f64> {
        self.check(x.coords())?;
        Ok(self.delta_at(x.coords()))
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        self.check(x.coords())?;
        Ok(self.signed_distance(x.coords()) > 0.0)
    }

    /// δ without the dimension check.
    #[inline]
    pub fn delta_at(&self, x: &[f64]) -> f64 {
        self.region.sdf(x).max(0.0)
    }

    /// Positive inside (equal to δ), nonpositive outside (minus the distance to the closure).
    #[inline]
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        self.region.sdf(x)
    }

    /// δ of an interior point, or `PointOutsideDomain`.
    pub fn interior_delta(&self, x: &Point) -> Result<f64> {
        let d = self.delta(x)?;
        if d > 0.0 {
            Ok(d)
        } else {
            Err(Error::PointOutsideDomain(format!("{:?}", x.coords())))
        }
    }

    pub fn segment_inside(&self, a: &[f64], b: &[f64]) -> bool {
        segment_certified(&|x: &[f64]| self.region.sdf(x), a, b)
    }

    /// Finite box for numeric work on a query between `x` and `y`.
    ///
    /// Bounded domains use their bounding box. Otherwise a cube centred at the
    /// midpoint with side `4 max(|x-y|, δ(x), δ(y))`.
    pub fn query_region(&self, x: &[f64], y: &[f64]) -> Aabb {
        if let Some(b) = &self.bbox {
            return b.clone();
        }
        let scale = dist(x, y)
            .max(self.delta_at(x))
            .max(self.delta_at(y));
        let mid = crate::vecmath::lerp(x, y, 0.5);
        Aabb::cube(&mid, 2.0 * scale)
    }
}

pub fn delta(oracle: &DomainOracle, x: &Point) -> Result<f64> {
    oracle.delta(x)
}

pub fn contains(oracle: &DomainOracle, x: &Point) -> Result<bool> {
    oracle.contains(x)
}

/// Candidate draws allowed per sampled point before giving up.
///
/// With acceptance probability `p`, all `2^25` draws fail with probability
/// `(1-p)^(2^25)`; for `p >= 1e-6` that is below `e^-33`.
pub const SAMPLE_BUDGET: u64 = 1 << 25;

/// Draw one interior point of `oracle ∩ region` from `stream`.
pub fn sample_point(oracle: &DomainOracle, region: &Aabb, stream: &mut Stream) -> Result<Point> {
    let n = oracle.dim();
    let mut x = vec![0.0; n];
    for _ in 0..SAMPLE_BUDGET {
        for ((xk, lo), hi) in x.iter_mut().zip(&region.lo).zip(&region.hi) {
            *xk = lo + uniform(stream) * (hi - lo);
        }
        if oracle.signed_distance(&x) > 0.0 {
            return Point::new(x);
        }
    }
    Err(Error::SamplingExhausted(format!(
        "no interior point in {SAMPLE_BUDGET} draws; acceptance rate below 1e-6"
    )))
}

/// Independent pairs of interior points, uniform in `region ∩ domain`.
///
/// Pair `i` is drawn from stream `(seed, i)`, so the output does not depend on
/// scheduling.
pub fn sample_pairs(
    oracle: &DomainOracle,
    count: usize,
    seed: u64,
    region: &Aabb,
) -> Result<Vec<(Point, Point)>> {
    if count == 0 {
        return Err(Error::Usage("sample count must be positive".into()));
    }
    if region.dim() != oracle.dim() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            got: region.dim(),
        });
    }
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut s = Stream::new(seed, i);
            let x = sample_point(oracle, region, &mut s)?;
            let y = sample_point(oracle, region, &mut s)?;
            Ok((x, y))
        })
        .collect()
}
