//! JSON domain descriptions and their translation into regions.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::shape::{ExpCusp, Obstacle, Polygon, Region, Shape};
use crate::error::{Error, Result};

/// A serializable domain description: `{"kind": ..., "params": {...}, "base": {...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<DomainSpec>>,
}

fn params(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

impl DomainSpec {
    pub fn new(kind: &str, params_value: Value) -> Self {
        DomainSpec {
            kind: kind.to_string(),
            params: params(params_value),
            base: None,
        }
    }

    pub fn with_base(kind: &str, params_value: Value, base: DomainSpec) -> Self {
        DomainSpec {
            kind: kind.to_string(),
            params: params(params_value),
            base: Some(Box::new(base)),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn ball(center: &[f64], radius: f64) -> Self {
        Self::new("ball", json!({"center": center, "radius": radius}))
    }

    pub fn unit_ball(n: usize) -> Self {
        Self::ball(&vec![0.0; n], 1.0)
    }

    pub fn half_space(n: usize) -> Self {
        Self::new("half_space", json!({ "dim": n }))
    }

    pub fn punctured_space(center: &[f64]) -> Self {
        Self::new("punctured_space", json!({ "center": center }))
    }

    pub fn complement_closed_ball(center: &[f64], radius: f64) -> Self {
        Self::new(
            "complement_closed_ball",
            json!({"center": center, "radius": radius}),
        )
    }

    pub fn rectangle(lo: &[f64], hi: &[f64]) -> Self {
        Self::new("rectangle", json!({"lo": lo, "hi": hi}))
    }

    /// The square `(0, 1)²`.
    pub fn unit_square() -> Self {
        Self::rectangle(&[0.0, 0.0], &[1.0, 1.0])
    }

    pub fn half_strip(half_width: f64) -> Self {
        Self::new("half_strip", json!({ "half_width": half_width }))
    }

    pub fn exp_cusp(offset: f64, rate: f64) -> Self {
        Self::new("exp_cusp", json!({"offset": offset, "rate": rate}))
    }

    pub fn exp_cusp_complement(offset: f64, rate: f64) -> Self {
        Self::new("exp_cusp_complement", json!({"offset": offset, "rate": rate}))
    }

    pub fn polygon(vertices: &[[f64; 2]]) -> Self {
        Self::new("polygon", json!({ "vertices": vertices }))
    }

    pub fn polygon_union(m_max: usize) -> Self {
        Self::new("polygon_union", json!({ "m_max": m_max }))
    }

    pub fn annulus(center: &[f64], r_inner: f64, r_outer: f64) -> Self {
        Self::new(
            "annulus",
            json!({"center": center, "r_inner": r_inner, "r_outer": r_outer}),
        )
    }

    /// The triangle with vertices (1,-1), (0,0), (1,1) revolved about the second axis of R³.
    pub fn revolved_triangle() -> Self {
        Self::new(
            "revolved_triangle",
            json!({"vertices": [[1.0, -1.0], [0.0, 0.0], [1.0, 1.0]]}),
        )
    }

    pub fn comb_square(k: usize, n: usize) -> Self {
        Self::new("comb_square", json!({"k": k, "n": n}))
    }

    pub fn complement(base: DomainSpec) -> Self {
        Self::with_base("complement", json!({}), base)
    }

    pub fn remove_points(base: DomainSpec, points: &[Vec<f64>]) -> Self {
        Self::with_base("remove_points", json!({ "points": points }), base)
    }

    pub fn remove_closed_ball(base: DomainSpec, center: &[f64], radius: f64) -> Self {
        Self::with_base(
            "remove_closed_ball",
            json!({"center": center, "radius": radius}),
            base,
        )
    }

    pub fn remove_polygon_set(base: DomainSpec, polygons: &[Vec<[f64; 2]>]) -> Self {
        Self::with_base("remove_polygon_set", json!({ "polygons": polygons }), base)
    }

    fn base_spec(&self) -> Result<&DomainSpec> {
        self.base
            .as_deref()
            .ok_or_else(|| Error::InvalidSpec(format!("{} requires a base domain", self.kind)))
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

fn get<'a>(spec: &'a DomainSpec, key: &str) -> Option<&'a Value> {
    spec.params.get(key)
}

fn num(spec: &DomainSpec, key: &str, default: Option<f64>) -> Result<f64> {
    match get(spec, key) {
        Some(v) => v
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| bad(format!("{}: `{key}` must be a finite number", spec.kind))),
        None => default.ok_or_else(|| bad(format!("{}: missing `{key}`", spec.kind))),
    }
}

fn uint(spec: &DomainSpec, key: &str, default: Option<usize>) -> Result<usize> {
    match get(spec, key) {
        Some(v) => v
            .as_u64()
            .map(|u| u as usize)
            .ok_or_else(|| bad(format!("{}: `{key}` must be a nonnegative integer", spec.kind))),
        None => default.ok_or_else(|| bad(format!("{}: missing `{key}`", spec.kind))),
    }
}

fn to_vec(v: &Value, what: &str) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad(format!("{what} must be an array of numbers")))?;
    arr.iter()
        .map(|c| {
            c.as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(format!("{what} has a non-finite entry")))
        })
        .collect()
}

fn vector(spec: &DomainSpec, key: &str) -> Result<Vec<f64>> {
    let v = get(spec, key).ok_or_else(|| bad(format!("{}: missing `{key}`", spec.kind)))?;
    let out = to_vec(v, key)?;
    if out.len() < 2 {
        return Err(bad(format!("{}: `{key}` needs dimension >= 2", spec.kind)));
    }
    Ok(out)
}

fn planar_points(v: &Value, what: &str) -> Result<Vec<[f64; 2]>> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad(format!("{what} must be a list of points")))?;
    arr.iter()
        .map(|p| {
            let c = to_vec(p, what)?;
            if c.len() != 2 {
                return Err(bad(format!("{what}: planar points need 2 coordinates")));
            }
            Ok([c[0], c[1]])
        })
        .collect()
}

fn positive(kind: &str, what: &str, x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(bad(format!("{kind}: {what} must be positive")))
    }
}

/// Vertices of the union of `D_m = {|x| < 1/(1+log m), 0 < y < m e / 10}`, `m = 1..=m_max`.
pub fn staircase_vertices(m_max: usize) -> Vec<[f64; 2]> {
    let w = |m: usize| 1.0 / (1.0 + (m as f64).ln());
    let h = |m: usize| m as f64 * std::f64::consts::E / 10.0;
    let mut v = Vec::with_capacity(4 * m_max);
    for m in 1..=m_max {
        v.push([w(m), h(m - 1)]);
        v.push([w(m), h(m)]);
    }
    for m in (1..=m_max).rev() {
        v.push([-w(m), h(m)]);
        v.push([-w(m), h(m - 1)]);
    }
    v
}

/// Removed points of the comb example: `P_0^n ∪ ... ∪ P_k^n` inside `(-1, 1)²`.
pub fn comb_points(k: usize, n: usize) -> Vec<Vec<f64>> {
    let e = 0.5f64.powi(n as i32);
    let mut pts = vec![vec![0.0, e], vec![0.0, -e], vec![e, 0.0], vec![-e, 0.0]];
    for m in 1..=k {
        let s = 1.0 - 0.5f64.powi(m as i32);
        pts.push(vec![s, s + e]);
        pts.push(vec![s, s - e]);
        pts.push(vec![s + e, s]);
        pts.push(vec![s - e, s]);
    }
    pts
}

/// Closed-form structure available to the metric layer.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Ball { center: Vec<f64>, radius: f64 },
    HalfSpace { axis: usize },
    General,
}

pub(crate) fn build(spec: &DomainSpec) -> Result<(Region, Model)> {
    let kind = spec.kind.as_str();
    let general = |r: Region| Ok((r, Model::General));
    match kind {
        "ball" => {
            let center = vector(spec, "center")?;
            let radius = positive(kind, "radius", num(spec, "radius", None)?)?;
            Ok((
                Region::Interior(Shape::Ball {
                    center: center.clone(),
                    radius,
                }),
                Model::Ball { center, radius },
            ))
        }
        "half_space" => {
            let dim = uint(spec, "dim", Some(2))?;
            if dim < 2 {
                return Err(bad("half_space: dim must be >= 2"));
            }
            Ok((
                Region::Interior(Shape::HalfSpace {
                    dim,
                    axis: dim - 1,
                }),
                Model::HalfSpace { axis: dim - 1 },
            ))
        }
        "punctured_space" => {
            let at = match get(spec, "center") {
                Some(_) => vector(spec, "center")?,
                None => vec![0.0; uint(spec, "dim", Some(2))?.max(2)],
            };
            general(Region::Exterior(Shape::Point { at }))
        }
        "complement_closed_ball" => {
            let center = vector(spec, "center")?;
            let radius = positive(kind, "radius", num(spec, "radius", None)?)?;
            general(Region::Exterior(Shape::Ball { center, radius }))
        }
        "complement" => {
            let (base, _) = build(spec.base_spec()?)?;
            match base {
                Region::Interior(Shape::Annulus { .. }) => {
                    Err(bad("complement: the complement of an annulus is disconnected"))
                }
                Region::Interior(s) => general(Region::Exterior(s)),
                _ => Err(bad("complement: base must be a plain catalog shape")),
            }
        }
        "exp_cusp_complement" => {
            let (base, _) = build(&DomainSpec {
                kind: "exp_cusp".into(),
                params: spec.params.clone(),
                base: None,
            })?;
            match base {
                Region::Interior(s) => general(Region::Exterior(s)),
                _ => unreachable!("exp_cusp builds an interior region"),
            }
        }
        _ => general(build_plain(spec)?),
    }
}

fn build_plain(spec: &DomainSpec) -> Result<Region> {
    let kind = spec.kind.as_str();
    match kind {
        "half_strip" => {
            let half_width = positive(kind, "half_width", num(spec, "half_width", Some(1.0))?)?;
            Ok(Region::Interior(Shape::HalfStrip { half_width }))
        }
        "exp_cusp" => {
            let offset = num(spec, "offset", Some(1.0))?;
            let rate = positive(kind, "rate", num(spec, "rate", Some(1.0))?)?;
            Ok(Region::Interior(Shape::ExpCusp(ExpCusp { offset, rate })))
        }
        "rectangle" => {
            let lo = vector(spec, "lo")?;
            let hi = vector(spec, "hi")?;
            if lo.len() != hi.len() {
                return Err(Error::DimensionMismatch {
                    expected: lo.len(),
                    got: hi.len(),
                });
            }
            if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
                return Err(bad("rectangle: need lo < hi in every coordinate"));
            }
            Ok(Region::Interior(Shape::Box { lo, hi }))
        }
        "polygon" => {
            let v = get(spec, "vertices").ok_or_else(|| bad("polygon: missing `vertices`"))?;
            let poly = Polygon::new(planar_points(v, "vertices")?).map_err(bad)?;
            Ok(Region::Interior(Shape::Polygon(poly)))
        }
        "polygon_union" => {
            let m_max = uint(spec, "m_max", Some(8))?;
            if m_max == 0 {
                return Err(bad("polygon_union: m_max must be >= 1"));
            }
            let poly = Polygon::new(staircase_vertices(m_max)).map_err(bad)?;
            Ok(Region::Interior(Shape::Polygon(poly)))
        }
        "annulus" => {
            let center = vector(spec, "center")?;
            let inner = num(spec, "r_inner", None)?;
            let outer = num(spec, "r_outer", None)?;
            if !(inner >= 0.0 && outer > inner) {
                return Err(bad("annulus: need 0 <= r_inner < r_outer"));
            }
            Ok(Region::Interior(Shape::Annulus {
                center,
                inner,
                outer,
            }))
        }
        "revolved_triangle" => {
            let v = match get(spec, "vertices") {
                Some(v) => planar_points(v, "vertices")?,
                None => vec![[1.0, -1.0], [0.0, 0.0], [1.0, 1.0]],
            };
            if v.iter().any(|p| p[0] < 0.0) {
                return Err(bad("revolved_triangle: radial coordinates must be >= 0"));
            }
            let axis = uint(spec, "axis", Some(1))?;
            if axis > 2 {
                return Err(bad("revolved_triangle: axis must be 0, 1 or 2"));
            }
            let section = Polygon::new(v).map_err(bad)?;
            Ok(Region::Interior(Shape::Revolved {
                section,
                axis,
                dim: 3,
            }))
        }
        "comb_square" => {
            let k = uint(spec, "k", Some(6))?;
            let n = uint(spec, "n", Some(k + 2))?;
            if n < k + 1 || n > 60 {
                return Err(bad("comb_square: need k + 1 <= n <= 60"));
            }
            let base = Region::Interior(Shape::Box {
                lo: vec![-1.0, -1.0],
                hi: vec![1.0, 1.0],
            });
            let obstacles = comb_points(k, n).into_iter().map(Obstacle::Point).collect();
            removal(base, obstacles)
        }
        "remove_points" => {
            let (base, _) = build(spec.base_spec()?)?;
            let v = get(spec, "points").ok_or_else(|| bad("remove_points: missing `points`"))?;
            let arr = v
                .as_array()
                .ok_or_else(|| bad("remove_points: `points` must be a list"))?;
            let pts = arr
                .iter()
                .map(|p| to_vec(p, "points").map(Obstacle::Point))
                .collect::<Result<Vec<_>>>()?;
            removal(base, pts)
        }
        "remove_closed_ball" => {
            let (base, _) = build(spec.base_spec()?)?;
            let center = vector(spec, "center")?;
            let radius = positive(kind, "radius", num(spec, "radius", None)?)?;
            removal(base, vec![Obstacle::ClosedBall { center, radius }])
        }
        "remove_polygon_set" => {
            let (base, _) = build(spec.base_spec()?)?;
            let v = get(spec, "polygons")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("remove_polygon_set: missing `polygons` list"))?;
            let polys = v
                .iter()
                .map(|p| {
                    planar_points(p, "polygons")
                        .and_then(|pts| Polygon::new(pts).map_err(bad))
                        .map(Obstacle::Polygon)
                })
                .collect::<Result<Vec<_>>>()?;
            removal(base, polys)
        }
        other => Err(bad(format!("unknown kind `{other}`"))),
    }
}

fn removal(base: Region, obstacles: Vec<Obstacle>) -> Result<Region> {
    let n = base.dim();
    if obstacles.is_empty() {
        return Err(bad("removal needs at least one obstacle"));
    }
    for o in &obstacles {
        match o {
            Obstacle::Point(p) => {
                check_dim(n, p.len())?;
                if base.sdf(p) <= 0.0 {
                    return Err(bad("removed point is not inside the base domain"));
                }
            }
            Obstacle::ClosedBall { center, radius } => {
                check_dim(n, center.len())?;
                if base.sdf(center) <= *radius {
                    return Err(bad("removed ball is not strictly inside the base domain"));
                }
            }
            Obstacle::Polygon(poly) => {
                check_dim(n, 2)?;
                let v = &poly.vertices;
                for i in 0..v.len() {
                    let (a, b) = (v[i], v[(i + 1) % v.len()]);
                    if !super::segment_certified(&|x: &[f64]| base.sdf(x), &a, &b) {
                        return Err(bad("removed polygon is not strictly inside the base domain"));
                    }
                }
            }
        }
    }
    Ok(Region::Removal {
        base: Box::new(base),
        obstacles,
    })
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}
