//! Primitive sets and their exact signed distance functions.
//!
//! Convention: `sdf(x) > 0` inside the open set and equals the distance to
//! the boundary; `sdf(x) <= 0` outside and `-sdf(x)` is the distance to the
//! closure.

use crate::vecmath::{dist, norm, sub};

/// Distance from `p` to the segment `[a, b]` in the plane.
pub fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
    let (px, py) = (p[0] - a[0], p[1] - a[1]);
    let len2 = ex * ex + ey * ey;
    let t = if len2 > 0.0 {
        ((px * ex + py * ey) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (dx, dy) = (px - t * ex, py - t * ey);
    dx.hypot(dy)
}

#[derive(Clone, Debug)]
pub struct Polygon {
    pub vertices: Vec<[f64; 2]>,
}

impl Polygon {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self, String> {
        if vertices.len() < 3 {
            return Err("polygon needs at least 3 vertices".into());
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err("polygon vertex not finite".into());
        }
        let poly = Polygon { vertices };
        if poly.signed_area().abs() <= 0.0 {
            return Err("polygon has zero area".into());
        }
        if poly.self_intersects() {
            return Err("polygon is not simple".into());
        }
        Ok(poly)
    }

    pub fn signed_area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        (0..n)
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % n]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum::<f64>()
            / 2.0
    }

    fn self_intersects(&self) -> bool {
        let v = &self.vertices;
        let n = v.len();
        let orient = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
            (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        };
        for i in 0..n {
            for j in (i + 1)..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = (v[i], v[(i + 1) % n]);
                let (c, d) = (v[j], v[(j + 1) % n]);
                let (o1, o2) = (orient(a, b, c), orient(a, b, d));
                let (o3, o4) = (orient(c, d, a), orient(c, d, b));
                if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
                    return true;
                }
                if segment_distance(c, a, b) == 0.0
                    || segment_distance(d, a, b) == 0.0
                    || segment_distance(a, c, d) == 0.0
                    || segment_distance(b, c, d) == 0.0
                {
                    return true;
                }
            }
        }
        false
    }

    pub fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        (0..n)
            .map(|i| segment_distance(p, v[i], v[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Even-odd crossing test; points on the boundary may land on either side.
    pub fn winds(&self, p: [f64; 2]) -> bool {
        let v = &self.vertices;
        let n = v.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (v[i], v[j]);
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    pub fn sdf(&self, p: [f64; 2]) -> f64 {
        let d = self.boundary_distance(p);
        if d > 0.0 && self.winds(p) {
            d
        } else {
            -d
        }
    }

    pub fn bbox(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }
}

/// `{(x, y) : x > 0, |y| < exp(-offset - rate x)}`.
#[derive(Clone, Debug)]
pub struct ExpCusp {
    pub offset: f64,
    pub rate: f64,
}

impl ExpCusp {
    #[inline]
    fn f(&self, t: f64) -> f64 {
        (-self.offset - self.rate * t).exp()
    }

    fn contains(&self, p: [f64; 2]) -> bool {
        p[0] > 0.0 && p[1].abs() < self.f(p[0])
    }

    /// Squared distance from `(px, py)` to the curve point at parameter `t`.
    #[inline]
    fn sq(&self, t: f64, px: f64, py: f64) -> f64 {
        let (dx, dy) = (t - px, self.f(t) - py);
        dx * dx + dy * dy
    }

    /// Half of the derivative of `sq` in `t`.
    #[inline]
    fn dsq(&self, t: f64, px: f64, py: f64) -> f64 {
        let f = self.f(t);
        (t - px) - self.rate * f * (f - py)
    }

    #[inline]
    fn ddsq(&self, t: f64, py: f64) -> f64 {
        let f = self.f(t);
        1.0 + self.rate * self.rate * f * (2.0 * f - py)
    }

    /// Distance to the curve `{(t, f(t)) : t >= 0}` from a point with `py >= 0`.
    fn curve_distance(&self, px: f64, py: f64) -> f64 {
        let t0 = px.max(0.0);
        let d0 = self.sq(t0, px, py).sqrt();
        let lo = (px - d0).max(0.0);
        let hi = (px + d0).max(lo);
        if hi <= lo {
            return d0;
        }
        let b2 = self.rate * self.rate;
        let best = if b2 * self.f(lo) * py < 1.0 {
            self.convex_min(lo, hi, px, py)
        } else {
            self.scan_min(lo, hi, px, py)
        };
        best.min(self.sq(t0, px, py)).sqrt()
    }

    /// Minimum of `sq` on `[lo, hi]` where it is strictly convex.
    fn convex_min(&self, mut lo: f64, mut hi: f64, px: f64, py: f64) -> f64 {
        if self.dsq(lo, px, py) >= 0.0 {
            return self.sq(lo, px, py);
        }
        if self.dsq(hi, px, py) <= 0.0 {
            return self.sq(hi, px, py);
        }
        let mut t = 0.5 * (lo + hi);
        for _ in 0..200 {
            let g = self.dsq(t, px, py);
            if g > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let h = self.ddsq(t, py);
            let newton = t - g / h;
            let next = if h > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - t).abs() <= 4.0 * f64::EPSILON * (1.0 + t.abs()) || hi - lo <= 0.0 {
                t = next;
                break;
            }
            t = next;
        }
        self.sq(t, px, py)
    }

    /// Global minimum of `sq` on `[lo, hi]` by sampling then golden-section refinement.
    fn scan_min(&self, lo: f64, hi: f64, px: f64, py: f64) -> f64 {
        const N: usize = 256;
        let step = (hi - lo) / N as f64;
        let vals: Vec<f64> = (0..=N)
            .map(|i| self.sq(lo + step * i as f64, px, py))
            .collect();
        let mut best = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        for i in 0..=N {
            let left = if i == 0 { f64::INFINITY } else { vals[i - 1] };
            let right = if i == N { f64::INFINITY } else { vals[i + 1] };
            if vals[i] <= left && vals[i] <= right {
                let a = lo + step * (i as f64 - 1.0).max(0.0);
                let b = (lo + step * (i as f64 + 1.0)).min(hi);
                best = best.min(self.golden(a, b, px, py));
            }
        }
        best
    }

    fn golden(&self, mut a: f64, mut b: f64, px: f64, py: f64) -> f64 {
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - r * (b - a);
        let mut d = a + r * (b - a);
        let (mut fc, mut fd) = (self.sq(c, px, py), self.sq(d, px, py));
        for _ in 0..120 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - r * (b - a);
                fc = self.sq(c, px, py);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + r * (b - a);
                fd = self.sq(d, px, py);
            }
        }
        fc.min(fd)
    }

    pub fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        let h = self.f(0.0);
        let curve = self.curve_distance(p[0], p[1].abs());
        let seg = segment_distance(p, [0.0, -h], [0.0, h]);
        curve.min(seg)
    }

    pub fn sdf(&self, p: [f64; 2]) -> f64 {
        let d = self.boundary_distance(p);
        if self.contains(p) {
            d
        } else {
            -d
        }
    }
}

#[derive(Clone, Debug)]
pub enum Shape {
    Ball { center: Vec<f64>, radius: f64 },
    /// `{x : x[axis] > 0}` in dimension `dim`.
    HalfSpace { dim: usize, axis: usize },
    /// A single point; it has empty interior and is only used through its complement.
    Point { at: Vec<f64> },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// `{x > 0, |y| < half_width}`.
    HalfStrip { half_width: f64 },
    ExpCusp(ExpCusp),
    Polygon(Polygon),
    Annulus { center: Vec<f64>, inner: f64, outer: f64 },
    /// A planar region in (radial, height) coordinates revolved about coordinate `axis`.
    Revolved { section: Polygon, axis: usize, dim: usize },
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Ball { center, .. } => center.len(),
            Shape::HalfSpace { dim, .. } => *dim,
            Shape::Point { at } => at.len(),
            Shape::Box { lo, .. } => lo.len(),
            Shape::HalfStrip { .. } | Shape::ExpCusp(_) | Shape::Polygon(_) => 2,
            Shape::Annulus { center, .. } => center.len(),
            Shape::Revolved { dim, .. } => *dim,
        }
    }

    pub fn sdf(&self, x: &[f64]) -> f64 {
        match self {
            Shape::Ball { center, radius } => radius - dist(x, center),
            Shape::HalfSpace { axis, .. } => x[*axis],
            Shape::Point { at } => -dist(x, at),
            Shape::Box { lo, hi } => {
                let mut inside = f64::INFINITY;
                let mut outside2 = 0.0;
                let mut out = false;
                for k in 0..lo.len() {
                    let q = (lo[k] - x[k]).max(x[k] - hi[k]);
                    if q >= 0.0 {
                        out = true;
                        outside2 += q * q;
                    } else {
                        inside = inside.min(-q);
                    }
                }
                if out {
                    -outside2.sqrt()
                } else {
                    inside
                }
            }
            Shape::HalfStrip { half_width } => {
                let (px, ay) = (x[0], x[1].abs());
                if px > 0.0 && ay < *half_width {
                    px.min(half_width - ay)
                } else {
                    let dx = (-px).max(0.0);
                    let dy = (ay - half_width).max(0.0);
                    -dx.hypot(dy)
                }
            }
            Shape::ExpCusp(c) => c.sdf([x[0], x[1]]),
            Shape::Polygon(p) => p.sdf([x[0], x[1]]),
            Shape::Annulus {
                center,
                inner,
                outer,
            } => {
                let r = dist(x, center);
                (r - inner).min(outer - r)
            }
            Shape::Revolved { section, axis, .. } => {
                let (rho, h) = radial_height(x, *axis);
                section.sdf([rho, h]).max(section.sdf([-rho, h]))
            }
        }
    }

    pub fn bbox(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            Shape::Ball { center, radius } => Some((
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            )),
            Shape::Box { lo, hi } => Some((lo.clone(), hi.clone())),
            Shape::Polygon(p) => {
                let (lo, hi) = p.bbox();
                Some((lo.to_vec(), hi.to_vec()))
            }
            Shape::Annulus { center, outer, .. } => Some((
                center.iter().map(|c| c - outer).collect(),
                center.iter().map(|c| c + outer).collect(),
            )),
            Shape::Revolved { section, axis, dim } => {
                let (lo2, hi2) = section.bbox();
                let rmax = lo2[0].abs().max(hi2[0].abs());
                let mut lo = vec![-rmax; *dim];
                let mut hi = vec![rmax; *dim];
                lo[*axis] = lo2[1];
                hi[*axis] = hi2[1];
                Some((lo, hi))
            }
            Shape::HalfSpace { .. }
            | Shape::Point { .. }
            | Shape::HalfStrip { .. }
            | Shape::ExpCusp(_) => None,
        }
    }
}

/// Radial distance from the coordinate axis and height along it.
pub fn radial_height(x: &[f64], axis: usize) -> (f64, f64) {
    let rho2: f64 = x
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != axis)
        .map(|(_, v)| v * v)
        .sum();
    (rho2.sqrt(), x[axis])
}

/// A closed set removed from a base domain.
#[derive(Clone, Debug)]
pub enum Obstacle {
    Point(Vec<f64>),
    ClosedBall { center: Vec<f64>, radius: f64 },
    Polygon(Polygon),
}

impl Obstacle {
    /// Distance to the obstacle outside it, nonpositive on it.
    pub fn clearance(&self, x: &[f64]) -> f64 {
        match self {
            Obstacle::Point(p) => dist(x, p),
            Obstacle::ClosedBall { center, radius } => norm(&sub(x, center)) - radius,
            Obstacle::Polygon(p) => -p.sdf([x[0], x[1]]),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Region {
    Interior(Shape),
    /// Complement of the closure of a shape.
    Exterior(Shape),
    Removal {
        base: Box<Region>,
        obstacles: Vec<Obstacle>,
    },
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Interior(s) | Region::Exterior(s) => s.dim(),
            Region::Removal { base, .. } => base.dim(),
        }
    }

    pub fn sdf(&self, x: &[f64]) -> f64 {
        match self {
            Region::Interior(s) => s.sdf(x),
            Region::Exterior(s) => -s.sdf(x),
            Region::Removal { base, obstacles } => obstacles
                .iter()
                .map(|o| o.clearance(x))
                .fold(base.sdf(x), f64::min),
        }
    }

    pub fn bbox(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            Region::Interior(s) => s.bbox(),
            Region::Exterior(_) => None,
            Region::Removal { base, .. } => base.bbox(),
        }
    }
}
