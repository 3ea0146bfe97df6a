//! Boundary-adapted quadtree/octree node sets and a lazily expanded graph on them.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;

use crate::closed_form::j_formula;
use crate::geometry::{Aabb, DomainOracle};
use crate::vecmath::{dist, lerp};

/// Maximum subdivision depth of the root cube.
const DMAX: u32 = 44;
const DEAD: u32 = u32::MAX;

type Key = [i64; 3];

/// Offsets with max-norm ≤ 2 and coprime components: the 16 planar moves.
const STENCIL_2D: [Key; 16] = [
    [1, 0, 0],
    [-1, 0, 0],
    [0, 1, 0],
    [0, -1, 0],
    [1, 1, 0],
    [1, -1, 0],
    [-1, 1, 0],
    [-1, -1, 0],
    [1, 2, 0],
    [1, -2, 0],
    [-1, 2, 0],
    [-1, -2, 0],
    [2, 1, 0],
    [2, -1, 0],
    [-2, 1, 0],
    [-2, -1, 0],
];

fn stencil_3d() -> Vec<Key> {
    let mut out = Vec::new();
    for a in -2i64..=2 {
        for b in -2i64..=2 {
            for c in -2i64..=2 {
                let m = a.abs().max(b.abs()).max(c.abs());
                let twos = [a, b, c].iter().filter(|v| v.abs() == 2).count();
                let ones = [a, b, c].iter().filter(|v| v.abs() == 1).count();
                // 26 neighbours plus knight moves (one ±2, one ±1, one 0).
                if m == 1 || (twos == 1 && ones == 1) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

/// Spacing schedule for one refinement level.
#[derive(Clone, Debug)]
pub(crate) struct MeshParams {
    /// Largest cell size.
    pub h: f64,
    /// Cells near a point with distance δ are refined to size `rel δ`.
    pub rel: f64,
    /// Absolute minimum cell size.
    pub floor_abs: f64,
    /// Minimum cell size grows like `floor_rel` times the distance to the nearer endpoint.
    pub floor_rel: f64,
    /// Drop everything with `j(x,z) + j(z,y)` above this.
    pub cap: f64,
    pub max_nodes: usize,
}

impl MeshParams {
    fn target(&self, delta: f64, d_end: f64) -> f64 {
        (self.rel * delta)
            .min(self.h)
            .max(self.floor_abs)
            .max(self.floor_rel * d_end)
    }
}

/// A boundary-adapted node set over a cube; edges are generated on demand.
///
/// Nodes are corners of the leaf cells of a quadtree (octree in 3D) whose cells
/// are refined until their size is at most `min(h, rel δ)`, subject to a floor
/// that keeps the count finite near the boundary. Edges join a node to nodes at
/// stencil offsets scaled by half, one and two times its local spacing; an edge
/// is present when its segment is covered by the two balls `B(p, δ(p))` and
/// `B(q, δ(q))`.
#[derive(Clone, Debug)]
pub struct MeshGraph {
    dim: usize,
    origin: Vec<f64>,
    unit: f64,
    coords: Vec<f64>,
    delta: Vec<f64>,
    keys: Vec<Key>,
    span: Vec<i64>,
    index: FxHashMap<Key, u32>,
    stencil: Vec<Key>,
    resolution: f64,
    region: Aabb,
}

pub(crate) struct Ends<'a> {
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub dx: f64,
    pub dy: f64,
}

impl Ends<'_> {
    /// Lower bound for `j(x,z) + j(z,y)` over a ball `B(c, r)`.
    fn ellipse_lower(&self, c: &[f64], r: f64) -> f64 {
        let a = (dist(self.x, c) - r).max(0.0);
        let b = (dist(self.y, c) - r).max(0.0);
        (a / self.dx).ln_1p() + (b / self.dy).ln_1p()
    }

    fn ellipse(&self, z: &[f64], dz: f64) -> f64 {
        j_formula(dist(self.x, z), self.dx, dz) + j_formula(dist(self.y, z), self.dy, dz)
    }
}

/// Outcome of a mesh build that ran past the node budget.
pub(crate) struct OverBudget(pub usize);

impl MeshGraph {
    pub(crate) fn build(
        oracle: &DomainOracle,
        region: &Aabb,
        p: &MeshParams,
        ends: &Ends,
    ) -> Result<MeshGraph, OverBudget> {
        let dim = oracle.dim();
        let side = region.max_side();
        let origin = region.lo.clone();
        let unit = side / (1u64 << DMAX) as f64;
        let stencil = if dim == 2 {
            STENCIL_2D.to_vec()
        } else {
            stencil_3d()
        };
        let mut g = MeshGraph {
            dim,
            origin,
            unit,
            coords: Vec::new(),
            delta: Vec::new(),
            keys: Vec::new(),
            span: Vec::new(),
            index: FxHashMap::default(),
            stencil,
            resolution: p.h,
            region: Aabb::cube(&region.center(), side / 2.0),
        };
        let half_diag = (dim as f64).sqrt() / 2.0;
        let mut stack: Vec<(Key, u32)> = vec![([0; 3], 0)];
        let mut c = vec![0.0; dim];
        while let Some((key, depth)) = stack.pop() {
            let su = 1i64 << (DMAX - depth);
            let s = side / (1u64 << depth) as f64;
            for k in 0..dim {
                c[k] = g.origin[k] + (key[k] as f64 + su as f64 / 2.0) * unit;
            }
            let r = s * half_diag;
            let sd = oracle.signed_distance(&c);
            if sd <= -r || ends.ellipse_lower(&c, r) > p.cap {
                continue;
            }
            let d_end = dist(&c, ends.x).min(dist(&c, ends.y));
            let want = p.target(sd.max(0.0), (d_end - r).max(0.0));
            if s > want && depth < DMAX {
                let hs = su / 2;
                for m in 0..(1usize << dim) {
                    let mut child = key;
                    for (k, ck) in child.iter_mut().enumerate().take(dim) {
                        if m >> k & 1 == 1 {
                            *ck += hs;
                        }
                    }
                    stack.push((child, depth + 1));
                }
            } else {
                g.add_corners(oracle, key, su, p.cap, ends);
                if g.keys.len() > p.max_nodes {
                    return Err(OverBudget(g.keys.len()));
                }
            }
        }
        Ok(g)
    }

    fn add_corners(&mut self, oracle: &DomainOracle, key: Key, su: i64, cap: f64, ends: &Ends) {
        let mut z = vec![0.0; self.dim];
        for m in 0..(1usize << self.dim) {
            let mut k = key;
            for (i, ki) in k.iter_mut().enumerate().take(self.dim) {
                if m >> i & 1 == 1 {
                    *ki += su;
                }
            }
            if let Some(&idx) = self.index.get(&k) {
                if idx != DEAD {
                    let sp = &mut self.span[idx as usize];
                    *sp = (*sp).min(su);
                }
                continue;
            }
            for i in 0..self.dim {
                z[i] = self.origin[i] + k[i] as f64 * self.unit;
            }
            let d = oracle.delta_at(&z);
            if d <= 0.0 || ends.ellipse(&z, d) > cap {
                self.index.insert(k, DEAD);
                continue;
            }
            self.index.insert(k, self.keys.len() as u32);
            self.keys.push(k);
            self.span.push(su);
            self.coords.extend_from_slice(&z);
            self.delta.push(d);
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn node_delta(&self, i: usize) -> f64 {
        self.delta[i]
    }

    /// Local spacing at node `i`: the smallest leaf cell having it as a corner.
    pub fn spacing(&self, i: usize) -> f64 {
        self.span[i] as f64 * self.unit
    }

    /// Largest cell size of this level.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// The cube the mesh was built on.
    pub fn region(&self) -> &Aabb {
        &self.region
    }

    /// Candidate neighbours of `i` (stencil offsets at half, one and two spacings).
    pub fn candidates(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let sp = self.span[i];
        let base = self.keys[i];
        for scale in [sp / 2, sp, 2 * sp] {
            if scale == 0 {
                continue;
            }
            for o in &self.stencil {
                let mut k = base;
                for d in 0..self.dim {
                    k[d] += scale * o[d];
                }
                if let Some(&j) = self.index.get(&k) {
                    if j != DEAD {
                        out.push(j as usize);
                    }
                }
            }
        }
        out
    }

    /// Neighbours of `i` with their edge weights.
    pub fn neighbours(&self, oracle: &DomainOracle, i: usize) -> Vec<(usize, f64)> {
        self.candidates(i)
            .into_iter()
            .filter_map(|j| {
                edge_weight(oracle, self.node(i), self.delta[i], self.node(j), self.delta[j])
                    .map(|w| (j, w))
            })
            .collect()
    }
}

/// Three-point Simpson estimate of the k-length of `[p, q]`, raised to `j(p, q)`;
/// `None` unless the segment is covered by `B(p, δp) ∪ B(q, δq)`.
pub(crate) fn edge_weight(oracle: &DomainOracle, p: &[f64], dp: f64, q: &[f64], dq: f64) -> Option<f64> {
    let l = dist(p, q);
    if l >= dp + dq {
        return None;
    }
    let dm = oracle.delta_at(&lerp(p, q, 0.5));
    if dm <= 0.0 {
        return None;
    }
    let simpson = l / 6.0 * (1.0 / dp + 4.0 / dm + 1.0 / dq);
    Some(simpson.max(j_formula(l, dp, dq)))
}

#[derive(PartialEq)]
struct Entry {
    f: f64,
    idx: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        // Min-heap on f, then on node index.
        o.f.total_cmp(&self.f).then_with(|| o.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Nodes within `radius` of `z`, closest first.
fn near(mesh: &MeshGraph, z: &[f64], radius: f64) -> Vec<usize> {
    let mut v: Vec<(f64, usize)> = (0..mesh.len())
        .filter_map(|i| {
            let d = dist(mesh.node(i), z);
            (d <= radius).then_some((d, i))
        })
        .collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    v.into_iter().map(|(_, i)| i).collect()
}

fn attach(mesh: &MeshGraph, oracle: &DomainOracle, z: &[f64], dz: f64, sigma: f64) -> Vec<(usize, f64)> {
    let mut radius = 3.0 * sigma;
    for _ in 0..6 {
        let e: Vec<(usize, f64)> = near(mesh, z, radius)
            .into_iter()
            .filter_map(|i| edge_weight(oracle, z, dz, mesh.node(i), mesh.delta[i]).map(|w| (i, w)))
            .collect();
        if !e.is_empty() {
            return e;
        }
        radius *= 2.0;
    }
    Vec::new()
}

/// Shortest x→y path through the mesh with total weight at most `cap`, as a
/// polyline including both endpoints.
///
/// A* with the heuristic `j(z, y)`, which is consistent because every edge weight
/// is at least the j-distance of its endpoints.
pub(crate) fn shortest_path(
    mesh: &MeshGraph,
    oracle: &DomainOracle,
    ends: &Ends,
    sigma: (f64, f64),
    cap: f64,
) -> Option<(f64, Vec<Vec<f64>>)> {
    let n = mesh.len();
    if n == 0 {
        return None;
    }
    let (start, goal) = (n, n + 1);
    let from_x = attach(mesh, oracle, ends.x, ends.dx, sigma.0);
    let to_y: FxHashMap<usize, f64> = attach(mesh, oracle, ends.y, ends.dy, sigma.1).into_iter().collect();
    if from_x.is_empty() || to_y.is_empty() {
        return None;
    }
    let h = |i: usize| j_formula(dist(mesh.node(i), ends.y), mesh.delta[i], ends.dy);
    let mut g = vec![f64::INFINITY; n + 2];
    let mut parent = vec![usize::MAX; n + 2];
    let mut done = vec![false; n + 2];
    let mut heap = BinaryHeap::new();
    g[start] = 0.0;
    heap.push(Entry { f: 0.0, idx: start });
    while let Some(Entry { idx, .. }) = heap.pop() {
        if done[idx] {
            continue;
        }
        done[idx] = true;
        if idx == goal {
            break;
        }
        let edges = if idx == start {
            from_x.clone()
        } else {
            let mut e = mesh.neighbours(oracle, idx);
            if let Some(&w) = to_y.get(&idx) {
                e.push((goal, w));
            }
            e
        };
        for (j, w) in edges {
            if done[j] {
                continue;
            }
            let ng = g[idx] + w;
            let hj = if j == goal { 0.0 } else { h(j) };
            if ng + hj > cap || ng >= g[j] {
                continue;
            }
            g[j] = ng;
            parent[j] = idx;
            heap.push(Entry { f: ng + hj, idx: j });
        }
    }
    if !done[goal] {
        return None;
    }
    let mut path = vec![ends.y.to_vec()];
    let mut cur = parent[goal];
    while cur != start {
        path.push(mesh.node(cur).to_vec());
        cur = parent[cur];
    }
    path.push(ends.x.to_vec());
    path.reverse();
    Some((g[goal], path))
}
