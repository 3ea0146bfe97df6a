//! Local improvement of polylines: shortcutting, subdivision and quasi-Newton descent.

use crate::geometry::DomainOracle;
use crate::vecmath::{dist, lerp};

use super::quad::{k_length, k_length_gauss, k_length_raw};

const MAX_VERTICES: usize = 1500;
const SHORTCUT_WINDOW: usize = 24;

fn valid(oracle: &DomainOracle, a: &[f64], b: &[f64]) -> bool {
    let (da, db) = (oracle.delta_at(a), oracle.delta_at(b));
    da > 0.0 && db > 0.0 && (dist(a, b) < da + db || oracle.segment_inside(a, b))
}

/// Accurate length of a polyline.
pub(crate) fn polyline_length(oracle: &DomainOracle, pts: &[Vec<f64>]) -> f64 {
    pts.windows(2).map(|w| k_length(oracle, &w[0], &w[1])).sum()
}


/// Greedy string pulling: replace runs of vertices by one chord when the chord
/// is inside and no longer.
fn shortcut(oracle: &DomainOracle, pts: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = pts.len();
    let seg: Vec<f64> = pts.windows(2).map(|w| k_length_raw(oracle, &w[0], &w[1], 1e-9)).collect();
    let mut out = vec![pts[0].clone()];
    let mut i = 0;
    while i + 1 < m {
        let mut best = i + 1;
        let mut run = seg[i];
        for j in i + 2..m.min(i + 2 + SHORTCUT_WINDOW) {
            run += seg[j - 1];
            if valid(oracle, &pts[i], &pts[j]) && k_length_raw(oracle, &pts[i], &pts[j], 1e-9) <= run {
                best = j;
            }
        }
        out.push(pts[best].clone());
        i = best;
    }
    out
}

/// Insert midpoints into segments longer than `frac` times the smaller endpoint δ.
fn subdivide(oracle: &DomainOracle, pts: &[Vec<f64>], frac: f64) -> Vec<Vec<f64>> {
    let mut out = vec![pts[0].clone()];
    for w in pts.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let m = oracle.delta_at(a).min(oracle.delta_at(b));
        let k = ((dist(a, b) / (frac * m)).ceil() as usize).clamp(1, 64);
        for s in 1..k {
            out.push(lerp(a, b, s as f64 / k as f64));
        }
        out.push(b.clone());
        if out.len() > MAX_VERTICES {
            break;
        }
    }
    if out.len() > MAX_VERTICES {
        return pts.to_vec();
    }
    out
}

/// Insert the midpoint of every segment.
fn subdivide_all(pts: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![pts[0].clone()];
    for w in pts.windows(2) {
        out.push(lerp(&w[0], &w[1], 0.5));
        out.push(w[1].clone());
    }
    out
}

fn total(oracle: &DomainOracle, pts: &[Vec<f64>], buf: &mut [f64]) -> f64 {
    pts.windows(2).map(|w| k_length_gauss(oracle, &w[0], &w[1], buf)).sum()
}

/// Central-difference gradient of the Gauss objective in the scaled variables.
fn gradient(oracle: &DomainOracle, pts: &[Vec<f64>], scale: &[f64], buf: &mut [f64]) -> Vec<f64> {
    let m = pts.len();
    let n = pts[0].len();
    let mut g = Vec::with_capacity((m - 2) * n);
    let mut v = vec![0.0; n];
    for i in 1..m - 1 {
        let h = 1e-6 * scale[i - 1];
        for k in 0..n {
            v.copy_from_slice(&pts[i]);
            v[k] += h;
            let fp = k_length_gauss(oracle, &pts[i - 1], &v, buf) + k_length_gauss(oracle, &v, &pts[i + 1], buf);
            v[k] -= 2.0 * h;
            let fm = k_length_gauss(oracle, &pts[i - 1], &v, buf) + k_length_gauss(oracle, &v, &pts[i + 1], buf);
            let d = (fp - fm) / (2.0 * h);
            g.push(if d.is_finite() { d * scale[i - 1] } else { 0.0 });
        }
    }
    g
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Move interior vertices by `alpha * dir` (scaled units); `None` if a segment leaves the domain.
fn moved(oracle: &DomainOracle, pts: &[Vec<f64>], scale: &[f64], dir: &[f64], alpha: f64) -> Option<Vec<Vec<f64>>> {
    let n = pts[0].len();
    let m = pts.len();
    let mut out = pts.to_vec();
    for i in 1..m - 1 {
        for k in 0..n {
            out[i][k] += alpha * scale[i - 1] * dir[(i - 1) * n + k];
        }
        if oracle.delta_at(&out[i]) <= 0.0 {
            return None;
        }
    }
    out.windows(2).all(|w| valid(oracle, &w[0], &w[1])).then_some(out)
}

/// L-BFGS on the interior vertices, with each vertex scaled by its initial δ.
fn optimize(oracle: &DomainOracle, pts: &mut Vec<Vec<f64>>, tol: f64) {
    const MEM: usize = 8;
    let m = pts.len();
    if m < 3 {
        return;
    }
    let mut buf = vec![0.0; pts[0].len()];
    let scale: Vec<f64> = pts[1..m - 1].iter().map(|v| oracle.delta_at(v)).collect();
    let mut f = total(oracle, pts, &mut buf);
    let mut g = gradient(oracle, pts, &scale, &mut buf);
    let mut hist: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    let mut quiet = 0;
    for iter in 0..400 {
        // Two-loop recursion.
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dotv(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = hist.last() {
            let gamma = dotv(s, y) / dotv(y, y);
            q.iter_mut().for_each(|qi| *qi *= gamma);
        }
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dotv(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dotv(&dir, &g);
        if slope >= 0.0 || !slope.is_finite() {
            hist.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = -dotv(&g, &g);
        }
        if slope == 0.0 {
            break;
        }
        let dmax = dir.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut alpha = if iter == 0 || hist.is_empty() { (0.1 / dmax).min(1.0) } else { 1.0 };
        let mut accepted = None;
        for _ in 0..40 {
            if let Some(cand) = moved(oracle, pts, &scale, &dir, alpha) {
                let fc = total(oracle, &cand, &mut buf);
                if fc <= f + 1e-4 * alpha * slope {
                    accepted = Some((cand, fc));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((cand, fc)) = accepted else { break };
        let gc = gradient(oracle, &cand, &scale, &mut buf);
        let s: Vec<f64> = dir.iter().map(|d| alpha * d).collect();
        let y: Vec<f64> = gc.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dotv(&s, &y);
        if sy > 1e-300 {
            if hist.len() == MEM {
                hist.remove(0);
            }
            hist.push((s, y, 1.0 / sy));
        }
        let gain = f - fc;
        *pts = cand;
        f = fc;
        g = gc;
        if gain < 1e-4 * tol {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
}

/// Improve a polyline from `x` to `y`; returns the best polyline seen and its
/// accurate length. Never returns something longer than the input.
pub(crate) fn smooth(oracle: &DomainOracle, pts: Vec<Vec<f64>>, tol: f64) -> (Vec<Vec<f64>>, f64) {
    let mut best_len = polyline_length(oracle, &pts);
    let mut best = pts;
    if best.len() < 3 {
        return (best, best_len);
    }
    let mut cur = subdivide(oracle, &shortcut(oracle, &best), 0.5);
    let mut prev = f64::INFINITY;
    for pass in 0..8 {
        if pass > 0 {
            if 2 * cur.len() > MAX_VERTICES {
                break;
            }
            cur = subdivide_all(&cur);
        }
        optimize(oracle, &mut cur, tol);
        let len = polyline_length(oracle, &cur);
        if len < best_len {
            best_len = len;
            best = cur.clone();
        }
        // Halving the segments cuts the discretization error about fourfold.
        if prev - len < tol / 4.0 {
            break;
        }
        prev = len;
    }
    (best, best_len)
}
