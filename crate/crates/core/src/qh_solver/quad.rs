//! Quadrature of the quasihyperbolic density `1/δ` along straight segments.

use crate::geometry::DomainOracle;
use crate::vecmath::{dist, lerp_into};

/// Absolute tolerance for reported segment lengths.
pub const ABS_TOL: f64 = 1e-11;
const MAX_DEPTH: u32 = 48;

struct Seg<'a> {
    oracle: &'a DomainOracle,
    a: &'a [f64],
    b: &'a [f64],
    len: f64,
    /// Largest coordinate magnitude on the segment.
    scale: f64,
    buf: Vec<f64>,
}

impl Seg<'_> {
    /// `len / δ(a + s (b - a))`; infinite outside the domain.
    fn g(&mut self, s: f64) -> f64 {
        lerp_into(self.a, self.b, s, &mut self.buf);
        let d = self.oracle.delta_at(&self.buf);
        if d > 0.0 {
            self.len / d
        } else {
            f64::INFINITY
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn simpson(&mut self, lo: f64, hi: f64, flo: f64, fmid: f64, fhi: f64, whole: f64, eps: f64, depth: u32) -> f64 {
        let mid = 0.5 * (lo + hi);
        let (lm, rm) = (0.5 * (lo + mid), 0.5 * (mid + hi));
        let (flm, frm) = (self.g(lm), self.g(rm));
        let w = (hi - lo) / 12.0;
        let left = w * (flo + 4.0 * flm + fmid);
        let right = w * (fmid + 4.0 * frm + fhi);
        let diff = left + right - whole;
        if !diff.is_finite() {
            return f64::INFINITY;
        }
        // Sample points are rounded to ulp(scale), so δ and hence g carry relative
        // noise near `scale * g / len` ulps; below that, halving eps never terminates.
        let gmax = flo.max(fmid).max(fhi).max(flm).max(frm);
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs()) * (1.0 + self.scale * gmax / self.len);
        if depth >= MAX_DEPTH || (depth >= 1 && diff.abs() <= (15.0 * eps).max(floor)) {
            return left + right + diff / 15.0;
        }
        self.simpson(lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1)
            + self.simpson(mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1)
    }
}

/// Adaptive Simpson estimate of `∫_[a,b] |dz| / δ(z)` with absolute tolerance `eps`.
///
/// Does not check that the segment stays inside the domain; returns infinity
/// if a sample point falls outside.
pub fn k_length_raw(oracle: &DomainOracle, a: &[f64], b: &[f64], eps: f64) -> f64 {
    let len = dist(a, b);
    if len == 0.0 {
        return 0.0;
    }
    let mut s = Seg {
        oracle,
        a,
        b,
        len,
        scale: a.iter().chain(b).fold(0.0, |m, v| m.max(v.abs())),
        buf: vec![0.0; a.len()],
    };
    let (f0, fm, f1) = (s.g(0.0), s.g(0.5), s.g(1.0));
    let whole = (f0 + 4.0 * fm + f1) / 6.0;
    if !whole.is_finite() {
        return f64::INFINITY;
    }
    s.simpson(0.0, 1.0, f0, fm, f1, whole, eps, 0)
}

/// Accurate length used for every reported value.
pub fn k_length(oracle: &DomainOracle, a: &[f64], b: &[f64]) -> f64 {
    k_length_raw(oracle, a, b, ABS_TOL)
}

/// Five-point Gauss-Legendre rule on `[a, b]`, smooth in the endpoints; used
/// inside the path optimizer where segments are short compared with δ.
pub fn k_length_gauss(oracle: &DomainOracle, a: &[f64], b: &[f64], buf: &mut [f64]) -> f64 {
    const X: [f64; 5] = [
        0.046_910_077_030_668_0,
        0.230_765_344_947_158_45,
        0.5,
        0.769_234_655_052_841_6,
        0.953_089_922_969_332,
    ];
    const W: [f64; 5] = [
        0.118_463_442_528_094_54,
        0.239_314_335_249_683_23,
        0.284_444_444_444_444_44,
        0.239_314_335_249_683_23,
        0.118_463_442_528_094_54,
    ];
    let len = dist(a, b);
    if len == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for (x, w) in X.iter().zip(W) {
        lerp_into(a, b, *x, buf);
        let d = oracle.delta_at(buf);
        if d <= 0.0 {
            return f64::INFINITY;
        }
        acc += w / d;
    }
    acc * len
}
