//! Small helpers on coordinate slices.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Euclidean length of the vector with components `c`, rescaled when the
/// plain sum of squares under- or overflows.
#[inline]
fn length(c: impl Iterator<Item = f64> + Clone) -> f64 {
    let s: f64 = c.clone().map(|v| v * v).sum();
    if s >= f64::MIN_POSITIVE && s.is_finite() {
        return s.sqrt();
    }
    let m = c.clone().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 || !m.is_finite() {
        return if s.is_nan() { s } else { m };
    }
    m * c.map(|v| (v / m) * (v / m)).sum::<f64>().sqrt()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    length(a.iter().copied())
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    length(a.iter().zip(b).map(|(p, q)| p - q))
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(p, q)| p - q).collect()
}

#[inline]
pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(p, q)| p + q).collect()
}

#[inline]
pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|p| p * s).collect()
}

/// `a + t (b - a)`.
#[inline]
pub fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect()
}

#[inline]
pub fn lerp_into(a: &[f64], b: &[f64], t: f64, out: &mut [f64]) {
    for ((o, p), q) in out.iter_mut().zip(a).zip(b) {
        *o = p + t * (q - p);
    }
}
