//! Seeded, splittable random streams.
//!
//! Stream `(seed, index)` is a xoshiro256** generator whose 256-bit state is
//! filled by SplitMix64 started at `mix(seed) ^ index`, where
//!
//! ```text
//! splitmix64(z):  z += 0x9E3779B97F4A7C15
//!                 z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!                 z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!                 return z ^ (z >> 31)
//! mix(seed)    =  splitmix64(seed)
//! ```
//!
//! (all arithmetic wrapping mod 2^64). The state words are four successive
//! SplitMix64 outputs, as in `Xoshiro256StarStar::seed_from_u64`. Each step is
//!
//! ```text
//! result = rotl(s1 * 5, 7) * 9
//! t = s1 << 17
//! s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
//! ```
//!
//! A uniform double in [0, 1) is `(next_u64() >> 11) * 2^-53`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

pub struct Stream(Xoshiro256StarStar);

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Stream {
    pub fn new(seed: u64, index: u64) -> Self {
        Stream(Xoshiro256StarStar::seed_from_u64(splitmix64(seed) ^ index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
}

/// Uniform double in [0, 1) from the top 53 bits.
pub fn uniform(s: &mut Stream) -> f64 {
    (s.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform double in [a, b).
pub fn uniform_in(s: &mut Stream, a: f64, b: f64) -> f64 {
    a + (b - a) * uniform(s)
}

/// Uniform point in the open unit ball of Rⁿ scaled by `radius`, by rejection from the cube.
pub fn in_ball(s: &mut Stream, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| uniform_in(s, -1.0, 1.0)).collect();
        let r2: f64 = v.iter().map(|c| c * c).sum();
        if r2 < 1.0 {
            return v.into_iter().map(|c| c * radius).collect();
        }
    }
}

/// Uniform unit vector in Rⁿ.
pub fn on_sphere(s: &mut Stream, n: usize) -> Vec<f64> {
    loop {
        let v = in_ball(s, n, 1.0);
        let r = crate::vecmath::norm(&v);
        if r > 1e-3 {
            return v.into_iter().map(|c| c / r).collect();
        }
    }
}
