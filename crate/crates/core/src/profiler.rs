//! Empirical φ-uniformity: envelopes of k̂ against `|x-y|/min δ` or `j`,
//! uniformity constants and the divergent sequences of non-φ-uniform complements.
//!
//! Every envelope is a sup over finitely many samples and so underestimates the
//! true sup. Comparisons against theoretical upper bounds are sound in that
//! direction; none of this proves φ-uniformity.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::Modulus;
use crate::closed_form::j_formula;
use crate::error::{Error, Result};
use crate::geometry::{make_domain, sample_point, Aabb, DomainOracle, DomainSpec, Point};
use crate::qh_solver::{k_estimate, KEstimate, MethodChoice, SolverOptions};
use crate::rng::Stream;
use crate::vecmath::dist;

/// Default number of log-spaced bins.
pub const DEFAULT_BINS: usize = 40;
/// Pairs with `min δ` below this fraction of the region diameter are rejected.
pub const MIN_DELTA_FRACTION: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// `t = |x-y| / min(δ(x), δ(y))`, the argument of φ.
    Ratio,
    /// `t = j(x, y) = log(1 + ratio)`, the argument of ω.
    J,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Ratio => "ratio",
            Axis::J => "j",
        }
    }
}

/// One evaluated pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub ratio: f64,
    pub j: f64,
    pub k: f64,
}

impl PairSample {
    pub fn t(&self, axis: Axis) -> f64 {
        match axis {
            Axis::Ratio => self.ratio,
            Axis::J => self.j,
        }
    }
}

/// Outcome of sampling and evaluating pairs in a region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub samples: Vec<PairSample>,
    pub requested: u64,
    /// Pairs dropped because `min δ < 1e-6 · diam(region)`.
    pub rejected_small_delta: u64,
    /// Pairs with `x = y`.
    pub rejected_coincident: u64,
    /// Pairs where the solver did not reach `tol`.
    pub solver_failures: u64,
}

enum Outcome {
    Ok(PairSample),
    SmallDelta,
    Coincident,
    Failed,
}

/// Sample `pairs` pairs uniformly in `region ∩ G` and evaluate `k̂` on each.
/// Pair `i` uses stream `(seed, i)`.
pub fn phi_samples(oracle: &DomainOracle, pairs: u64, seed: u64, region: &Aabb, tol: f64) -> Result<SampleSet> {
    if pairs == 0 {
        return Err(Error::Usage("pairs must be positive".into()));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Usage(format!("tol must be positive, got {tol}")));
    }
    if region.dim() != oracle.dim() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            got: region.dim(),
        });
    }
    let floor = MIN_DELTA_FRACTION * region.diameter();
    let opts = SolverOptions::default();
    let out: Vec<Outcome> = (0..pairs)
        .into_par_iter()
        .map(|i| -> Result<Outcome> {
            let mut s = Stream::new(seed, i);
            let x = sample_point(oracle, region, &mut s)?;
            let y = sample_point(oracle, region, &mut s)?;
            let (dx, dy) = (oracle.delta_at(x.coords()), oracle.delta_at(y.coords()));
            if dx.min(dy) < floor {
                return Ok(Outcome::SmallDelta);
            }
            if x == y {
                return Ok(Outcome::Coincident);
            }
            Ok(match k_estimate(oracle, &x, &y, tol, &opts) {
                Ok(e) => {
                    let ratio = x.distance(&y) / dx.min(dy);
                    Outcome::Ok(PairSample {
                        ratio,
                        j: ratio.ln_1p(),
                        k: e.value,
                    })
                }
                Err(Error::BudgetExceeded(_)) => Outcome::Failed,
                Err(e) => return Err(e),
            })
        })
        .collect::<Result<_>>()?;
    let mut set = SampleSet {
        samples: Vec::new(),
        requested: pairs,
        rejected_small_delta: 0,
        rejected_coincident: 0,
        solver_failures: 0,
    };
    for o in out {
        match o {
            Outcome::Ok(p) => set.samples.push(p),
            Outcome::SmallDelta => set.rejected_small_delta += 1,
            Outcome::Coincident => set.rejected_coincident += 1,
            Outcome::Failed => set.solver_failures += 1,
        }
    }
    Ok(set)
}

/// `max { k : t_axis <= t }` over the samples, 0 when none qualifies.
pub fn empirical_sup(samples: &[PairSample], axis: Axis, t: f64) -> f64 {
    samples
        .iter()
        .filter(|p| p.t(axis) <= t)
        .map(|p| p.k)
        .fold(0.0, f64::max)
}

/// Binned envelope of k̂ along one axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiProfile {
    pub axis: Axis,
    /// `bins + 1` log-spaced edges covering the observed range of t.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Per-bin sup of k̂; `None` for an empty bin.
    pub raw_sup: Vec<Option<f64>>,
    /// Cumulative max of `raw_sup` from the left; `None` before the first nonempty bin.
    pub rectified_sup: Vec<Option<f64>>,
    /// Theorem-predicted modulus at each bin's upper edge, when one was attached.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted: Option<Vec<f64>>,
    pub accepted: u64,
    pub requested: u64,
    pub rejected_small_delta: u64,
    pub rejected_coincident: u64,
    pub solver_failures: u64,
    pub seed: u64,
    pub tol: f64,
    /// Always true: a finite-sample sup underestimates the true sup.
    pub lower_estimate: bool,
}

/// Bin a sample set along `axis` into `bins` log-spaced bins.
pub fn profile_from_samples(set: &SampleSet, axis: Axis, bins: usize, seed: u64, tol: f64) -> Result<PhiProfile> {
    if bins == 0 {
        return Err(Error::Usage("bins must be positive".into()));
    }
    if set.samples.is_empty() {
        return Err(Error::SamplingExhausted("no pair survived rejection".into()));
    }
    let (mut lo, mut hi) = set
        .samples
        .iter()
        .map(|p| p.t(axis))
        .fold((f64::INFINITY, 0.0f64), |(a, b), t| (a.min(t), b.max(t)));
    if hi <= lo {
        lo *= 0.5;
        hi *= 2.0;
    }
    let span = (hi / lo).ln();
    let bin_edges: Vec<f64> = (0..=bins)
        .map(|i| match i {
            0 => lo,
            i if i == bins => hi,
            i => lo * (span * i as f64 / bins as f64).exp(),
        })
        .collect();
    let mut counts = vec![0u64; bins];
    let mut raw_sup: Vec<Option<f64>> = vec![None; bins];
    for p in &set.samples {
        let t = p.t(axis);
        let mut b = (((t / lo).ln() / span) * bins as f64).floor() as usize;
        b = b.min(bins - 1);
        // keep the bin consistent with the stored edges under rounding
        while b > 0 && t < bin_edges[b] {
            b -= 1;
        }
        while b + 1 < bins && t >= bin_edges[b + 1] {
            b += 1;
        }
        counts[b] += 1;
        raw_sup[b] = Some(raw_sup[b].map_or(p.k, |s: f64| s.max(p.k)));
    }
    let mut run: Option<f64> = None;
    let rectified_sup = raw_sup
        .iter()
        .map(|r| {
            if let Some(v) = r {
                run = Some(run.map_or(*v, |s| s.max(*v)));
            }
            run
        })
        .collect();
    Ok(PhiProfile {
        axis,
        bin_edges,
        counts,
        raw_sup,
        rectified_sup,
        predicted: None,
        accepted: set.samples.len() as u64,
        requested: set.requested,
        rejected_small_delta: set.rejected_small_delta,
        rejected_coincident: set.rejected_coincident,
        solver_failures: set.solver_failures,
        seed,
        tol,
        lower_estimate: true,
    })
}

/// Sample pairs in `region`, evaluate k̂ and bin the sup along `axis`.
pub fn phi_envelope(
    oracle: &DomainOracle,
    pairs: u64,
    bins: usize,
    seed: u64,
    axis: Axis,
    region: &Aabb,
    tol: f64,
) -> Result<PhiProfile> {
    if bins == 0 {
        return Err(Error::Usage("bins must be positive".into()));
    }
    let set = phi_samples(oracle, pairs, seed, region, tol)?;
    profile_from_samples(&set, axis, bins, seed, tol)
}

impl PhiProfile {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Attach `predicted` evaluated at each bin's upper edge.
    pub fn with_predicted(mut self, phi: &Modulus) -> Self {
        self.predicted = Some(self.bin_edges[1..].iter().map(|t| phi.eval(*t)).collect());
        self
    }

    /// CSV with columns `bin_lo,bin_hi,count,sup_k,rectified_sup,predicted`; empty cells for missing values.
    pub fn to_csv(&self) -> String {
        let f = crate::report::fmt_f64;
        let opt = |v: Option<f64>| v.map(f).unwrap_or_default();
        let mut s = String::from("bin_lo,bin_hi,count,sup_k,rectified_sup,predicted\n");
        for b in 0..self.bins() {
            let pred = self.predicted.as_ref().map(|p| p[b]);
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                f(self.bin_edges[b]),
                f(self.bin_edges[b + 1]),
                self.counts[b],
                opt(self.raw_sup[b]),
                opt(self.rectified_sup[b]),
                opt(pred)
            ));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformityEstimate {
    /// `max k̂/j` over the evaluated pairs.
    pub c_hat: f64,
    pub pairs_used: u64,
    /// Pairs skipped because `j = 0`.
    pub skipped_zero_j: u64,
    pub rejected_small_delta: u64,
    pub solver_failures: u64,
    /// Always true: the true constant is at least `c_hat`.
    pub lower_estimate: bool,
}

/// Sampled lower estimate of the smallest `C` with `k <= C j`.
pub fn uniformity_constant(oracle: &DomainOracle, pairs: u64, seed: u64, region: &Aabb, tol: f64) -> Result<UniformityEstimate> {
    let set = phi_samples(oracle, pairs, seed, region, tol)?;
    let mut c_hat: f64 = 0.0;
    let (mut used, mut skipped) = (0, 0);
    for p in &set.samples {
        if p.j == 0.0 {
            skipped += 1;
            continue;
        }
        used += 1;
        c_hat = c_hat.max(p.k / p.j);
    }
    if used == 0 {
        return Err(Error::SamplingExhausted("no pair with positive j".into()));
    }
    Ok(UniformityEstimate {
        c_hat,
        pairs_used: used,
        skipped_zero_j: skipped + set.rejected_coincident,
        rejected_small_delta: set.rejected_small_delta,
        solver_failures: set.solver_failures,
        lower_estimate: true,
    })
}

/// Margin of one bin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinMargin {
    pub bin: usize,
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub envelope: f64,
    pub predicted: f64,
    /// `predicted - envelope`.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeComparison {
    pub bins: Vec<BinMargin>,
    /// Empty bins, reported and not failed.
    pub skipped_bins: Vec<usize>,
    pub worst_margin: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Compare a ratio-axis envelope with a predicted modulus bin by bin.
///
/// Every sample in a bin has `t <= bin_hi` and φ is increasing, so the
/// rectified sup is compared with `φ(bin_hi)`.
pub fn envelope_vs_theorem(profile: &PhiProfile, predicted: &Modulus, tol: f64) -> Result<EnvelopeComparison> {
    if profile.axis != Axis::Ratio {
        return Err(Error::AxisMismatch {
            expected: Axis::Ratio.name().into(),
            got: profile.axis.name().into(),
        });
    }
    predicted.validate()?;
    let mut bins = Vec::new();
    let mut skipped = Vec::new();
    for b in 0..profile.bins() {
        let (Some(env), true) = (profile.rectified_sup[b], profile.counts[b] > 0) else {
            skipped.push(b);
            continue;
        };
        let hi = profile.bin_edges[b + 1];
        let p = predicted.eval(hi);
        bins.push(BinMargin {
            bin: b,
            bin_lo: profile.bin_edges[b],
            bin_hi: hi,
            envelope: env,
            predicted: p,
            margin: p - env,
        });
    }
    let worst = bins.iter().map(|m| m.margin).fold(f64::INFINITY, f64::min);
    Ok(EnvelopeComparison {
        passed: bins.iter().all(|m| m.margin >= -tol),
        worst_margin: worst,
        bins,
        skipped_bins: skipped,
        tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Example {
    /// Complement of `{x > 0, |y| < 1}` with `z_n = (n,-2)`, `w_n = (n,2)`.
    HalfStrip,
    /// Complement of `{x > 0, |y| < exp(-1-x)}` with `z_n = (n,-e^-n)`, `w_n = (n,e^-n)`.
    ExpCusp,
    /// Complement of the revolved triangle in R³ with `±t e₂`, `t = 2^-n`.
    Revolution,
    /// The square `(-1,1)²` minus the comb points `P_0^{k+2} ∪ ... ∪ P_k^{k+2}`, with
    /// the pair of cage centres `0` and `(s_k, s_k)`, `s_k = 1 - 2^-k`.
    Comb,
}

impl Example {
    pub fn name(self) -> &'static str {
        match self {
            Example::HalfStrip => "half_strip",
            Example::ExpCusp => "exp_cusp",
            Example::Revolution => "revolution",
            Example::Comb => "comb",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "half_strip" => Ok(Example::HalfStrip),
            "exp_cusp" => Ok(Example::ExpCusp),
            "revolution" => Ok(Example::Revolution),
            "comb" => Ok(Example::Comb),
            _ => Err(Error::Usage(format!(
                "unknown example {s}; expected half_strip, exp_cusp, revolution or comb"
            ))),
        }
    }

    /// The domain used at index `n`; only the comb changes with `n`.
    pub fn domain(self, n: u32) -> DomainSpec {
        match self {
            Example::HalfStrip => DomainSpec::complement(DomainSpec::half_strip(1.0)),
            Example::ExpCusp => DomainSpec::exp_cusp_complement(1.0, 1.0),
            Example::Revolution => DomainSpec::complement(DomainSpec::revolved_triangle()),
            Example::Comb => DomainSpec::comb_square(n as usize, n as usize + 2),
        }
    }

    /// The pair at index `n`.
    pub fn pair(self, n: u32) -> (Vec<f64>, Vec<f64>) {
        let nf = n as f64;
        match self {
            Example::HalfStrip => (vec![nf, -2.0], vec![nf, 2.0]),
            Example::ExpCusp => {
                let e = (-nf).exp();
                (vec![nf, -e], vec![nf, e])
            }
            Example::Revolution => {
                let t = 0.5f64.powi(n as i32);
                (vec![0.0, -t, 0.0], vec![0.0, t, 0.0])
            }
            Example::Comb => {
                let s = 1.0 - 0.5f64.powi(n as i32);
                (vec![0.0, 0.0], vec![s, s])
            }
        }
    }

    /// The value of `j` asserted for the pair.
    pub fn j_claimed(self, n: u32) -> f64 {
        match self {
            Example::HalfStrip => 5f64.ln(),
            Example::ExpCusp => 3f64.ln(),
            Example::Revolution => (2.0 * SQRT_2).ln_1p(),
            Example::Comb => {
                let (x, y) = self.pair(n);
                (dist(&x, &y) * 2f64.powi(n as i32 + 2)).ln_1p()
            }
        }
    }

    /// The divergent lower bound for k claimed for the pair, where one is stated.
    pub fn claimed_lower_bound(self, n: u32) -> Option<f64> {
        let nf = n as f64;
        match self {
            Example::HalfStrip => Some(nf.ln_1p()),
            Example::ExpCusp => Some((nf * nf.exp()).ln_1p()),
            Example::Revolution => Some((SQRT_2 / 0.5f64.powi(n as i32)).ln_1p()),
            Example::Comb => None,
        }
    }

    /// Closest point to both endpoints on a set every path between them must cross.
    ///
    /// Half-strip and cusp: paths from `y < 0` to `y > 0` cross the axis at
    /// `x < 0`, nearest point the origin. Revolution: paths from below to above
    /// the plane `x₂ = 0` cross it at distance `>= 1` from the axis; by symmetry
    /// `e₁` is nearest to both.
    fn separator_point(self) -> Option<Vec<f64>> {
        match self {
            Example::HalfStrip | Example::ExpCusp => Some(vec![0.0, 0.0]),
            Example::Revolution => Some(vec![1.0, 0.0, 0.0]),
            Example::Comb => None,
        }
    }
}

/// One index of a divergence sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceRow {
    pub n: u32,
    /// `j` from the exact distance oracle.
    pub j_exact: f64,
    /// `j` as claimed for the construction.
    pub j_claimed: f64,
    /// `None` when the solver failed outright.
    pub k_hat: Option<f64>,
    pub k_err: Option<f64>,
    /// Rigorous lower bound `max(j, log(1+|x-m|/δ(x)) + log(1+|y-m|/δ(y)))`, m on the separator.
    pub k_lower: f64,
    pub claimed_lower_bound: Option<f64>,
    /// `k_lower >= claimed_lower_bound`, where one is claimed.
    pub lower_bound_holds: Option<bool>,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub example: Example,
    pub tol: f64,
    pub rows: Vec<SequenceRow>,
}

/// Region doublings allowed for the sequences; the cusp pair at `n` is `~e^-n`
/// apart yet its geodesic reaches the origin.
const SEQUENCE_DOUBLINGS: usize = 40;

/// Evaluate the pair of `example` for `n = 1..=n_max`.
pub fn divergence_sequence(example: Example, n_max: u32, tol: f64) -> Result<SequenceReport> {
    if n_max < 2 {
        return Err(Error::Usage("n_max must be at least 2".into()));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Usage(format!("tol must be positive, got {tol}")));
    }
    if example == Example::Comb && n_max > 20 {
        return Err(Error::Usage("comb sequence supports n_max <= 20".into()));
    }
    let opts = SolverOptions {
        method: MethodChoice::Numeric,
        max_doublings: SEQUENCE_DOUBLINGS,
        ..SolverOptions::default()
    };
    let fixed = match example {
        Example::Comb => None,
        _ => Some(make_domain(&example.domain(1))?),
    };
    let rows = (1..=n_max)
        .map(|n| -> Result<SequenceRow> {
            let own;
            let oracle = match &fixed {
                Some(o) => o,
                None => {
                    own = make_domain(&example.domain(n))?;
                    &own
                }
            };
            let (x, y) = example.pair(n);
            let (dx, dy) = (oracle.delta_at(&x), oracle.delta_at(&y));
            if dx <= 0.0 || dy <= 0.0 {
                return Err(Error::PointOutsideDomain(format!("{} pair at n = {n}", example.name())));
            }
            let j_exact = j_formula(dist(&x, &y), dx, dy);
            let sep = example
                .separator_point()
                .map(|m| (dist(&x, &m) / dx).ln_1p() + (dist(&y, &m) / dy).ln_1p())
                .unwrap_or(0.0);
            let k_lower = j_exact.max(sep);
            let claimed = example.claimed_lower_bound(n);
            let (px, py) = (Point::new(x)?, Point::new(y)?);
            let (est, converged, error): (Option<KEstimate>, bool, Option<String>) =
                match k_estimate(oracle, &px, &py, tol, &opts) {
                    Ok(e) => (Some(e), true, None),
                    Err(Error::BudgetExceeded(e)) => {
                        let msg = format!("budget exceeded at level {}", e.level);
                        (e.value.is_finite().then_some(*e), false, Some(msg))
                    }
                    Err(e) => (None, false, Some(e.to_string())),
                };
            Ok(SequenceRow {
                n,
                j_exact,
                j_claimed: example.j_claimed(n),
                k_hat: est.as_ref().map(|e| e.value),
                k_err: est.as_ref().map(|e| e.error_bound),
                k_lower,
                claimed_lower_bound: claimed,
                lower_bound_holds: claimed.map(|c| k_lower >= c),
                converged,
                error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SequenceReport { example, tol, rows })
}

impl SequenceReport {
    /// CSV with columns `n,j_exact,k_hat,k_err,claimed_lower_bound,j_claimed,k_lower,converged`.
    pub fn to_csv(&self) -> String {
        let f = crate::report::fmt_f64;
        let opt = |v: Option<f64>| v.map(f).unwrap_or_default();
        let mut s = String::from("n,j_exact,k_hat,k_err,claimed_lower_bound,j_claimed,k_lower,converged\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.n,
                f(r.j_exact),
                opt(r.k_hat),
                opt(r.k_err),
                opt(r.claimed_lower_bound),
                f(r.j_claimed),
                f(r.k_lower),
                r.converged
            ));
        }
        s
    }
}
