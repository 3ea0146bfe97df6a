//! Acceptance suite. Run with `--nocapture` to see one line per criterion.
#![allow(clippy::excessive_precision)]

use std::time::Instant;

use qhlab::bounds::{a_alpha_theta, a_theta, check_bound, find, phi_transfer, Backend, Modulus, Transfer};
use qhlab::geometry::Aabb;
use qhlab::profiler::{divergence_sequence, envelope_vs_theorem, phi_envelope, Axis, Example, DEFAULT_BINS};
use qhlab::qh_solver::{geodesic, k_distance, k_estimate, MethodChoice, SolverOptions};
use qhlab::report::{self, suite_entries, Command, RunConfig};
use qhlab::{make_domain, DomainSpec, Point};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn pt(c: &[f64]) -> Point {
    Point::new(c.to_vec()).unwrap()
}

fn numeric_k(o: &qhlab::DomainOracle, x: &Point, y: &Point) -> f64 {
    let opts = SolverOptions {
        method: MethodChoice::Numeric,
        ..SolverOptions::default()
    };
    k_estimate(o, x, y, 1e-3, &opts).unwrap().value
}

fn criterion_1() -> Verdict {
    let o = make_domain(&DomainSpec::unit_ball(2)).unwrap();
    let (x, y) = (pt(&[0.0, 0.0]), pt(&[0.5, 0.0]));
    let t = Instant::now();
    let k = k_distance(&o, &x, &y, 1e-3).unwrap();
    let kn = numeric_k(&o, &x, &y);
    let secs = t.elapsed().as_secs_f64();
    let (err, err_n) = ((k.value - 2f64.ln()).abs(), (kn - 2f64.ln()).abs());
    verdict(
        err.max(err_n) <= 1e-3 && secs < 30.0,
        format!("k = {:.16} ({:?}), numeric {kn:.10}, errors {err:.1e} / {err_n:.1e}, {secs:.2}s", k.value, k.method),
    )
}

fn criterion_2() -> Verdict {
    let o = make_domain(&DomainSpec::unit_ball(2)).unwrap();
    let (x, y) = (pt(&[-0.3, 0.0]), pt(&[0.3, 0.0]));
    let want = 2.0 * (10.0f64 / 7.0).ln();
    let k = k_distance(&o, &x, &y, 1e-3).unwrap();
    let kn = numeric_k(&o, &x, &y);
    let g = geodesic(&o, &x, &y, 1e-3).unwrap();
    let closest = g.vertices.iter().map(|v| v.coords()[0].hypot(v.coords()[1])).fold(f64::INFINITY, f64::min);
    let err = (k.value - want).abs().max((kn - want).abs());
    verdict(
        err <= 1e-3 && closest <= 2.0 * g.spacing,
        format!("k = {:.10}, numeric {kn:.10}, max err {err:.1e}; geodesic passes {closest:.2e} from 0, h = {:.3e}", k.value, g.spacing),
    )
}

fn criterion_3() -> Verdict {
    let t = Instant::now();
    let mut bad = Vec::new();
    let entries = suite_entries("all").unwrap();
    for b in &entries {
        let r = check_bound(b, 100_000, 42, Backend::ClosedOnly, 1e-3).unwrap();
        if !r.passed() {
            bad.push(format!("{} ({} violations)", r.name, r.violation_count));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    verdict(
        bad.is_empty() && secs < 60.0,
        format!("{} closed-form bounds x 1e5 samples, failures {bad:?}, {secs:.1}s", entries.len()),
    )
}

fn criterion_4() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for name in ["rhoineq", "jung_appl2_cor", "jung_appl_j_cor", "chordal_remark"] {
        let d = find(name).unwrap().sharpness_defect().unwrap().unwrap_or(f64::INFINITY);
        worst = worst.max(d);
        parts.push(format!("{name} {d:.1e}"));
    }
    verdict(worst <= 1e-12, parts.join(", "))
}

fn criterion_5() -> Verdict {
    let n1 = check_bound(&find("newlem1").unwrap(), 10_000, 42, Backend::WithNumeric, 1e-2).unwrap();
    let cb = find("complementofB").unwrap().with_param("r", 1.0).with_param("norm", 2.0);
    let c = check_bound(&cb, 100, 42, Backend::WithNumeric, 1e-2).unwrap();
    verdict(
        n1.passed() && c.passed() && n1.hits > 0 && c.hits > 0,
        format!(
            "newlem1 s=0.9: {} hits, {} violations, {} solver failures; complementofB: {} hits, {} violations",
            n1.hits, n1.violation_count, n1.solver_failures, c.hits, c.violation_count
        ),
    )
}

/// a(θ) at θ = i/10, from 50-digit arithmetic.
const A_THETA_REF: [(u32, f64); 9] = [
    (1, 54.766_031_789_909_874_863_668_098_263_65),
    (2, 29.052_769_432_462_930_216_187_365_120_67),
    (3, 20.478_792_081_484_853_482_338_126_701_21),
    (4, 16.190_005_834_259_930_000_353_388_141_03),
    (5, 13.615_527_173_070_851_605_275_648_454_45),
    (6, 11.898_355_160_829_684_060_845_151_405_39),
    (7, 10.671_178_068_339_487_027_133_972_019_00),
    (8, 9.750_322_902_428_598_044_695_302_550_022),
    (9, 9.033_737_300_495_290_485_034_184_538_440),
];

/// a(α,θ) on a grid, from 50-digit arithmetic.
const A_ALPHA_REF: [(f64, f64, f64); 9] = [
    (0.2, 0.25, 37.841_297_171_793_657_560_467_395_091_51),
    (0.1, 0.1, 67.276_482_123_918_549_414_836_882_442_02),
    (0.1, 0.5, 16.964_675_520_751_080_071_947_654_194_93),
    (0.1, 0.9, 11.364_292_775_590_206_111_792_835_071_48),
    (0.5, 0.1, 233.646_559_430_228_144_838_766_858_747_8),
    (0.5, 0.5, 61.491_641_630_722_123_981_895_428_695_34),
    (0.5, 0.9, 42.350_792_443_062_213_414_661_066_610_12),
    (0.9, 0.5, 1_806.796_078_331_158_689_467_591_581_880),
    (0.25, 0.75, 19.120_316_462_571_694_938_543_327_861_18),
];

fn criterion_6() -> Verdict {
    let rel = |a: f64, b: f64| (a - b).abs() / b;
    let mut worst_theta: f64 = 0.0;
    let mut worst_limit: f64 = 0.0;
    for (i, want) in A_THETA_REF {
        let theta = i as f64 / 10.0;
        let a = a_theta(theta).unwrap();
        worst_theta = worst_theta.max(rel(a, want));
        worst_limit = worst_limit.max(a_alpha_theta(1e-8, theta).unwrap() - a);
    }
    let worst_alpha = A_ALPHA_REF
        .iter()
        .map(|&(al, t, want)| rel(a_alpha_theta(al, t).unwrap(), want))
        .fold(0.0, f64::max);
    verdict(
        worst_theta <= 1e-12 && worst_alpha <= 1e-12 && worst_limit < 1e-4,
        format!(
            "a(θ) max rel err {worst_theta:.1e}, a(α,θ) max rel err {worst_alpha:.1e}, max a(1e-8,θ) - a(θ) = {worst_limit:.1e}"
        ),
    )
}

fn criterion_7() -> Verdict {
    let hs = divergence_sequence(Example::HalfStrip, 20, 1e-2).unwrap();
    let log5 = 5f64.ln();
    let j_ok = hs.rows.iter().all(|r| r.j_exact == log5);
    let last = hs.rows.last().unwrap();
    let ratio = last.k_hat.unwrap_or(0.0) / last.j_exact;
    let hs_ok = j_ok && ratio > 2.0 && hs.rows.len() == 20;

    let ec = divergence_sequence(Example::ExpCusp, 8, 1e-2).unwrap();
    let log3 = 3f64.ln();
    let ec_j_ok = ec.rows.iter().all(|r| r.j_exact == log3);
    let ec_k_ok = ec.rows.iter().all(|r| r.k_hat.is_some_and(|k| k > r.n as f64) && r.k_lower > r.n as f64);
    let js: Vec<String> = ec.rows.iter().map(|r| format!("{:.6}", r.j_exact)).collect();
    let ks: Vec<String> = ec.rows.iter().map(|r| format!("{:.2}", r.k_hat.unwrap_or(f64::NAN))).collect();
    verdict(
        hs_ok && ec_j_ok && ec_k_ok,
        format!(
            "half_strip j == log 5: {j_ok}, k/j at n=20 = {ratio:.3}; exp_cusp k > n and k_lower > n: {ec_k_ok}; \
             exp_cusp j == log 3 ({log3:.6}): {ec_j_ok}, j = [{}], k = [{}]",
            js.join(" "),
            ks.join(" ")
        ),
    )
}

fn envelope_ok(spec: DomainSpec, pairs: u64, phi: &Modulus) -> (bool, String) {
    let o = make_domain(&spec).unwrap();
    let region: Aabb = o.bounding_box().unwrap().clone();
    let tol = 1e-2;
    let p = phi_envelope(&o, pairs, DEFAULT_BINS, 42, Axis::Ratio, &region, tol).unwrap();
    let c = envelope_vs_theorem(&p, phi, tol).unwrap();
    let ok = c.passed && !c.bins.is_empty() && p.solver_failures == 0;
    (
        ok,
        format!(
            "{} pairs used, {} bins, worst margin {:.3e}, {} solver failures",
            p.accepted,
            c.bins.len(),
            c.worst_margin,
            p.solver_failures
        ),
    )
}

fn criterion_8() -> Verdict {
    let phi = Modulus::Linear { slope: 1.05 };
    let (sq, sq_d) = envelope_ok(DomainSpec::unit_square(), 10_000, &phi);
    let (di, di_d) = envelope_ok(DomainSpec::unit_ball(2), 10_000, &phi);
    verdict(sq && di, format!("square: {sq_d}; disk: {di_d}"))
}

fn criterion_9() -> Verdict {
    let phi = phi_transfer(&Transfer::Puncture {
        theta: 0.5,
        phi1: Modulus::LogOnePlus { coef: 2.0 },
    })
    .unwrap();
    let spec = DomainSpec::remove_points(DomainSpec::unit_ball(2), &[vec![0.0, 0.0]]);
    let (ok, d) = envelope_ok(spec, 10_000, &phi);
    verdict(ok, d)
}

fn verify_json() -> String {
    let mut cfg = RunConfig::new(Command::Verify);
    cfg.seed = 42;
    report::run(&cfg).unwrap().body
}

fn criterion_10() -> Verdict {
    let a = verify_json();
    let b = verify_json();
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    let one = pool(1).install(verify_json);
    let four = pool(4).install(verify_json);
    verdict(
        a == b && a == one && a == four,
        format!("{} bytes; repeat equal {}, 1 thread equal {}, 4 threads equal {}", a.len(), a == b, a == one, a == four),
    )
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Verdict); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = Vec::new();
    for (n, f) in criteria {
        let t = Instant::now();
        let v = f();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {n}: {tag} [{:.1}s] {}", t.elapsed().as_secs_f64(), v.detail);
        if !v.pass {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
