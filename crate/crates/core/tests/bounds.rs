#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use proptest::prelude::*;
use qhlab::bounds::*;
use qhlab::Error;

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

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn a_theta_matches_reference() {
    for (i, want) in A_THETA_REF {
        let got = a_theta(i as f64 / 10.0).unwrap();
        assert!(rel_close(got, want, 1e-12), "θ = {i}/10: {got} vs {want}");
    }
}

#[test]
fn a_theta_half_and_limit() {
    let got = a_theta(0.5).unwrap();
    assert!((got - (5.0 + PI / (2.0 * 1.2f64.ln()))).abs() < 1e-12);
    assert!((got - 13.6155).abs() < 1e-4);
    let limit = 3.0 + PI / (2.0 * (4.0f64 / 3.0).ln());
    assert!((a_theta(1.0 - 1e-9).unwrap() - limit).abs() < 1e-6);
}

#[test]
fn a_theta_rejects_out_of_range() {
    for t in [0.0, -0.5, 1.0, 2.0, f64::NAN] {
        assert!(matches!(a_theta(t), Err(Error::OutOfRange(_))), "θ = {t}");
    }
}

#[test]
fn a_alpha_theta_matches_reference() {
    for (al, t, want) in A_ALPHA_REF {
        let got = a_alpha_theta(al, t).unwrap();
        assert!(rel_close(got, want, 1e-12), "α = {al}, θ = {t}: {got} vs {want}");
    }
}

#[test]
fn a_alpha_theta_tends_to_a_theta() {
    for (i, _) in A_THETA_REF {
        let t = i as f64 / 10.0;
        let d = a_alpha_theta(1e-8, t).unwrap() - a_theta(t).unwrap();
        assert!(d.abs() < 1e-4, "θ = {t}: {d}");
    }
}

#[test]
fn a_alpha_theta_rejects_out_of_range() {
    assert!(matches!(a_alpha_theta(1.0, 0.5), Err(Error::OutOfRange(_))));
    assert!(matches!(a_alpha_theta(0.0, 0.5), Err(Error::OutOfRange(_))));
    assert!(matches!(a_alpha_theta(0.5, 1.0), Err(Error::OutOfRange(_))));
}

#[test]
fn jung_radius_values() {
    assert!((jung_radius(2, 1.0).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    assert!((jung_radius(3, 2.0).unwrap() - 2.0 * (3.0f64 / 8.0).sqrt()).abs() < 1e-15);
    let mut prev = 0.0;
    for n in 2..=100 {
        let f = jung_radius(n, 1.0).unwrap();
        assert!(f > prev && f < 1.0 / 2f64.sqrt());
        prev = f;
    }
    assert!(jung_radius(1, 1.0).is_err());
    assert!(jung_radius(2, 0.0).is_err());
}

fn two_log() -> Modulus {
    Modulus::LogOnePlus { coef: 2.0 }
}

#[test]
fn bilipschitz_identity() {
    let phi = phi_transfer(&Transfer::Bilipschitz {
        l: 1.0,
        phi: Modulus::Linear { slope: 1.0 },
    })
    .unwrap();
    for t in [0.0, 0.3, 1.0, 7.5] {
        assert_eq!(phi.eval(t), t);
    }
}

#[test]
fn bilipschitz_and_inversion_scale() {
    let phi = phi_transfer(&Transfer::Bilipschitz { l: 2.0, phi: two_log() }).unwrap();
    assert!((phi.eval(1.0) - 4.0 * 2.0 * 5f64.ln()).abs() < 1e-12);
    let inv = phi_transfer(&Transfer::Inversion {
        m: 1.0,
        big_m: 3.0,
        phi: two_log(),
    })
    .unwrap();
    assert!((inv.eval(0.5) - 9.0 * 2.0 * 5.5f64.ln()).abs() < 1e-12);
    assert!(phi_transfer(&Transfer::Inversion { m: 2.0, big_m: 1.0, phi: two_log() }).is_err());
    assert!(phi_transfer(&Transfer::Bilipschitz { l: 0.5, phi: two_log() }).is_err());
}

#[test]
fn puncture_at_one() {
    let phi = phi_transfer(&Transfer::Puncture {
        theta: 0.5,
        phi1: two_log(),
    })
    .unwrap();
    let a = a_theta(0.25).unwrap();
    let want = 2.0 * (PI / 3f64.ln() * 4f64.ln()).max(a * 2.0 * 4f64.ln());
    assert!((phi.eval(1.0) - want).abs() < 1e-12);
    assert!((phi.eval(1.0) - 132.578_405_379_676_38).abs() < 1e-10);
}

#[test]
fn multi_point_reduces_to_puncture_for_one_point() {
    let one = phi_transfer(&Transfer::MultiPoint {
        m: 1,
        theta: 0.5,
        phi0: two_log(),
    })
    .unwrap();
    let p = phi_transfer(&Transfer::Puncture {
        theta: 0.5,
        phi1: two_log(),
    })
    .unwrap();
    for t in [0.01, 0.5, 3.0, 40.0] {
        assert!(rel_close(one.eval(t), p.eval(t), 1e-14));
    }
    let three = phi_transfer(&Transfer::MultiPoint {
        m: 3,
        theta: 0.5,
        phi0: two_log(),
    })
    .unwrap();
    let a = a_theta(0.25).unwrap();
    let t = 2.0f64;
    let want = 8.0 * a * a * (PI * (3.0 * t).ln_1p() / 3f64.ln()).max(a * 2.0 * (3.0 * t).ln_1p());
    assert!(rel_close(three.eval(t), want, 1e-14));
}

#[test]
fn uniform_removal_constant_example() {
    let c = uniform_removal_constant(1, 0.5, 2.0).unwrap();
    assert!((c - 6.0 * a_theta(0.25).unwrap() * 2.0).abs() < 1e-12);
    assert!((c - 286.905_311_955_338_67).abs() < 1e-9);
    let phi = phi_transfer(&Transfer::UniformRemoval { m: 1, theta: 0.5, c: 2.0 }).unwrap();
    assert_eq!(phi, Modulus::LogOnePlus { coef: c });
    assert!(uniform_removal_constant(0, 0.5, 2.0).is_err());
    assert!(uniform_removal_constant(1, 0.5, 0.5).is_err());
}

#[test]
fn remove_set_constant() {
    let phi = phi_transfer(&Transfer::RemoveSet {
        theta: 0.5,
        phi1: Modulus::Linear { slope: 1.0 },
        phi2: two_log(),
    })
    .unwrap();
    let a = a_alpha_theta(0.25, 0.5 / 3.0).unwrap();
    assert!((a - 61.681_543_877_100_502).abs() < 1e-10);
    for t in [0.01f64, 1.0, 5.0] {
        let want = 4.0 * a * (30.0 * t).max(2.0 * (30.0 * t).ln_1p());
        assert!(rel_close(phi.eval(t), want, 1e-14));
    }
}

#[test]
fn modulus_validation() {
    assert!(Modulus::Max { terms: vec![] }.validate().is_err());
    assert!(Modulus::Linear { slope: 0.0 }.validate().is_err());
    assert!(Modulus::LogOnePlus { coef: -1.0 }.validate().is_err());
    let m: Modulus = serde_json::from_str(r#"{"kind":"scale","factor":2,"arg_factor":3,"inner":{"kind":"linear","slope":1}}"#).unwrap();
    assert_eq!(m.eval(1.0), 6.0);
}

fn arb_modulus() -> impl Strategy<Value = Modulus> {
    prop_oneof![
        (0.01f64..10.0).prop_map(|slope| Modulus::Linear { slope }),
        (0.01f64..10.0).prop_map(|coef| Modulus::LogOnePlus { coef }),
    ]
}

fn arb_transfer() -> impl Strategy<Value = Transfer> {
    prop_oneof![
        (1.0f64..4.0, arb_modulus()).prop_map(|(l, phi)| Transfer::Bilipschitz { l, phi }),
        (0.1f64..2.0, 1.01f64..4.0, arb_modulus()).prop_map(|(m, r, phi)| Transfer::Inversion { m, big_m: m * r, phi }),
        (0.05f64..0.95, arb_modulus()).prop_map(|(theta, phi1)| Transfer::Puncture { theta, phi1 }),
        (1u32..5, 0.05f64..0.95, arb_modulus()).prop_map(|(m, theta, phi0)| Transfer::MultiPoint { m, theta, phi0 }),
        (1u32..5, 0.05f64..0.95, 1.0f64..10.0).prop_map(|(m, theta, c)| Transfer::UniformRemoval { m, theta, c }),
        (0.05f64..0.95, arb_modulus(), arb_modulus()).prop_map(|(theta, phi1, phi2)| Transfer::RemoveSet { theta, phi1, phi2 }),
    ]
}

proptest! {
    #[test]
    fn transfers_are_increasing_and_vanish_at_zero(kind in arb_transfer()) {
        let phi = phi_transfer(&kind).unwrap();
        prop_assert_eq!(phi.eval(0.0), 0.0);
        let grid: Vec<f64> = (1..=100).map(|i| 0.05 * i as f64).collect();
        let mut prev = 0.0;
        for t in grid {
            let v = phi.eval(t);
            prop_assert!(v > prev, "not increasing at {}", t);
            prev = v;
        }
    }

    #[test]
    fn a_theta_is_decreasing(a in 0.01f64..0.98, d in 0.001f64..0.01) {
        prop_assert!(a_theta(a + d).unwrap() < a_theta(a).unwrap());
    }

    #[test]
    fn a_alpha_theta_exceeds_a_theta(al in 0.01f64..0.9, t in 0.05f64..0.95) {
        prop_assert!(a_alpha_theta(al, t).unwrap() > a_theta(t).unwrap());
    }
}

#[test]
fn catalog_is_complete_and_named_uniquely() {
    let c = catalog();
    assert!(c.len() >= 14);
    let mut names: Vec<&str> = c.iter().map(|b| b.name).collect();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), c.len());
    for b in &c {
        assert!(!b.statement.is_empty() && !b.sampling.is_empty(), "{}", b.name);
    }
    assert!(matches!(find("no_such_bound"), Err(Error::UnknownBound(_))));
}

#[test]
fn every_witness_is_sharp() {
    for b in catalog().iter().filter(|b| b.has_witness()) {
        let d = b.sharpness_defect().unwrap().unwrap();
        assert!(d <= 1e-12, "{}: defect {d}", b.name);
    }
}

#[test]
fn jung_appl_2_witness_and_bernoulli_equality() {
    assert!(find("jung_appl_2").unwrap().sharpness_defect().unwrap().unwrap() <= 1e-12);
    let b = find("bernoulli").unwrap();
    for t in [0.0, 1e-6, 0.3, 5.0, 1e6] {
        let cfg = Config {
            x: vec![],
            y: vec![],
            w: vec![],
            extra: vec![1.0, t],
        };
        let q = b.evaluate(&cfg, Backend::ClosedOnly, 1e-3).unwrap().unwrap();
        assert!((q[0].lhs - q[0].rhs).abs() <= 1e-15 * q[0].rhs.max(1.0));
    }
}

#[test]
fn closed_entries_pass_small_runs() {
    for b in catalog().iter().filter(|b| b.backend == Backend::ClosedOnly) {
        let r = check_bound(b, 2000, 7, Backend::ClosedOnly, 1e-3).unwrap();
        assert!(r.passed(), "{}: {:?}", b.name, r.violations.first());
        assert!(r.hits > 0 && r.hits <= r.samples);
        assert_eq!(r.violations.is_empty(), r.violation_count == 0);
    }
}

#[test]
fn numeric_entry_rejected_under_closed_backend() {
    let b = find("newlem1").unwrap();
    assert!(matches!(check_bound(&b, 10, 0, Backend::ClosedOnly, 1e-2), Err(Error::NoClosedForm)));
    assert!(check_bound(&b, 0, 0, Backend::WithNumeric, 1e-2).is_err());
}

#[test]
fn impossible_hypothesis_reports_no_hits() {
    // |x| = |y| = 0.5 lies inside the removed ball of radius 1
    let b = find("complementofB").unwrap().with_param("norm", 0.5);
    assert!(matches!(
        check_bound(&b, 20, 0, Backend::WithNumeric, 1e-2),
        Err(Error::NoHypothesisHits(_))
    ));
}

#[test]
fn violations_are_detected() {
    // s = -0.5 turns the upper bound into k <= j/2, which is false off the diagonal
    let b = find("newlem1").unwrap().with_param("s", -0.5);
    let r = check_bound(&b, 30, 3, Backend::WithNumeric, 1e-2).unwrap();
    assert!(!r.passed());
    assert!(r.violation_count > 0 && r.worst_gap > 0.0);
    let idx: Vec<u64> = r.violations.iter().map(|v| v.index).collect();
    assert!(idx.windows(2).all(|w| w[0] < w[1]));
    assert!(r.violations.len() <= MAX_STORED_VIOLATIONS);
    let ok = check_bound(&find("newlem1").unwrap(), 30, 3, Backend::WithNumeric, 1e-2).unwrap();
    assert!(ok.passed());
}

#[test]
fn check_bound_is_seed_deterministic() {
    let b = find("rho_j_sandwich").unwrap();
    let a = check_bound(&b, 5000, 11, Backend::ClosedOnly, 1e-3).unwrap();
    let c = check_bound(&b, 5000, 11, Backend::ClosedOnly, 1e-3).unwrap();
    assert_eq!(a, c);
    let d = check_bound(&b, 5000, 12, Backend::ClosedOnly, 1e-3).unwrap();
    assert_ne!(a.worst_gap, d.worst_gap);
}
