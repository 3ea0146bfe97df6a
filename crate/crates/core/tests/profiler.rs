use qhlab::bounds::Modulus;
use qhlab::geometry::Aabb;
use qhlab::profiler::*;
use qhlab::{make_domain, DomainSpec, Error};

fn disk() -> (qhlab::DomainOracle, Aabb) {
    (make_domain(&DomainSpec::unit_ball(2)).unwrap(), Aabb::cube(&[0.0, 0.0], 1.0))
}

#[test]
fn envelope_shape_invariants() {
    let (o, r) = disk();
    let p = phi_envelope(&o, 300, 20, 5, Axis::Ratio, &r, 1e-2).unwrap();
    assert_eq!(p.bins(), 20);
    assert_eq!(p.bin_edges.len(), 21);
    assert!(p.bin_edges.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(p.counts.iter().sum::<u64>(), p.accepted);
    assert_eq!(p.accepted + p.rejected_small_delta + p.rejected_coincident + p.solver_failures, p.requested);
    let mut prev = 0.0;
    for b in 0..p.bins() {
        assert_eq!(p.raw_sup[b].is_some(), p.counts[b] > 0);
        if let (Some(raw), Some(rect)) = (p.raw_sup[b], p.rectified_sup[b]) {
            assert!(raw <= rect);
        }
        if let Some(rect) = p.rectified_sup[b] {
            assert!(rect >= prev);
            prev = rect;
        }
    }
    assert!(p.lower_estimate);
}

#[test]
fn envelope_is_deterministic() {
    let (o, r) = disk();
    let a = phi_envelope(&o, 100, 10, 3, Axis::Ratio, &r, 1e-2).unwrap();
    let b = phi_envelope(&o, 100, 10, 3, Axis::Ratio, &r, 1e-2).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
}

#[test]
fn disk_envelope_below_twice_log() {
    let (o, r) = disk();
    let tol = 1e-2;
    let p = phi_envelope(&o, 1000, DEFAULT_BINS, 1, Axis::Ratio, &r, tol).unwrap();
    let cmp = envelope_vs_theorem(&p, &Modulus::LogOnePlus { coef: 2.0 }, tol).unwrap();
    assert!(cmp.passed, "worst margin {}", cmp.worst_margin);
    assert!(!cmp.bins.is_empty());
}

#[test]
fn disk_uniformity_constant_at_most_two() {
    let (o, r) = disk();
    let u = uniformity_constant(&o, 500, 2, &r, 1e-2).unwrap();
    assert!(u.c_hat > 1.0 && u.c_hat <= 2.0 * (1.0 + 1e-2), "{}", u.c_hat);
    assert!(u.lower_estimate);
    assert!(u.pairs_used > 0);
}

#[test]
fn axis_duality() {
    let (o, r) = disk();
    let set = phi_samples(&o, 400, 8, &r, 1e-2).unwrap();
    let pr = profile_from_samples(&set, Axis::Ratio, 16, 8, 1e-2).unwrap();
    let pj = profile_from_samples(&set, Axis::J, 16, 8, 1e-2).unwrap();
    assert_eq!(pr.counts.iter().sum::<u64>(), pj.counts.iter().sum::<u64>());
    for &t in &pj.bin_edges {
        let omega = empirical_sup(&set.samples, Axis::J, t);
        let phi = empirical_sup(&set.samples, Axis::Ratio, t.exp_m1() * (1.0 + 1e-12));
        assert!(omega <= phi + 1e-2, "t = {t}: {omega} > {phi}");
    }
}

#[test]
fn comparison_needs_ratio_axis() {
    let (o, r) = disk();
    let p = phi_envelope(&o, 50, 5, 0, Axis::J, &r, 1e-2).unwrap();
    assert!(matches!(
        envelope_vs_theorem(&p, &Modulus::Linear { slope: 1.0 }, 1e-2),
        Err(Error::AxisMismatch { .. })
    ));
}

#[test]
fn empty_bins_are_skipped_not_failed() {
    let (o, r) = disk();
    let p = phi_envelope(&o, 20, 200, 0, Axis::Ratio, &r, 1e-2).unwrap();
    let cmp = envelope_vs_theorem(&p, &Modulus::LogOnePlus { coef: 2.0 }, 1e-2).unwrap();
    assert!(!cmp.skipped_bins.is_empty());
    assert_eq!(cmp.skipped_bins.len() + cmp.bins.len(), 200);
    assert!(cmp.passed);
    // an impossible prediction fails
    let bad = envelope_vs_theorem(&p, &Modulus::Linear { slope: 1e-3 }, 1e-2).unwrap();
    assert!(!bad.passed && bad.worst_margin < -1e-2);
}

#[test]
fn bad_arguments() {
    let (o, r) = disk();
    assert!(phi_envelope(&o, 0, 10, 0, Axis::Ratio, &r, 1e-2).is_err());
    assert!(phi_envelope(&o, 10, 0, 0, Axis::Ratio, &r, 1e-2).is_err());
    assert!(phi_envelope(&o, 10, 10, 0, Axis::Ratio, &r, 0.0).is_err());
    let far = Aabb::new(vec![3.0, 3.0], vec![4.0, 4.0]).unwrap();
    assert!(matches!(
        phi_envelope(&o, 1, 10, 0, Axis::Ratio, &far, 1e-2),
        Err(Error::SamplingExhausted(_))
    ));
}

#[test]
fn csv_layout() {
    let (o, r) = disk();
    let p = phi_envelope(&o, 40, 4, 0, Axis::Ratio, &r, 1e-2)
        .unwrap()
        .with_predicted(&Modulus::Linear { slope: 1.0 });
    let csv = p.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("bin_lo,bin_hi,count,sup_k,rectified_sup,predicted"));
    assert_eq!(lines.count(), 4);
    assert_eq!(p.predicted.as_ref().unwrap()[3], p.bin_edges[4]);
}

#[test]
fn half_strip_sequence_short() {
    let rep = divergence_sequence(Example::HalfStrip, 4, 1e-2).unwrap();
    assert_eq!(rep.rows.len(), 4);
    for r in &rep.rows {
        assert_eq!(r.j_exact, 5f64.ln());
        assert_eq!(r.j_exact, r.j_claimed);
        let k = r.k_hat.unwrap();
        assert!(k >= r.j_exact && k >= r.k_lower - 1e-9);
        assert_eq!(r.lower_bound_holds, Some(true));
    }
    let csv = rep.to_csv();
    assert!(csv.starts_with("n,j_exact,k_hat,k_err,claimed_lower_bound,j_claimed,k_lower,converged\n"));
}

#[test]
fn revolution_sequence() {
    let rep = divergence_sequence(Example::Revolution, 3, 1e-2).unwrap();
    let want = (2.0 * 2f64.sqrt()).ln_1p();
    for r in &rep.rows {
        assert!((r.j_exact - want).abs() < 1e-15, "n = {}: {}", r.n, r.j_exact);
        let t = 0.5f64.powi(r.n as i32);
        let k = r.k_hat.unwrap();
        assert!(k >= (2f64.sqrt() / t).ln_1p() - 1e-2);
        assert!(k >= r.k_lower - 1e-9);
    }
}

#[test]
fn comb_sequence_grows() {
    let rep = divergence_sequence(Example::Comb, 3, 1e-2).unwrap();
    let ks: Vec<f64> = rep.rows.iter().map(|r| r.k_hat.unwrap()).collect();
    assert!(ks.windows(2).all(|w| w[0] < w[1]), "{ks:?}");
    for r in &rep.rows {
        assert!((r.j_exact - r.j_claimed).abs() < 1e-12);
        assert!(r.claimed_lower_bound.is_none());
    }
}

#[test]
fn sequence_argument_errors() {
    assert!(divergence_sequence(Example::HalfStrip, 1, 1e-2).is_err());
    assert!(divergence_sequence(Example::Comb, 21, 1e-2).is_err());
    assert!(divergence_sequence(Example::HalfStrip, 3, -1.0).is_err());
    assert!(Example::parse("spiral").is_err());
    for e in [Example::HalfStrip, Example::ExpCusp, Example::Revolution, Example::Comb] {
        assert_eq!(Example::parse(e.name()).unwrap(), e);
    }
}
