use proptest::prelude::*;
use qhlab::closed_form::*;
use qhlab::{make_domain, DomainSpec, Error, Point};

fn p(c: &[f64]) -> Point {
    Point::from_slice(c)
}

#[test]
fn j_half_strip_complement_is_log5() {
    let g = make_domain(&DomainSpec::complement(DomainSpec::half_strip(1.0))).unwrap();
    for n in 1..=20 {
        let n = n as f64;
        let v = j_metric(&g, &p(&[n, -2.0]), &p(&[n, 2.0])).unwrap();
        assert_eq!(v.value, 5f64.ln(), "n = {n}");
        assert_eq!(v.method, Method::ClosedForm);
        assert_eq!(v.error_bound, 0.0);
    }
}

#[test]
fn j_exp_cusp_complement_tends_to_log_of_one_plus_2e_over_e_minus_1() {
    // δ(z_n) ~ e^-n (1 - 1/e), so j -> log(1 + 2e/(e-1)), not log 3
    let e = std::f64::consts::E;
    let limit = (2.0 * e / (e - 1.0)).ln_1p();
    let g = make_domain(&DomainSpec::exp_cusp_complement(1.0, 1.0)).unwrap();
    let mut prev = f64::INFINITY;
    for n in 1..=12 {
        let s = (-(n as f64)).exp();
        let j = j_metric(&g, &p(&[n as f64, -s]), &p(&[n as f64, s])).unwrap().value;
        assert!(j < prev && j > limit);
        prev = j;
    }
    assert!(prev - limit < 1e-7);
    assert!(prev - 3f64.ln() > 0.3);
}

#[test]
fn j_identity_and_outside() {
    let g = make_domain(&DomainSpec::unit_square()).unwrap();
    assert_eq!(j_metric(&g, &p(&[0.3, 0.4]), &p(&[0.3, 0.4])).unwrap().value, 0.0);
    assert!(matches!(j_metric(&g, &p(&[0.3, 0.4]), &p(&[1.3, 0.4])), Err(Error::PointOutsideDomain(_))));
}

#[test]
fn rho_ball_examples() {
    let v = rho_ball(&p(&[0.5, 0.0]), &p(&[-0.5, 0.0])).unwrap().value;
    assert!((v - 2.197_224_577_336_219_4).abs() < 1e-15);
    assert!((v - 2.0 * (4.0f64 / 3.0).asinh()).abs() < 1e-15);
    let t = 0.75f64;
    assert!(((v / 2.0).tanh().powi(2) - 1.0 / (1.0 + t * t)).abs() < 1e-15);
    assert_eq!(rho_ball(&p(&[0.1, 0.2]), &p(&[0.1, 0.2])).unwrap().value, 0.0);
    assert!(matches!(rho_ball(&p(&[1.0, 0.0]), &p(&[0.0, 0.0])), Err(Error::PointOutsideDomain(_))));
}

#[test]
fn k_halfspace_examples() {
    let v = k_halfspace(&p(&[0.0, 0.0, 1.0]), &p(&[0.0, 0.0, std::f64::consts::E])).unwrap().value;
    assert!((v - 1.0).abs() < 1e-15);
    assert_eq!(k_halfspace(&p(&[3.0, 2.0]), &p(&[3.0, 2.0])).unwrap().value, 0.0);
    // (0,1) to (1,1): 2 arsinh(1/2)
    let h = k_halfspace(&p(&[0.0, 1.0]), &p(&[1.0, 1.0])).unwrap().value;
    assert!((h - 2.0 * 0.5f64.asinh()).abs() < 1e-15);
    assert!(matches!(k_halfspace(&p(&[0.0, -1.0]), &p(&[0.0, 1.0])), Err(Error::PointOutsideDomain(_))));
}

#[test]
fn chordal_examples() {
    assert_eq!(chordal(&p(&[0.2, 0.1]), &p(&[0.2, 0.1])).unwrap().value, 0.0);
    assert!((chordal(&p(&[1.0, 0.0]), &p(&[-1.0, 0.0])).unwrap().value - 1.0).abs() < 1e-15);
    assert!((chordal_to_infinity(&p(&[0.0, 0.0])).value - 1.0).abs() < 1e-15);
    // q(x, y) -> q(x, ∞) as y -> ∞
    let far = chordal(&p(&[1.0, 2.0]), &p(&[1e9, 0.0])).unwrap().value;
    assert!((far - chordal_to_infinity(&p(&[1.0, 2.0])).value).abs() < 1e-8);
}

#[test]
fn k_radial_examples() {
    let v = k_radial_ball(&p(&[0.0, 0.0]), &p(&[0.5, 0.0])).unwrap().value;
    assert!((v - 2f64.ln()).abs() < 1e-15);
    let v = k_radial_ball(&p(&[0.3, 0.0]), &p(&[-0.3, 0.0])).unwrap().value;
    assert!((v - 0.713_349_887_877_464_8).abs() < 1e-15);
    let v = k_radial_ball(&p(&[0.2, 0.0]), &p(&[0.6, 0.0])).unwrap().value;
    assert!((v - 2f64.ln()).abs() < 1e-15);
    // antipodal on a diagonal, where the naive collinearity test cancels badly
    let a = [0.3 / 2f64.sqrt(), 0.3 / 2f64.sqrt(), 0.0];
    let b = [-a[0], -a[1], 0.0];
    assert!(k_radial_ball(&p(&a), &p(&b)).is_ok());
    assert!(matches!(k_radial_ball(&p(&[0.3, 0.0]), &p(&[0.0, 0.3])), Err(Error::NotRadialConfiguration)));
}

#[test]
fn k_segment_examples() {
    let g = make_domain(&DomainSpec::unit_square()).unwrap();
    let z0 = p(&[0.5, 0.5]);
    let v = k_segment_to_boundary(&g, &z0, &p(&[0.5, 0.3]), &p(&[0.5, 0.1])).unwrap().value;
    assert!((v - 3f64.ln()).abs() < 1e-15);
    let u = p(&[0.5, 0.3]);
    assert_eq!(k_segment_to_boundary(&g, &z0, &u, &u).unwrap().value, 0.0);
    assert!(matches!(
        k_segment_to_boundary(&g, &p(&[0.5, 0.3]), &p(&[0.4, 0.3]), &p(&[0.5, 0.1])),
        Err(Error::NotOnNearestBoundarySegment)
    ));
}

#[test]
fn inversion_examples() {
    let h = inversion_map(&p(&[0.0, 0.0]), 1.0, &p(&[2.0, 0.0])).unwrap();
    assert_eq!(h.coords(), &[0.5, 0.0]);
    assert!(matches!(inversion_map(&p(&[1.0, 1.0]), 1.0, &p(&[1.0, 1.0])), Err(Error::CenterSingularity)));
    assert!(inversion_map(&p(&[0.0, 0.0]), 0.0, &p(&[1.0, 1.0])).is_err());
}

#[test]
fn modulus_bounds_examples() {
    assert_eq!(modulus_bounds(ModulusKind::EuclidFromK, 0.0, 3.0).unwrap(), 0.0);
    let c = modulus_bounds(ModulusKind::ChordalFromEuclid, 2.0 - 1e-9, 1.0).unwrap();
    assert!((c - 1.0).abs() < 1e-12);
    let e = modulus_bounds(ModulusKind::EuclidFromJ, 2.0 * 0.5f64.atanh(), 1.0).unwrap();
    assert!((e - 1.0).abs() < 1e-15);
    assert!(matches!(modulus_bounds(ModulusKind::ChordalFromEuclid, 2.0, 1.0), Err(Error::OutOfRange(_))));
    assert!(modulus_bounds(ModulusKind::EuclidFromK, -1.0, 1.0).is_err());
    assert!(modulus_bounds(ModulusKind::EuclidFromJ, 1.0, 0.0).is_err());
}

#[test]
fn stable_inverse_hyperbolics() {
    for z in [1e-300, 1e-12, 1e-3, 0.5, 3.0, 1e8] {
        assert!((arsinh(z) - z.asinh()).abs() <= 4e-16 * z.asinh().max(1e-300));
    }
    for z in [1e-300, 1e-12, 0.3, 0.999] {
        assert!((artanh(z) - z.atanh()).abs() <= 4e-16 * z.atanh().max(1e-300));
    }
}

fn in_ball2() -> impl Strategy<Value = [f64; 2]> {
    (0.0f64..0.98, 0.0f64..std::f64::consts::TAU).prop_map(|(r, a)| [r * a.cos(), r * a.sin()])
}

fn upper() -> impl Strategy<Value = [f64; 2]> {
    (-3.0f64..3.0, 0.01f64..3.0).prop_map(|(x, y)| [x, y])
}

fn axioms(d: impl Fn(&[f64], &[f64]) -> f64, x: &[f64], y: &[f64], z: &[f64]) -> Result<(), TestCaseError> {
    let (xy, yx) = (d(x, y), d(y, x));
    prop_assert_eq!(xy, yx);
    prop_assert!(xy >= 0.0);
    prop_assert_eq!(d(x, x), 0.0);
    prop_assert!(xy <= d(x, z) + d(z, y) + 1e-12 * xy.max(1.0));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn rho_is_a_metric(x in in_ball2(), y in in_ball2(), z in in_ball2()) {
        axioms(rho_ball_at, &x, &y, &z)?;
    }

    #[test]
    fn chordal_is_a_metric(x in upper(), y in upper(), z in upper()) {
        axioms(chordal_at, &x, &y, &z)?;
    }

    #[test]
    fn halfspace_is_a_metric(x in upper(), y in upper(), z in upper()) {
        axioms(k_halfspace_at, &x, &y, &z)?;
    }

    #[test]
    fn j_is_a_metric(x in in_ball2(), y in in_ball2(), z in in_ball2()) {
        let g = make_domain(&DomainSpec::unit_ball(2)).unwrap();
        axioms(|a, b| j_at(&g, a, b), &x, &y, &z)?;
    }

    #[test]
    fn j_rho_sandwich(x in in_ball2(), y in in_ball2()) {
        let g = make_domain(&DomainSpec::unit_ball(2)).unwrap();
        let (j, r) = (j_at(&g, &x, &y), rho_ball_at(&x, &y));
        prop_assert!(j <= r * (1.0 + 1e-12));
        prop_assert!(r <= 2.0 * j * (1.0 + 1e-12));
    }

    #[test]
    fn chordal_sharp_bound_in_ball(x in in_ball2(), y in in_ball2()) {
        let d = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
        prop_assert!(chordal_at(&x, &y) <= d / (1.0 + d * d / 4.0) * (1.0 + 1e-12));
        let nx = [-x[0], -x[1]];
        let dd = 2.0 * (x[0].hypot(x[1]));
        prop_assert!((chordal_at(&x, &nx) - dd / (1.0 + dd * dd / 4.0)).abs() <= 1e-14);
    }

    #[test]
    fn inversion_is_an_involution(a in upper(), x in upper(), r in 0.1f64..5.0) {
        prop_assume!((a[0] - x[0]).hypot(a[1] - x[1]) > 1e-3);
        let (pa, px) = (Point::from_slice(&a), Point::from_slice(&x));
        let back = inversion_map(&pa, r, &inversion_map(&pa, r, &px).unwrap()).unwrap();
        prop_assert!(back.distance(&px) <= 1e-12 * px.norm().max(1.0));
    }

    #[test]
    fn inversion_distance_identity(a in upper(), x in upper(), y in upper(), r in 0.1f64..5.0) {
        prop_assume!((a[0] - x[0]).hypot(a[1] - x[1]) > 1e-2 && (a[0] - y[0]).hypot(a[1] - y[1]) > 1e-2);
        let hx = inversion_at(&a, r, &x).unwrap();
        let hy = inversion_at(&a, r, &y).unwrap();
        let lhs = (hx[0] - hy[0]).hypot(hx[1] - hy[1]);
        let rhs = inversion_distance(&a, r, &x, &y);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300));
    }

    #[test]
    fn radial_j_strictly_subadditive(x in in_ball2()) {
        prop_assume!(x[0].hypot(x[1]) > 1e-6);
        let g = make_domain(&DomainSpec::unit_ball(2)).unwrap();
        let nx = [-x[0], -x[1]];
        let o = [0.0, 0.0];
        prop_assert!(j_at(&g, &nx, &x) < j_at(&g, &nx, &o) + j_at(&g, &o, &x));
    }
}
