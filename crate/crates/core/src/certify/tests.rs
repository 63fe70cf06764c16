use super::*;
use crate::algebra::Coeff;
use crate::curves::{curve_by_name, deltoid_witness, motzkin_form, poly_from};

fn deltoid_f(model: &CurveModel) -> Vec<f64> {
    restrict_form(model, &deltoid_witness(2), 2).unwrap()
}

fn motzkin(model: &CurveModel) -> Vec<f64> {
    restrict_form(model, &motzkin_form(), 3).unwrap()
}

#[test]
fn problem_dimensions() {
    let deltoid = curve_by_name("deltoid").unwrap();
    let p = build_multiplier_problem(&deltoid, &deltoid_f(&deltoid), 2, 1).unwrap();
    assert_eq!(p.blocks, vec![3, 10]);
    assert_eq!(p.constraints.len(), 22);
    let p2 = curve_by_name("p2").unwrap();
    let p = build_multiplier_problem(&p2, &motzkin(&p2), 3, 1).unwrap();
    assert_eq!(p.blocks, vec![3, 15]);
    assert_eq!(p.constraints.len(), 45);
    let p = build_multiplier_problem(&p2, &motzkin(&p2), 3, 0).unwrap();
    assert_eq!(p.blocks[0], 1);
}

#[test]
fn zero_form_rejected() {
    let p2 = curve_by_name("p2").unwrap();
    assert!(matches!(
        build_multiplier_problem(&p2, &[0.0; 6], 1, 1),
        Err(CertifyError::ZeroForm(2))
    ));
    assert!(matches!(
        build_multiplier_problem(&p2, &[1.0; 5], 1, 1),
        Err(CertifyError::Dimension { .. })
    ));
}

#[test]
fn deltoid_sharpness() {
    let model = curve_by_name("deltoid").unwrap();
    let f = deltoid_f(&model);
    let opts = SdpOptions::default();
    for k in 0..=1 {
        match certify_multiplier(&model, &f, 2, k, &opts).unwrap() {
            CertifyOutcome::Separator(sep) => {
                assert!(verify_separator(&model, &f, 2, &sep, 1e-6).passed);
                assert!(verify_separator(&model, &f, 2, &sep, sep.margin).passed);
            }
            o => panic!("k={k}: {o:?}"),
        }
    }
    match certify_multiplier(&model, &f, 2, 2, &opts).unwrap() {
        CertifyOutcome::Certificate(cert) => {
            assert!(verify_certificate(&model, &f, &cert, 1e-6).passed);
            assert!((cert.gram_a.trace() - 1.0).abs() < 1e-8);
            let mut bad = cert.clone();
            let v = bad.gram_b.get(0, 1);
            bad.gram_b.set(0, 1, v + 1e-2);
            assert!(!verify_certificate(&model, &f, &bad, 1e-6).passed);
        }
        o => panic!("{o:?}"),
    }
}

#[test]
fn motzkin_needs_one_multiplier_degree() {
    let model = curve_by_name("p2").unwrap();
    let f = motzkin(&model);
    let opts = SdpOptions::default();
    assert!(certify_multiplier(&model, &f, 3, 0, &opts).unwrap().is_separator());
    match certify_multiplier(&model, &f, 3, 1, &opts).unwrap() {
        CertifyOutcome::Certificate(cert) => assert!(verify_certificate(&model, &f, &cert, 1e-6).passed),
        o => panic!("{o:?}"),
    }
}

#[test]
fn explicit_square_certificate() {
    // f = x0², A = [1], B = e0 e0ᵀ over the basis of R_1
    for name in ["deltoid", "quartic-triple-point", "p2"] {
        let model = curve_by_name(name).unwrap();
        let sq = poly_from(3, &[(&[2, 0, 0], 1, 1)]);
        let f = restrict_form(&model, &sq, 1).unwrap();
        let lin: Vec<f64> = model
            .restrict_in_degree(&poly_from(3, &[(&[1, 0, 0], 1, 1)]), 1)
            .unwrap()
            .iter()
            .map(|c| c.to_f64())
            .collect();
        let q = lin.len();
        let b = SymMatrix::from_upper(q, |a, c| lin[a] * lin[c]);
        let cert = MultiplierCertificate {
            j: 1,
            k: 0,
            gram_a: SymMatrix::identity(1),
            gram_b: b,
            residual: 0.0,
            eig_margins: (1.0, 0.0),
        };
        let v = verify_certificate(&model, &f, &cert, 1e-6);
        assert!(v.passed, "{name}: {:?}", v.reasons);
        match certify_multiplier(&model, &f, 1, 0, &SdpOptions::default()).unwrap() {
            CertifyOutcome::Certificate(c) => assert!(verify_certificate(&model, &f, &c, 1e-6).passed),
            o => panic!("{name}: {o:?}"),
        }
    }
}

#[test]
fn degenerate_separators_rejected() {
    let model = curve_by_name("p2").unwrap();
    let f = motzkin(&model);
    // a single point evaluation has a rank-one catalecticant
    let ell = MomentFunctional::evaluation(&model, 8, &[0.3, -0.5, 0.8]).normalized();
    let sep = StrictSeparator { ell, margin: 0.0 };
    assert!(!verify_separator(&model, &f, 3, &sep, 1e-6).passed);
    // with f = 1 the localized matrix equals the catalecticant
    let one = vec![1.0];
    let mut ell = MomentFunctional::evaluation(&model, 2, &[1.0, 0.0, 0.0]);
    for p in [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
        ell = ell.add(&MomentFunctional::evaluation(&model, 2, &p)).unwrap();
    }
    let sep = StrictSeparator {
        ell: ell.normalized(),
        margin: 0.0,
    };
    let v = verify_separator(&model, &one, 0, &sep, 1e-6);
    assert!(!v.passed);
    assert!(v.reasons.iter().any(|r| r.contains("localized")));
}

#[test]
fn search_stops_at_first_certificate() {
    let model = curve_by_name("deltoid").unwrap();
    let f = deltoid_f(&model);
    let opts = SdpOptions::default();
    let table = search_min_multiplier_degree(&model, &f, 2, 4, false, &opts).unwrap();
    let kinds: Vec<(u32, bool, bool)> = table
        .iter()
        .map(|e| (e.k, e.outcome.is_separator(), e.outcome.is_certificate()))
        .collect();
    assert_eq!(kinds, vec![(0, true, false), (1, true, false), (2, false, true)]);
    let full = search_min_multiplier_degree(&model, &f, 2, 3, true, &opts).unwrap();
    assert_eq!(full.len(), 4);
    assert!(full[3].outcome.is_certificate());
}

#[test]
fn outcome_json_is_tagged() {
    let model = curve_by_name("deltoid").unwrap();
    let f = deltoid_f(&model);
    let o = certify_multiplier(&model, &f, 2, 1, &SdpOptions::default()).unwrap();
    let v = serde_json::to_value(&o).unwrap();
    assert_eq!(v["outcome"], "separator");
    assert!(v["ell"]["coords"].is_array());
    let CertifyOutcome::Separator(sep) = o else { unreachable!() };
    let back: StrictSeparator = serde_json::from_value(v).unwrap();
    assert_eq!(back, sep);
}
