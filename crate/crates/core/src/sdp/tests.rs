use proptest::prelude::*;

use super::*;
use crate::algebra::{min_eigenvalue, Polynomial};
use crate::curves::{curve_by_name, deltoid_form, empty_conic_form, CurveModel};

fn binary_forms() -> CurveModel {
    CurveModel::ring(1)
}

fn signature(m: &SymMatrix, tol: f64) -> (usize, usize) {
    let e = sym_eig(m).unwrap();
    let big = e.eigenvalues.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let pos = e.eigenvalues.iter().filter(|&&x| x > tol * (1.0 + big)).count();
    let neg = e.eigenvalues.iter().filter(|&&x| x < -tol * (1.0 + big)).count();
    (pos, neg)
}

#[test]
fn evaluation_gives_outer_square() {
    let model = binary_forms();
    for m in 1..=3 {
        let ell = MomentFunctional::evaluation(&model, 2 * m, &[1.0, 1.0]);
        let cat = catalecticant(&model, &ell, m).unwrap();
        let v = model.eval_basis(m, &[1.0, 1.0]);
        for a in 0..v.len() {
            for b in 0..v.len() {
                assert!((cat.get(a, b) - v[a] * v[b]).abs() < 1e-12);
            }
        }
        assert_eq!(signature(&cat, 1e-10), (1, 0));
    }
}

#[test]
fn two_points_give_rank_two() {
    let model = binary_forms();
    let ell = MomentFunctional::evaluation(&model, 4, &[1.0, 0.5])
        .add(&MomentFunctional::evaluation(&model, 4, &[-0.3, 1.0]))
        .unwrap();
    let cat = catalecticant(&model, &ell, 2).unwrap();
    assert_eq!(signature(&cat, 1e-10), (2, 0));
    assert!(min_eigenvalue(&cat).unwrap() > -1e-12);
}

#[test]
fn conjugate_pair_real_part_is_indefinite() {
    // Re ℓ_z for z = (1, i): the catalecticant is Re(v vᵀ) = a aᵀ − b bᵀ
    let model = binary_forms();
    let basis = model.basis_monomials(2);
    let coords: Vec<f64> = basis
        .iter()
        .map(|mo| {
            let e = mo.exponents();
            // i^{e1}
            match e[1] % 4 {
                0 => 1.0,
                2 => -1.0,
                _ => 0.0,
            }
        })
        .collect();
    let ell = MomentFunctional::new(2, coords).unwrap();
    let cat = catalecticant(&model, &ell, 1).unwrap();
    assert_eq!(signature(&cat, 1e-10), (1, 1));
    let e = sym_eig(&cat).unwrap();
    // eigenvalues ±1 for a = (1, 0), b = (0, 1)
    assert!((e.max() - 1.0).abs() < 1e-12 && (e.min() + 1.0).abs() < 1e-12);
}

#[test]
fn localized_with_unit_is_catalecticant() {
    let model = curve_by_name("deltoid").unwrap();
    let ell = MomentFunctional::new(4, (0..model.hilbert_function(4)).map(|i| (i as f64).sin()).collect()).unwrap();
    let one = vec![1.0];
    let loc = localized_catalecticant(&model, &ell, &one, 0, 2).unwrap();
    let cat = catalecticant(&model, &ell, 2).unwrap();
    assert!(loc.add(&cat.scale(-1.0)).max_abs() < 1e-12);
}

#[test]
fn localized_by_defining_form_vanishes() {
    let model = curve_by_name("deltoid").unwrap();
    // the deltoid quartic has degree 4 = 2j with j = 2
    let f: Vec<f64> = model
        .restrict_f64(&deltoid_form().to_f64())
        .unwrap();
    assert!(f.iter().all(|x| x.abs() < 1e-12));
    let ell = MomentFunctional::new(6, (0..model.hilbert_function(6)).map(|i| (i as f64).cos()).collect()).unwrap();
    let loc = localized_catalecticant(&model, &ell, &f, 2, 1).unwrap();
    assert!(loc.max_abs() < 1e-12);
}

#[test]
fn degree_mismatch_is_an_error() {
    let model = binary_forms();
    let ell = MomentFunctional::new(3, vec![0.0; 4]).unwrap();
    assert!(matches!(catalecticant(&model, &ell, 1), Err(SdpError::Degree { .. })));
}

#[test]
fn corank_examples() {
    assert_eq!(corank(&SymMatrix::identity(3), 1e-9).unwrap(), 0);
    assert_eq!(corank(&SymMatrix::zeros(4), 1e-9).unwrap(), 4);
    let samosa = SymMatrix::from_rows(&[
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, -1.0],
        vec![0.0, -1.0, 1.0],
    ])
    .unwrap();
    assert_eq!(corank(&samosa, 1e-9).unwrap(), 1);
    let n = facet_normal(&samosa, 1e-9).unwrap();
    let r = 0.5f64.sqrt();
    assert!((n[0]).abs() < 1e-12 && (n[1] - r).abs() < 1e-12 && (n[2] - r).abs() < 1e-12);
}

#[test]
fn facet_normal_examples() {
    let n = facet_normal(&SymMatrix::diagonal(&[1.0, 1.0, 0.0]), 1e-9).unwrap();
    assert_eq!(n, vec![0.0, 0.0, 1.0]);
    assert!(matches!(
        facet_normal(&SymMatrix::diagonal(&[1.0, 0.0, 0.0]), 1e-9),
        Err(SdpError::Corank(2))
    ));
}

#[test]
fn empty_conic_is_not_pointed() {
    let model = CurveModel::plane(empty_conic_form()).unwrap();
    match check_pointed(&model, 1, &SdpOptions::default()).unwrap() {
        Pointedness::NotPointed { gram, residual } => {
            assert!(residual <= 1e-9);
            // x0² + x1² + x2² ≡ 0: the Gram matrix is a multiple of the identity
            let s = gram.get(0, 0);
            assert!(gram.add(&SymMatrix::identity(3).scale(-s)).max_abs() < 1e-7);
        }
        p => panic!("{p:?}"),
    }
}

#[test]
fn totally_real_models_are_pointed() {
    let deltoid = curve_by_name("deltoid").unwrap();
    assert!(check_pointed(&deltoid, 1, &SdpOptions::default()).unwrap().is_pointed());
    let p1 = binary_forms();
    for j in 1..=4 {
        assert!(check_pointed(&p1, j, &SdpOptions::default()).unwrap().is_pointed(), "j={j}");
    }
}

#[test]
fn sum_of_squares_defining_form_gives_small_residual() {
    // x0² + (x1 − x2)²: real points only at [0:1:1]
    let h = Polynomial::<crate::algebra::Rat>::from_terms(
        3,
        [
            (crate::algebra::Monomial::new(vec![2, 0, 0]), crate::algebra::rat(1)),
            (crate::algebra::Monomial::new(vec![0, 2, 0]), crate::algebra::rat(1)),
            (crate::algebra::Monomial::new(vec![0, 1, 1]), crate::algebra::rat(-2)),
            (crate::algebra::Monomial::new(vec![0, 0, 2]), crate::algebra::rat(1)),
        ],
    );
    let model = CurveModel::plane(h).unwrap();
    match check_pointed(&model, 1, &SdpOptions::default()) {
        Ok(Pointedness::NotPointed { residual, .. }) => assert!(residual <= 1e-9),
        other => panic!("{other:?}"),
    }
}

fn weighted_evaluations(model: &CurveModel, m: u32, pts: &[(Vec<f64>, f64)]) -> MomentFunctional {
    let mut ell = MomentFunctional::new(2 * m, vec![0.0; model.hilbert_function(2 * m)]).unwrap();
    for (p, w) in pts {
        ell = ell
            .add(&MomentFunctional::evaluation(model, 2 * m, p).scale(*w))
            .unwrap();
    }
    ell
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn catalecticant_is_linear(
        a in prop::collection::vec(-1.0f64..1.0, 6),
        b in prop::collection::vec(-1.0f64..1.0, 6),
        s in -3.0f64..3.0,
    ) {
        let model = curve_by_name("deltoid").unwrap();
        // R_2 of the plane quartic has dimension 6
        let la = MomentFunctional::new(2, a).unwrap();
        let lb = MomentFunctional::new(2, b).unwrap();
        let sum = catalecticant(&model, &la.add(&lb.scale(s)).unwrap(), 1).unwrap();
        let parts = catalecticant(&model, &la, 1).unwrap()
            .add(&catalecticant(&model, &lb, 1).unwrap().scale(s));
        let scale = 1.0 + parts.max_abs();
        prop_assert!(sum.add(&parts.scale(-1.0)).max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn inertia_bounded_by_weight_signs(
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -2.0f64..2.0), 10..14),
    ) {
        // R_4 of P¹ has dimension 5, so ≥ 10 points cover HF(2m) with m = 2
        let model = binary_forms();
        let pts: Vec<(Vec<f64>, f64)> = raw
            .iter()
            .filter(|(_, _, w)| w.abs() > 1e-3)
            .map(|(x, y, w)| (vec![*x, *y], *w))
            .collect();
        let ell = weighted_evaluations(&model, 2, &pts);
        let cat = catalecticant(&model, &ell, 2).unwrap();
        let (pos, neg) = signature(&cat, 1e-9);
        let wpos = pts.iter().filter(|p| p.1 > 0.0).count();
        let wneg = pts.iter().filter(|p| p.1 < 0.0).count();
        prop_assert!(pos <= wpos && neg <= wneg);
    }
}
