use super::*;
use crate::algebra::{binomial, ratio};
use crate::bounds::curve_invariants;
use crate::curves::{curve_by_name, deltoid_cusps, deltoid_form, poly_from, CurveModel};
use crate::polygon::{polygon_by_name, polygon_invariants};

fn model(q: &LatticePolygon, t: u32) -> CurveModel {
    let spec = HarnackSpec::with_default_roots(q.clone(), t).unwrap();
    CurveModel::Param(harnack_parametrization(&spec).unwrap())
}

#[test]
fn default_root_tables() {
    let roots = default_roots(&LatticePolygon::simplex(), 1).unwrap();
    assert_eq!(roots, vec![vec![ratio(1, 2)], vec![ratio(3, 2)], vec![ratio(5, 2)]]);
    let roots = default_roots(&LatticePolygon::simplex(), 3).unwrap();
    assert_eq!(roots[0], vec![ratio(1, 4), ratio(1, 2), ratio(3, 4)]);
    let roots = default_roots(&polygon_by_name("simplex2").unwrap(), 2).unwrap();
    assert!(roots.iter().all(|r| r.len() == 4));
}

#[test]
fn spec_validation() {
    let q = LatticePolygon::simplex();
    let bad = vec![vec![ratio(1, 2)], vec![ratio(1, 2)], vec![ratio(5, 2)]];
    assert_eq!(HarnackSpec::new(q.clone(), 1, bad).unwrap_err(), HarnackError::RepeatedRoot);
    let shuffled = vec![vec![ratio(1, 2)], vec![ratio(5, 2)], vec![ratio(3, 2)]];
    assert_eq!(HarnackSpec::new(q.clone(), 1, shuffled).unwrap_err(), HarnackError::RootOrder);
    // a rotation of the cyclic order is fine
    let rotated = vec![vec![ratio(5, 2)], vec![ratio(1, 2)], vec![ratio(3, 2)]];
    assert!(HarnackSpec::new(q.clone(), 1, rotated).is_ok());
    let interleaved = vec![
        vec![ratio(0, 1), ratio(2, 1)],
        vec![ratio(1, 1), ratio(3, 1)],
        vec![ratio(4, 1), ratio(5, 1)],
    ];
    assert_eq!(HarnackSpec::new(q.clone(), 2, interleaved).unwrap_err(), HarnackError::RootOrder);
    assert!(matches!(
        HarnackSpec::new(q, 2, vec![vec![ratio(1, 2)]; 3]),
        Err(HarnackError::RootCount { .. })
    ));
}

#[test]
fn degree_law() {
    for (name, ts) in [("simplex", 1..=4u32), ("simplex2", 1..=2), ("hirzebruch:1,0", 1..=3)] {
        let q = polygon_by_name(name).unwrap();
        let two_area = polygon_invariants(&q).two_area;
        for t in ts {
            let spec = HarnackSpec::with_default_roots(q.clone(), t).unwrap();
            let forms = harnack_forms(&spec).unwrap();
            assert_eq!(forms.len(), q.lattice_points().len());
            for f in &forms {
                assert_eq!(f.homogeneous_degree(), Some((two_area * t as u64) as u32));
            }
        }
    }
}

#[test]
fn genus_and_regularity_laws() {
    check_genus_laws(&[("simplex", 1..=4), ("simplex2", 1..=2), ("hirzebruch:1,0", 1..=3)]);
}

/// The remaining cases up to `t = 4`; several minutes of exact rank work.
#[test]
#[ignore]
fn genus_and_regularity_laws_large() {
    check_genus_laws(&[("simplex2", 3..=4), ("hirzebruch:1,0", 4..=4)]);
}

fn check_genus_laws(cases: &[(&str, std::ops::RangeInclusive<u32>)]) {
    for (name, range) in cases {
        let name = *name;
        let q = polygon_by_name(name).unwrap();
        let m_free = crate::polygon::largest_hollow_dilate(&q).unwrap() as i64;
        for t in range.clone() {
            let inv = curve_invariants(&model(&q, t)).unwrap();
            let two_area = polygon_invariants(&q).two_area;
            assert_eq!(inv.d, two_area * t as u64, "{name} t={t}");
            assert_eq!(
                inv.p_a as u64,
                polygon_invariants(&q.dilate(t)).interior,
                "{name} t={t}"
            );
            // r = j − 1 − m with j = t + 1, unless the curve is a line
            if inv.p_a > 0 || t > 1 {
                assert_eq!(inv.r, t as i64 - m_free, "{name} t={t}");
            }
        }
    }
}

#[test]
fn simplex_line_and_cubic() {
    let line = curve_invariants(&model(&LatticePolygon::simplex(), 1)).unwrap();
    assert_eq!((line.d, line.p_a), (1, 0));
    let cubic = curve_invariants(&model(&LatticePolygon::simplex(), 3)).unwrap();
    assert_eq!((cubic.d, cubic.p_a, cubic.r), (3, 1, 1));
}

#[test]
fn solitary_census_on_simplex() {
    for t in 1..=4u32 {
        let CurveModel::Param(p) = model(&LatticePolygon::simplex(), t) else {
            unreachable!()
        };
        let rep = detect_nodes(&p).unwrap();
        let expected = binomial(t as i64 - 1, 2) as usize;
        assert_eq!(rep.pairs.len(), expected, "t={t}: {rep:?}");
        assert_eq!(rep.count(NodeKind::Solitary), expected);
        assert!(rep.residual <= 1e-6);
    }
}

#[test]
fn solitary_census_other_polygons() {
    for (name, t) in [
        ("simplex2", 2u32),
        ("simplex2", 3),
        ("hirzebruch:1,0", 2),
        ("hirzebruch:1,0", 3),
        ("hirzebruch:1,0", 4),
    ] {
        let q = polygon_by_name(name).unwrap();
        let CurveModel::Param(p) = model(&q, t) else { unreachable!() };
        let rep = detect_nodes(&p).unwrap();
        let p_a = polygon_invariants(&q.dilate(t)).interior as usize;
        assert_eq!(rep.pairs.len(), p_a, "{name}: {rep:?}");
        assert_eq!(rep.count(NodeKind::Solitary), p_a);
    }
}

#[test]
fn triple_point_gives_three_crossings() {
    let CurveModel::Param(p) = curve_by_name("quartic-triple-point").unwrap() else {
        unreachable!()
    };
    let rep = detect_nodes(&p).unwrap();
    assert_eq!(rep.pairs.len(), 3, "{rep:?}");
    assert_eq!(rep.count(NodeKind::Crossing), 3);
    let near = |x: &Param, v: Option<f64>| match (x, v) {
        (Param::Infinity, None) => true,
        (Param::Finite(z), Some(v)) => (z.re - v).abs() < 1e-8 && z.im.abs() < 1e-8,
        _ => false,
    };
    for (a, b) in [(Some(0.0), Some(1.0)), (Some(0.0), None), (Some(1.0), None)] {
        assert!(
            rep.pairs.iter().any(|pr| near(&pr.s, a) && near(&pr.t, b)),
            "missing pair {a:?} {b:?}: {rep:?}"
        );
    }
}

#[test]
fn injective_conic_has_no_nodes() {
    let forms = vec![
        poly_from(2, &[(&[2, 0], 1, 1)]),
        poly_from(2, &[(&[1, 1], 1, 1)]),
        poly_from(2, &[(&[0, 2], 1, 1)]),
    ];
    let CurveModel::Param(p) = CurveModel::param(forms).unwrap() else {
        unreachable!()
    };
    assert!(detect_nodes(&p).unwrap().pairs.is_empty());
}

#[test]
fn node_report_json() {
    let CurveModel::Param(p) = model(&LatticePolygon::simplex(), 3) else {
        unreachable!()
    };
    let rep = detect_nodes(&p).unwrap();
    let v = serde_json::to_value(&rep).unwrap();
    assert_eq!(v["pairs"][0]["kind"], "solitary");
    assert_eq!(v["pairs"][0]["s"].as_array().unwrap().len(), 2);
}

#[test]
fn deltoid_cusp_witness() {
    let model = curve_by_name("deltoid").unwrap();
    let w = make_nonnegative_witness(&model, &deltoid_cusps(), 3).unwrap();
    assert_eq!(w.form.homogeneous_degree(), Some(6));
    let f = w.form.to_f64();
    for c in deltoid_cusps() {
        assert!(f.eval_f64(&c).abs() < 1e-9);
    }
    // trigonometric parametrization of the deltoid in the chart x2 = 1
    let h = deltoid_form().to_f64();
    let scale = f.max_abs_coeff();
    for k in 0..10_000 {
        let th = 2.0 * std::f64::consts::PI * k as f64 / 10_000.0;
        let p = [
            (2.0 * th.cos() + (2.0 * th).cos()) / 3.0,
            (2.0 * th.sin() - (2.0 * th).sin()) / 3.0,
            1.0,
        ];
        assert!(h.eval_f64(&p).abs() < 1e-12);
        assert!(f.eval_f64(&p) >= -1e-9 * scale, "{k}");
    }
}

#[test]
fn solitary_point_witness() {
    let m = model(&LatticePolygon::simplex(), 3);
    let CurveModel::Param(p) = &m else { unreachable!() };
    let rep = detect_nodes(p).unwrap();
    let Param::Finite(s) = rep.pairs[0].s else {
        panic!()
    };
    let pt = p.real_point_at(Some(s), 1e-9).unwrap();
    let w = make_nonnegative_witness(&m, std::slice::from_ref(&pt), 1).unwrap();
    let f = w.form.to_f64();
    assert!(f.eval_f64(&pt).abs() < 1e-9 * f.max_abs_coeff());
    let n: f64 = pt.iter().map(|x| x * x).sum::<f64>().sqrt();
    for y in m.real_samples(3000) {
        let v = f.eval_f64(&y);
        let close = y.iter().zip(&pt).map(|(a, b)| (a - b / n).powi(2)).sum::<f64>() < 1e-8;
        assert!(v > 0.0 || close);
    }
}

#[test]
fn empty_witness_is_one() {
    let model = curve_by_name("deltoid").unwrap();
    let w = make_nonnegative_witness(&model, &[], 0).unwrap();
    assert_eq!(w.coords.len(), 1);
    assert!(make_nonnegative_witness(&model, &[vec![1.0, 1.0, 1.0]], 1).is_err());
}
