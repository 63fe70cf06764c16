//! Curve invariants from Hilbert functions and the multiplier degree bounds
//! derived from them.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::binomial;
use crate::curves::{CurveError, CurveModel};
use crate::polygon::{ehrhart, toric_curve_invariants, LatticePolygon, PolygonError, ToricCurveInvariants};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("degree sequence must be nonempty with an entry above 1 and none below 1")]
    BadDegrees,
    #[error("j must be at least {0}")]
    SmallJ(u32),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error("degree must be positive")]
    ZeroDegree,
}

/// Degree, arithmetic genus and the regularity index `r` of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CurveInvariants {
    pub d: u64,
    pub p_a: i64,
    pub r: i64,
}

impl From<&ToricCurveInvariants> for CurveInvariants {
    fn from(t: &ToricCurveInvariants) -> Self {
        CurveInvariants {
            d: t.d,
            p_a: t.p_a as i64,
            r: t.r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub d: u64,
    pub p_a: i64,
    pub r: i64,
    pub k_curve: u64,
    pub k_degree_only: u64,
    #[serde(skip)]
    pub notes: Vec<String>,
}

/// Reads `d`, `p_a` and `r` off the Hilbert function. The scan stops once
/// three consecutive first differences agree, then checks three more values.
pub fn curve_invariants(model: &CurveModel) -> Result<CurveInvariants, BoundsError> {
    if !model.is_curve() {
        return Err(CurveError::NotACurve.into());
    }
    let cap = (4 * model.degree_hint()).max(8);
    let hf = |m: i64| -> i64 {
        if m < 0 {
            0
        } else {
            model.hilbert_function(m as u32) as i64
        }
    };
    let mut values: Vec<i64> = vec![hf(0), hf(1), hf(2), hf(3)];
    let mut stable = None;
    let mut m = 3usize;
    loop {
        let d1 = values[m] - values[m - 1];
        let d2 = values[m - 1] - values[m - 2];
        let d3 = values[m - 2] - values[m - 3];
        if d1 == d2 && d2 == d3 {
            stable = Some((m, d1));
        }
        if stable.is_some() || m as u32 >= cap {
            break;
        }
        m += 1;
        values.push(hf(m as i64));
    }
    let (top, d) = stable.ok_or(CurveError::NoStabilization(cap))?;
    if d <= 0 {
        return Err(CurveError::NoStabilization(cap).into());
    }
    let p_a = d * top as i64 + 1 - values[top];
    let hp = |m: i64| d * m + 1 - p_a;
    for extra in 1..=3 {
        let m = (top + extra) as i64;
        if hf(m) != hp(m) {
            return Err(CurveError::NoStabilization(m as u32).into());
        }
    }
    let mut r = top as i64;
    while hf(r - 1) == hp(r - 1) {
        r -= 1;
    }
    Ok(CurveInvariants {
        d: d as u64,
        p_a,
        r,
    })
}

/// `max(r, ⌈2p_a/d⌉, 0)`.
pub fn multiplier_degree_bound_curve(inv: &CurveInvariants) -> Result<u64, BoundsError> {
    if inv.d == 0 {
        return Err(BoundsError::ZeroDegree);
    }
    let d = inv.d as i64;
    let ceil = (2 * inv.p_a).div_euclid(d) + i64::from((2 * inv.p_a).rem_euclid(d) != 0);
    Ok(inv.r.max(ceil).max(0) as u64)
}

/// `max(d − n + 1, 0)`.
pub fn degree_only_bound(d: u64, n: u64) -> u64 {
    (d + 1).saturating_sub(n)
}

pub fn bound_report(model: &CurveModel) -> Result<BoundReport, BoundsError> {
    let inv = curve_invariants(model)?;
    let n = model.ambient_vars() as u64 - 1;
    Ok(BoundReport {
        d: inv.d,
        p_a: inv.p_a,
        r: inv.r,
        k_curve: multiplier_degree_bound_curve(&inv)?,
        k_degree_only: degree_only_bound(inv.d, n),
        notes: vec![
            "d, p_a, r: computed from the model's Hilbert function".into(),
            format!("k_degree_only: d - n + 1 with n = {n}"),
        ],
    })
}

/// Report for a curve of class `(j−1)·L_Q` on the toric surface embedded by
/// the lattice points of `Q`.
pub fn toric_bound_report(q: &LatticePolygon, j: u32) -> Result<BoundReport, BoundsError> {
    let t = toric_curve_invariants(q, j)?;
    let inv = CurveInvariants::from(&t);
    let n = ehrhart(q, 1) - 1;
    Ok(BoundReport {
        d: inv.d,
        p_a: inv.p_a,
        r: inv.r,
        k_curve: multiplier_degree_bound_curve(&inv)?,
        k_degree_only: degree_only_bound(inv.d, n),
        notes: vec![
            "d, p_a, r: polygon closed forms".into(),
            format!("k_degree_only: d - n + 1 with n = {n}"),
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CiForms {
    pub deg: u64,
    pub p_a: i64,
    pub k_bound: u64,
}

/// Degree, genus and multiplier bound of a complete intersection curve cut
/// out by forms of degrees `d₁, …, d_{n−1}` in `Pⁿ`.
pub fn ci_closed_forms(degrees: &[u64]) -> Result<CiForms, BoundsError> {
    if degrees.is_empty() || degrees.contains(&0) || degrees.iter().all(|&d| d == 1) {
        return Err(BoundsError::BadDegrees);
    }
    let n = degrees.len() as i64 + 1;
    let deg: u64 = degrees.iter().product();
    let sum: i64 = degrees.iter().sum::<u64>() as i64;
    // deg·(Σd − n − 1) is always even
    let p_a = deg as i64 * (sum - n - 1) / 2 + 1;
    Ok(CiForms {
        deg,
        p_a,
        k_bound: (sum - n).max(0) as u64,
    })
}

/// `r` of a complete intersection curve, `Σdᵢ − n`.
pub fn ci_regularity(degrees: &[u64]) -> i64 {
    degrees.iter().sum::<u64>() as i64 - degrees.len() as i64 - 1
}

/// Hilbert function with generating series `(Σ h_l t^l)(1−t)^{−(dim+1)}`,
/// zero in negative degrees.
pub fn hf_from_h_vector(h: &[i64], dim: u32, i: i64) -> i64 {
    h.iter()
        .enumerate()
        .filter(|(l, _)| i >= *l as i64)
        .map(|(l, c)| c * binomial(i - l as i64 + dim as i64, dim as i64))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SurfaceMargin {
    pub margin: i64,
    pub holds: bool,
}

/// Right side minus left side of
/// `HF(2j+2k) < (m+1)(HF(j+k) − HF(k−j)) + HF(2k) − C(m+1,2)`,
/// with `m` the dimension of the variety.
pub fn surface_inequality(
    hf: impl Fn(i64) -> i64,
    m: u32,
    j: u32,
    k: u32,
) -> Result<SurfaceMargin, BoundsError> {
    if j < 1 {
        return Err(BoundsError::SmallJ(1));
    }
    let (m, j, k) = (m as i64, j as i64, k as i64);
    let rhs = (m + 1) * (hf(j + k) - hf(k - j)) + hf(2 * k) - binomial(m + 1, 2);
    let margin = rhs - hf(2 * j + 2 * k);
    Ok(SurfaceMargin {
        margin,
        holds: margin > 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    /// Surface of minimal degree.
    Minimal,
    /// The projective plane.
    P2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Schedule {
    pub multiplier_degree: u64,
    pub product_degree: u64,
}

/// Degrees of an iterated multiplier for `f` of degree `2j`.
pub fn surface_multiplier_schedule(kind: SurfaceKind, j: u32) -> Result<Schedule, BoundsError> {
    let j = j as u64;
    match kind {
        SurfaceKind::Minimal => {
            if j < 1 {
                return Err(BoundsError::SmallJ(1));
            }
            Ok(Schedule {
                multiplier_degree: j * j - j,
                product_degree: j * j + j,
            })
        }
        SurfaceKind::P2 => {
            if j < 1 {
                return Err(BoundsError::SmallJ(1));
            }
            if j.is_multiple_of(2) {
                // degree 4J
                let big = j / 2;
                Ok(Schedule {
                    multiplier_degree: 2 * big * big - 2 * big,
                    product_degree: 2 * big * big + 2 * big,
                })
            } else {
                // degree 4J − 2
                let big = j.div_ceil(2);
                Ok(Schedule {
                    multiplier_degree: 2 * big * big - 4 * big + 2,
                    product_degree: 2 * big * big,
                })
            }
        }
    }
}

/// Hilbert function of a surface of minimal degree in `Pⁿ`.
pub fn minimal_surface_hf(n: u32) -> impl Fn(i64) -> i64 {
    move |i| hf_from_h_vector(&[1, n as i64 - 2], 2, i)
}

pub fn p2_hf(i: i64) -> i64 {
    hf_from_h_vector(&[1], 2, i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{curve_by_name, empty_conic_form, real_conic_form, CurveModel};
    use crate::polygon::polygon_by_name;

    #[test]
    fn deltoid_invariants() {
        let m = curve_by_name("deltoid").unwrap();
        assert_eq!(
            curve_invariants(&m).unwrap(),
            CurveInvariants { d: 4, p_a: 3, r: 2 }
        );
        let rep = bound_report(&m).unwrap();
        assert_eq!(
            serde_json::to_string(&rep).unwrap(),
            r#"{"d":4,"p_a":3,"r":2,"k_curve":2,"k_degree_only":3}"#
        );
    }

    #[test]
    fn conic_invariants() {
        for h in [empty_conic_form(), real_conic_form()] {
            let m = CurveModel::plane(h).unwrap();
            assert_eq!(
                curve_invariants(&m).unwrap(),
                CurveInvariants { d: 2, p_a: 0, r: 0 }
            );
        }
    }

    #[test]
    fn plane_curves_match_ci_forms() {
        let m = curve_by_name("quartic-triple-point").unwrap();
        let inv = curve_invariants(&m).unwrap();
        let ci = ci_closed_forms(&[4]).unwrap();
        assert_eq!((inv.d, inv.p_a), (ci.deg, ci.p_a));
        assert_eq!(inv.r, ci_regularity(&[4]));
        assert_eq!(multiplier_degree_bound_curve(&inv).unwrap(), 2);
    }

    #[test]
    fn ring_is_not_a_curve() {
        assert!(curve_invariants(&CurveModel::ring(2)).is_err());
    }

    #[test]
    fn curve_bound_examples() {
        let b = |d, p_a, r| multiplier_degree_bound_curve(&CurveInvariants { d, p_a, r }).unwrap();
        assert_eq!(b(4, 3, 2), 2);
        assert_eq!(b(8, 3, 1), 1);
        assert_eq!(b(5, 0, 0), 0);
        assert_eq!(b(3, 0, -1), 0);
        assert_eq!(b(3, 1, 0), 1);
    }

    #[test]
    fn degree_only_examples() {
        assert_eq!(degree_only_bound(4, 2), 3);
        assert_eq!(degree_only_bound(2, 2), 1);
        assert_eq!(degree_only_bound(5, 5), 1);
        assert_eq!(degree_only_bound(2, 5), 0);
    }

    #[test]
    fn ci_examples() {
        assert_eq!(
            ci_closed_forms(&[4]).unwrap(),
            CiForms { deg: 4, p_a: 3, k_bound: 2 }
        );
        assert_eq!(
            ci_closed_forms(&[2, 2]).unwrap(),
            CiForms { deg: 4, p_a: 1, k_bound: 1 }
        );
        assert_eq!(
            ci_closed_forms(&[2]).unwrap(),
            CiForms { deg: 2, p_a: 0, k_bound: 0 }
        );
        assert!(ci_closed_forms(&[1, 1]).is_err());
        assert!(ci_closed_forms(&[]).is_err());
    }

    #[test]
    fn plane_curve_genus_formula() {
        // (d−1)(d−2)/2 for every plane degree
        for d in 2..=7u64 {
            assert_eq!(ci_closed_forms(&[d]).unwrap().p_a, ((d - 1) * (d - 2) / 2) as i64);
        }
    }

    #[test]
    fn surface_margins() {
        for n in 3..=7 {
            let hf = minimal_surface_hf(n);
            for j in 1..=6u32 {
                let s = surface_inequality(&hf, 2, j, j - 1).unwrap();
                assert_eq!(s.margin, 4 * j as i64 - 3);
                assert!(s.holds);
            }
        }
        for j in 2..=6u32 {
            let s = surface_inequality(p2_hf, 2, j, j - 2).unwrap();
            assert_eq!(s.margin, 2 * j as i64 - 3);
        }
        for c in [[1, 2, 1, 0, 0], [1, -1, 3, 2, -1], [1, 4, 0, 1, 1]] {
            for j in 1..=6i64 {
                let hf = |i| hf_from_h_vector(&c, 2, i);
                let s = surface_inequality(hf, 2, j as u32, j as u32).unwrap();
                let (c1, c2, c3, c4) = (c[1], c[2], c[3], c[4]);
                assert_eq!(
                    s.margin,
                    2 * (c1 - c2 - 3 * c3 - 5 * c4 + 3) * j + 3 * (c3 + 3 * c4 - 1)
                );
            }
        }
        // quadratic forms on varieties of minimal degree: margin 1
        let s = surface_inequality(minimal_surface_hf(5), 2, 1, 0).unwrap();
        assert_eq!(s.margin, 1);
    }

    #[test]
    fn schedules() {
        let s = surface_multiplier_schedule(SurfaceKind::Minimal, 3).unwrap();
        assert_eq!((s.multiplier_degree, s.product_degree), (6, 12));
        let s = surface_multiplier_schedule(SurfaceKind::P2, 4).unwrap();
        assert_eq!((s.multiplier_degree, s.product_degree), (4, 12));
        let s = surface_multiplier_schedule(SurfaceKind::P2, 3).unwrap();
        assert_eq!((s.multiplier_degree, s.product_degree), (2, 8));
        for j in 1..=6u64 {
            let s = surface_multiplier_schedule(SurfaceKind::Minimal, j as u32).unwrap();
            assert_eq!(s.product_degree - s.multiplier_degree, 2 * j);
        }
    }

    #[test]
    fn toric_report_matches_closed_forms() {
        let rep = toric_bound_report(&polygon_by_name("simplex2").unwrap(), 3).unwrap();
        assert_eq!((rep.d, rep.p_a, rep.r, rep.k_curve), (8, 3, 1, 1));
        // 2Δ has 6 lattice points, so the curve sits in P^5
        assert_eq!(rep.k_degree_only, 4);
    }
}
