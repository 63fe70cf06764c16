//! Lattice polygons and the toric curve invariants attached to them.

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::Rat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolygonError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon has zero area")]
    Degenerate,
    #[error("vertices are not strictly convex and counterclockwise at vertex {0}")]
    NotConvex(usize),
    #[error("polygon is not smooth")]
    NotSmooth,
    #[error("j must be at least 2, got {0}")]
    SmallJ(u32),
    #[error("every dilate up to {0} is free of interior points")]
    DilateCap(u32),
    #[error("unknown polygon `{0}`")]
    UnknownName(String),
}

/// Convex lattice polygon, vertices counterclockwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PolygonJson", into = "PolygonJson")]
pub struct LatticePolygon {
    vertices: Vec<[i64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct PolygonJson {
    vertices: Vec<[i64; 2]>,
}

impl TryFrom<PolygonJson> for LatticePolygon {
    type Error = PolygonError;
    fn try_from(p: PolygonJson) -> Result<Self, PolygonError> {
        LatticePolygon::new(p.vertices)
    }
}

impl From<LatticePolygon> for PolygonJson {
    fn from(p: LatticePolygon) -> Self {
        PolygonJson {
            vertices: p.vertices,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PolygonInvariants {
    pub two_area: u64,
    pub boundary: u64,
    pub interior: u64,
}

/// One edge `v_i → v_{i+1}` with its inner normal `u` and offset `a`, so
/// that `⟨m, u⟩ + a ≥ 0` on the polygon with equality along the edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub start: [i64; 2],
    pub direction: [i64; 2],
    pub lattice_length: u64,
    pub normal: [i64; 2],
    pub offset: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToricCurveInvariants {
    pub j: u32,
    pub d: u64,
    pub p_a: u64,
    pub r: i64,
    #[serde(serialize_with = "crate::io::ser_rat")]
    pub two_pa_over_d: Rat,
}

fn cross(a: [i64; 2], b: [i64; 2]) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub(a: [i64; 2], b: [i64; 2]) -> [i64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

impl LatticePolygon {
    pub fn new(vertices: Vec<[i64; 2]>) -> Result<Self, PolygonError> {
        let n = vertices.len();
        if n < 3 {
            return Err(PolygonError::TooFewVertices(n));
        }
        for i in 0..n {
            let a = vertices[(i + n - 1) % n];
            let b = vertices[i];
            let c = vertices[(i + 1) % n];
            if cross(sub(b, a), sub(c, b)) <= 0 {
                return Err(PolygonError::NotConvex(i));
            }
        }
        let p = LatticePolygon { vertices };
        if p.two_area() <= 0 {
            return Err(PolygonError::Degenerate);
        }
        // a star polygon passes the turn test but winds more than once
        let winding: f64 = (0..n)
            .map(|i| {
                let d0 = sub(p.vertices[i], p.vertices[(i + n - 1) % n]);
                let d1 = sub(p.vertices[(i + 1) % n], p.vertices[i]);
                (cross(d0, d1) as f64).atan2((d0[0] * d1[0] + d0[1] * d1[1]) as f64)
            })
            .sum();
        if (winding - 2.0 * std::f64::consts::PI).abs() > 1e-6 {
            return Err(PolygonError::NotConvex(0));
        }
        Ok(p)
    }

    /// Convex hull of a point set (counterclockwise, collinear points dropped).
    pub fn hull(points: &[[i64; 2]]) -> Result<Self, PolygonError> {
        let mut pts = points.to_vec();
        pts.sort_unstable();
        pts.dedup();
        if pts.len() < 3 {
            return Err(PolygonError::TooFewVertices(pts.len()));
        }
        let mut lower: Vec<[i64; 2]> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2
                && cross(
                    sub(lower[lower.len() - 1], lower[lower.len() - 2]),
                    sub(p, lower[lower.len() - 1]),
                ) <= 0
            {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<[i64; 2]> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2
                && cross(
                    sub(upper[upper.len() - 1], upper[upper.len() - 2]),
                    sub(p, upper[upper.len() - 1]),
                ) <= 0
            {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        if lower.len() < 3 {
            return Err(PolygonError::Degenerate);
        }
        LatticePolygon::new(lower)
    }

    pub fn vertices(&self) -> &[[i64; 2]] {
        &self.vertices
    }

    /// `conv{(0,0), (1,0), (0,1)}`.
    pub fn simplex() -> Self {
        LatticePolygon {
            vertices: vec![[0, 0], [1, 0], [0, 1]],
        }
    }

    /// `conv{(0,0), (s+1,0), (r+s+1,1), (0,1)}`.
    pub fn hirzebruch(r: u32, s: u32) -> Self {
        let (r, s) = (r as i64, s as i64);
        LatticePolygon {
            vertices: vec![[0, 0], [s + 1, 0], [r + s + 1, 1], [0, 1]],
        }
    }

    pub fn dilate(&self, t: u32) -> Self {
        LatticePolygon {
            vertices: self
                .vertices
                .iter()
                .map(|v| [v[0] * t as i64, v[1] * t as i64])
                .collect(),
        }
    }

    /// Twice the area, by the shoelace formula.
    pub fn two_area(&self) -> i64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| cross(self.vertices[i], self.vertices[(i + 1) % n]))
            .sum()
    }

    pub fn edges(&self) -> Vec<Edge> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                let v = sub(b, a);
                let g = v[0].gcd(&v[1]);
                let direction = [v[0] / g, v[1] / g];
                // inner normal of a counterclockwise edge is the left turn
                let normal = [-direction[1], direction[0]];
                let offset = -(normal[0] * a[0] + normal[1] * a[1]);
                Edge {
                    start: a,
                    direction,
                    lattice_length: g as u64,
                    normal,
                    offset,
                }
            })
            .collect()
    }

    /// All lattice points, sorted lexicographically.
    pub fn lattice_points(&self) -> Vec<[i64; 2]> {
        let edges = self.edges();
        let (xmin, xmax) = minmax(self.vertices.iter().map(|v| v[0]));
        let (ymin, ymax) = minmax(self.vertices.iter().map(|v| v[1]));
        let mut out = Vec::new();
        for x in xmin..=xmax {
            for y in ymin..=ymax {
                if edges
                    .iter()
                    .all(|e| e.normal[0] * x + e.normal[1] * y + e.offset >= 0)
                {
                    out.push([x, y]);
                }
            }
        }
        out
    }
}

fn minmax(it: impl Iterator<Item = i64> + Clone) -> (i64, i64) {
    (it.clone().min().unwrap(), it.max().unwrap())
}

pub fn polygon_invariants(q: &LatticePolygon) -> PolygonInvariants {
    let two_area = q.two_area() as u64;
    let boundary: u64 = q.edges().iter().map(|e| e.lattice_length).sum();
    // Pick: 2A = 2I + B − 2
    let interior = (two_area + 2 - boundary) / 2;
    PolygonInvariants {
        two_area,
        boundary,
        interior,
    }
}

/// Whether both primitive edge directions at every vertex form a lattice basis.
pub fn is_smooth(q: &LatticePolygon) -> bool {
    let edges = q.edges();
    let n = edges.len();
    (0..n).all(|i| {
        let incoming = edges[(i + n - 1) % n].direction;
        let outgoing = edges[i].direction;
        cross(incoming, outgoing).abs() == 1
    })
}

/// Number of lattice points of `iQ`: `Area·i² + (B/2)·i + 1`.
pub fn ehrhart(q: &LatticePolygon, i: u32) -> u64 {
    let inv = polygon_invariants(q);
    let i = i as u64;
    (inv.two_area * i * i + inv.boundary * i + 2) / 2
}

/// Interior lattice count of `tQ`, by Pick.
pub fn interior_of_dilate(q: &LatticePolygon, t: u32) -> u64 {
    let inv = polygon_invariants(q);
    let t = t as u64;
    (inv.two_area * t * t + 2 - inv.boundary * t) / 2
}

/// The largest `t` such that `tQ` has no interior lattice point.
pub fn largest_hollow_dilate(q: &LatticePolygon) -> Result<u32, PolygonError> {
    const CAP: u32 = 50;
    let mut t = 0;
    while t < CAP {
        if interior_of_dilate(q, t + 1) > 0 {
            return Ok(t);
        }
        t += 1;
    }
    Err(PolygonError::DilateCap(CAP))
}

/// Degree, genus and `r` of curves in `|(j−1)·L_Q|` on the toric surface of `Q`.
pub fn toric_curve_invariants(
    q: &LatticePolygon,
    j: u32,
) -> Result<ToricCurveInvariants, PolygonError> {
    if !is_smooth(q) {
        return Err(PolygonError::NotSmooth);
    }
    if j < 2 {
        return Err(PolygonError::SmallJ(j));
    }
    let t = j - 1;
    let inv = polygon_invariants(q);
    let d = inv.two_area * t as u64;
    let p_a = interior_of_dilate(q, t);
    let m = largest_hollow_dilate(q)?;
    let two_pa_over_d = Rat::new((2 * p_a).into(), d.into());
    debug_assert!(!d.is_zero());
    Ok(ToricCurveInvariants {
        j,
        d,
        p_a,
        r: t as i64 - m as i64,
        two_pa_over_d,
    })
}

/// Resolves `simplex`, `simplex2` and `hirzebruch:r,s`.
pub fn polygon_by_name(name: &str) -> Result<LatticePolygon, PolygonError> {
    match name {
        "simplex" => Ok(LatticePolygon::simplex()),
        "simplex2" => Ok(LatticePolygon::simplex().dilate(2)),
        _ => {
            let bad = || PolygonError::UnknownName(name.to_string());
            let rest = name.strip_prefix("hirzebruch:").ok_or_else(bad)?;
            let (r, s) = rest.split_once(',').ok_or_else(bad)?;
            let r = r.trim().parse().map_err(|_| bad())?;
            let s = s.trim().parse().map_err(|_| bad())?;
            Ok(LatticePolygon::hirzebruch(r, s))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{binomial, ratio};
    use proptest::prelude::*;

    fn brute_interior(q: &LatticePolygon) -> u64 {
        let edges = q.edges();
        q.lattice_points()
            .iter()
            .filter(|p| {
                edges
                    .iter()
                    .all(|e| e.normal[0] * p[0] + e.normal[1] * p[1] + e.offset > 0)
            })
            .count() as u64
    }

    #[test]
    fn invariants_of_builtins() {
        let tri = |q: &LatticePolygon| {
            let i = polygon_invariants(q);
            (i.two_area, i.boundary, i.interior)
        };
        assert_eq!(tri(&LatticePolygon::simplex()), (1, 3, 0));
        assert_eq!(tri(&LatticePolygon::simplex().dilate(2)), (4, 6, 0));
        assert_eq!(tri(&LatticePolygon::hirzebruch(1, 0)), (3, 5, 0));
    }

    #[test]
    fn smoothness() {
        assert!(is_smooth(&LatticePolygon::simplex()));
        assert!(is_smooth(&LatticePolygon::simplex().dilate(2)));
        assert!(is_smooth(&LatticePolygon::hirzebruch(1, 0)));
        let q = LatticePolygon::new(vec![[0, 0], [2, 0], [0, 1]]).unwrap();
        assert!(!is_smooth(&q));
        assert_eq!(
            toric_curve_invariants(&q, 2).unwrap_err(),
            PolygonError::NotSmooth
        );
    }

    #[test]
    fn rejects_bad_polygons() {
        assert!(LatticePolygon::new(vec![[0, 0], [0, 1], [1, 0]]).is_err());
        assert!(LatticePolygon::new(vec![[0, 0], [1, 0], [2, 0], [0, 1]]).is_err());
        assert!(LatticePolygon::new(vec![[0, 0], [1, 0]]).is_err());
    }

    #[test]
    fn ehrhart_values() {
        assert_eq!(ehrhart(&LatticePolygon::simplex(), 2), 6);
        assert_eq!(ehrhart(&LatticePolygon::simplex().dilate(2), 1), 6);
        for name in ["simplex", "simplex2", "hirzebruch:1,0", "hirzebruch:2,3"] {
            let q = polygon_by_name(name).unwrap();
            assert_eq!(ehrhart(&q, 0), 1);
            for i in 1..=5 {
                assert_eq!(ehrhart(&q, i), q.dilate(i).lattice_points().len() as u64);
            }
        }
    }

    #[test]
    fn simplex_dilate_interiors() {
        for t in 1..=8u32 {
            let q = LatticePolygon::simplex().dilate(t);
            assert_eq!(
                polygon_invariants(&q).interior as i64,
                binomial(t as i64 - 1, 2)
            );
            assert_eq!(brute_interior(&q) as i64, binomial(t as i64 - 1, 2));
        }
    }

    #[test]
    fn toric_examples() {
        let inv = toric_curve_invariants(&polygon_by_name("simplex2").unwrap(), 3).unwrap();
        assert_eq!((inv.d, inv.p_a, inv.r), (8, 3, 1));
        assert_eq!(inv.two_pa_over_d, ratio(3, 4));
        let inv = toric_curve_invariants(&LatticePolygon::simplex(), 4).unwrap();
        assert_eq!((inv.d, inv.p_a, inv.r), (3, 1, 1));
        assert_eq!(inv.two_pa_over_d, ratio(2, 3));
        let inv = toric_curve_invariants(&LatticePolygon::hirzebruch(1, 0), 2).unwrap();
        assert_eq!((inv.d, inv.p_a, inv.r), (3, 0, 0));
        assert_eq!(inv.two_pa_over_d, ratio(0, 1));
    }

    #[test]
    fn toric_families() {
        for j in 2..=6i64 {
            let jr = |n: i64| ratio(n, 1);
            let v = toric_curve_invariants(&polygon_by_name("simplex2").unwrap(), j as u32).unwrap();
            assert_eq!(v.two_pa_over_d, jr(j - 2) + ratio(2 - j, 2 * (j - 1)));
            assert_eq!(v.r, j - 2);
            let p = toric_curve_invariants(&LatticePolygon::simplex(), j as u32).unwrap();
            assert_eq!(p.two_pa_over_d, jr(j - 4) + ratio(2, j - 1));
            assert_eq!(p.r, j - 3);
            for (r, s) in [(1i64, 0i64), (2, 1), (0, 2)] {
                let h = toric_curve_invariants(&LatticePolygon::hirzebruch(r as u32, s as u32), j as u32)
                    .unwrap();
                // (r/2 + s + 1)(j−1) = (r + 2s + 2)(j−1)/2
                assert_eq!(
                    h.two_pa_over_d,
                    jr(j - 2) + ratio(2 * (2 - j), (r + 2 * s + 2) * (j - 1))
                );
                assert_eq!(h.r, j - 2);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let q: LatticePolygon = serde_json::from_str(r#"{"vertices":[[0,0],[1,0],[0,1]]}"#).unwrap();
        assert_eq!(q, LatticePolygon::simplex());
        assert_eq!(
            serde_json::to_string(&q).unwrap(),
            r#"{"vertices":[[0,0],[1,0],[0,1]]}"#
        );
        assert!(serde_json::from_str::<LatticePolygon>(r#"{"vertices":[[0,0],[1,0]]}"#).is_err());
    }

    proptest! {
        #[test]
        fn pick_holds_on_random_hulls(
            pts in proptest::collection::vec((-6i64..=6, -6i64..=6), 3..12)
        ) {
            let pts: Vec<[i64; 2]> = pts.into_iter().map(|(a, b)| [a, b]).collect();
            if let Ok(q) = LatticePolygon::hull(&pts) {
                let inv = polygon_invariants(&q);
                prop_assert_eq!(inv.interior, brute_interior(&q));
                prop_assert_eq!(
                    inv.two_area + 2,
                    2 * inv.interior + inv.boundary
                );
                prop_assert_eq!(
                    q.lattice_points().len() as u64,
                    inv.interior + inv.boundary
                );
            }
        }
    }
}
