//! Rational Harnack curves on toric surfaces: construction from a smooth
//! lattice polygon, node detection, and distance-quadric witnesses.

mod nodes;
mod witness;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraError, Rat};
use crate::curves::{binary_poly, CurveError, ParamCurveModel};
use crate::polygon::{is_smooth, LatticePolygon, PolygonError};

pub use nodes::{detect_nodes, NodeKind, NodePair, NodeReport, Param};
pub use witness::{implicit_equations, make_nonnegative_witness, on_curve_residual, Witness};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnackError {
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("t must be at least 1")]
    ZeroMultiple,
    #[error("edge {edge} needs {expected} roots, got {got}")]
    RootCount {
        edge: usize,
        expected: usize,
        got: usize,
    },
    #[error("roots are not pairwise distinct")]
    RepeatedRoot,
    #[error("root intervals of the edges overlap or are not in cyclic edge order")]
    RootOrder,
    #[error("negative exponent at lattice point {0:?} (presentation bug)")]
    NegativeExponent([i64; 2]),
    #[error("forms have different degrees")]
    DegreeMismatch,
    #[error("node detection is ill-conditioned: residual {0:e}")]
    IllConditioned(f64),
    #[error("node elimination failed: {0}")]
    Elimination(String),
    #[error("expected {expected} points, got {got}")]
    PointCount { expected: usize, got: usize },
    #[error("point {index} is off the curve (residual {residual:e})")]
    OffCurve { index: usize, residual: f64 },
    #[error("point {index} has no usable affine chart")]
    NoChart { index: usize },
    #[error("cannot isolate point {index}: every tested ball captures other curve samples")]
    NoIsolation { index: usize },
    #[error("witness has a vanishing derivative at point {index} (relative gradient {gradient:e})")]
    FlatWitness { index: usize, gradient: f64 },
}

/// Data for the construction: the polygon, the class multiple `t`, and one
/// list of roots per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct HarnackSpec {
    pub polygon: LatticePolygon,
    pub t: u32,
    pub roots: Vec<Vec<Rat>>,
}

impl HarnackSpec {
    pub fn new(polygon: LatticePolygon, t: u32, roots: Vec<Vec<Rat>>) -> Result<Self, HarnackError> {
        let spec = HarnackSpec { polygon, t, roots };
        spec.validate()?;
        Ok(spec)
    }

    /// The spec with [`default_roots`].
    pub fn with_default_roots(polygon: LatticePolygon, t: u32) -> Result<Self, HarnackError> {
        let roots = default_roots(&polygon, t)?;
        Self::new(polygon, t, roots)
    }

    pub fn validate(&self) -> Result<(), HarnackError> {
        if self.t == 0 {
            return Err(HarnackError::ZeroMultiple);
        }
        if !is_smooth(&self.polygon) {
            return Err(PolygonError::NotSmooth.into());
        }
        let edges = self.polygon.edges();
        if self.roots.len() != edges.len() {
            return Err(HarnackError::RootCount {
                edge: self.roots.len().min(edges.len()),
                expected: edges.len(),
                got: self.roots.len(),
            });
        }
        for (i, (e, r)) in edges.iter().zip(&self.roots).enumerate() {
            let expected = (self.t as u64 * e.lattice_length) as usize;
            if r.len() != expected {
                return Err(HarnackError::RootCount {
                    edge: i,
                    expected,
                    got: r.len(),
                });
            }
        }
        let mut all: Vec<&Rat> = self.roots.iter().flatten().collect();
        all.sort();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(HarnackError::RepeatedRoot);
        }
        // intervals must be disjoint and, read left to right, a rotation of
        // the edge order
        let intervals: Vec<(Rat, Rat)> = self
            .roots
            .iter()
            .map(|r| {
                (
                    r.iter().min().unwrap().clone(),
                    r.iter().max().unwrap().clone(),
                )
            })
            .collect();
        let mut order: Vec<usize> = (0..intervals.len()).collect();
        order.sort_by(|&a, &b| intervals[a].0.cmp(&intervals[b].0));
        for w in order.windows(2) {
            if intervals[w[0]].1 >= intervals[w[1]].0 {
                return Err(HarnackError::RootOrder);
            }
        }
        let n = order.len();
        let start = order[0];
        if (0..n).any(|k| order[k] != (start + k) % n) {
            return Err(HarnackError::RootOrder);
        }
        Ok(())
    }
}

/// Edge `i` gets `t·ℓᵢ` equally spaced rationals in `(i, i+1)`.
pub fn default_roots(q: &LatticePolygon, t: u32) -> Result<Vec<Vec<Rat>>, HarnackError> {
    if !is_smooth(q) {
        return Err(PolygonError::NotSmooth.into());
    }
    Ok(q.edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let count = t as i64 * e.lattice_length as i64;
            (1..=count)
                .map(|k| Rat::from_integer(i.into()) + Rat::new(k.into(), (count + 1).into()))
                .collect()
        })
        .collect())
}

/// Binary coefficient vector of `∏ (x0 − c x1)`; index `k` holds the
/// coefficient of `x0^(e−k) x1^k`.
fn linear_product(roots: &[Rat]) -> Vec<Rat> {
    let mut v = vec![Rat::one()];
    for c in roots {
        let mut next = vec![Rat::zero(); v.len() + 1];
        for (k, a) in v.iter().enumerate() {
            next[k] += a;
            next[k + 1] -= a * c;
        }
        v = next;
    }
    v
}

fn convolve(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// One form `∏ᵢ fᵢ^(⟨m,uᵢ⟩+aᵢ)` per lattice point `m` of `Q` (lexicographic
/// order), with `fᵢ` the product of the linear forms of edge `i`.
pub fn harnack_forms(spec: &HarnackSpec) -> Result<Vec<crate::algebra::Polynomial<Rat>>, HarnackError> {
    spec.validate()?;
    let edges = spec.polygon.edges();
    let factors: Vec<Vec<Rat>> = spec.roots.iter().map(|r| linear_product(r)).collect();
    let mut forms = Vec::new();
    let mut degree = None;
    for m in spec.polygon.lattice_points() {
        let mut v = vec![Rat::one()];
        for (e, f) in edges.iter().zip(&factors) {
            let exp = e.normal[0] * m[0] + e.normal[1] * m[1] + e.offset;
            if exp < 0 {
                return Err(HarnackError::NegativeExponent(m));
            }
            for _ in 0..exp {
                v = convolve(&v, f);
            }
        }
        match degree {
            None => degree = Some(v.len()),
            Some(d) if d != v.len() => return Err(HarnackError::DegreeMismatch),
            _ => {}
        }
        forms.push(binary_poly(&v));
    }
    Ok(forms)
}

pub fn harnack_parametrization(spec: &HarnackSpec) -> Result<ParamCurveModel, HarnackError> {
    Ok(ParamCurveModel::new(harnack_forms(spec)?)?)
}

#[cfg(test)]
mod tests;
