//! Presentations of the graded coordinate ring `R = S/I_X`.
//!
//! Every model exposes a basis of each graded piece `R_m` as a list of
//! monomial classes. All ring operations go through
//! [`CurveModel::monomial_coords`], the coordinates of the class of an
//! ambient monomial in that basis.

mod fixtures;
mod param;
mod plane;

use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{
    count_monomials, monomials_of_degree, AlgebraError, Coeff, Monomial, Polynomial, Rat,
    SubspaceBasis,
};

pub use fixtures::*;
pub use param::ParamCurveModel;
pub(crate) use param::{binary_poly, binary_vec};
pub use plane::PlaneCurveModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("expected {expected} variables, got {got}")]
    WrongVarCount { expected: usize, got: usize },
    #[error("form is not homogeneous")]
    NotHomogeneous,
    #[error("degree {0} is too small")]
    DegreeTooSmall(u32),
    #[error("no variable admits a monic leading term after coordinate shifts")]
    NoMonicDirection,
    #[error("parametrizing forms share a root on P^1")]
    CommonRoot,
    #[error("parametrizing forms have degrees {0} and {1}")]
    FormDegreeMismatch(u32, u32),
    #[error("all parametrizing forms vanish")]
    AllFormsZero,
    #[error("need at least two parametrizing forms, got {0}")]
    TooFewForms(usize),
    #[error("binary form is not in the degree-{0} piece of the image")]
    NotInGradedPiece(u32),
    #[error("element has {got} coordinates, expected {expected} for degree {degree}")]
    CoordLength {
        degree: u32,
        expected: usize,
        got: usize,
    },
    #[error("model is not a curve")]
    NotACurve,
    #[error("Hilbert function did not stabilize up to degree {0}")]
    NoStabilization(u32),
    #[error("unknown built-in name `{0}`")]
    UnknownName(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// The full polynomial ring on `Pⁿ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingModel {
    pub n: usize,
}

#[derive(Debug)]
pub enum CurveModel {
    Plane(PlaneCurveModel),
    Param(ParamCurveModel),
    Ring(RingModel),
}

impl CurveModel {
    pub fn plane(h: Polynomial<Rat>) -> Result<Self, CurveError> {
        Ok(CurveModel::Plane(PlaneCurveModel::new(h)?))
    }

    pub fn param(forms: Vec<Polynomial<Rat>>) -> Result<Self, CurveError> {
        Ok(CurveModel::Param(ParamCurveModel::new(forms)?))
    }

    pub fn ring(n: usize) -> Self {
        CurveModel::Ring(RingModel { n })
    }

    /// Number of homogeneous coordinates `n + 1`.
    pub fn ambient_vars(&self) -> usize {
        match self {
            CurveModel::Plane(_) => 3,
            CurveModel::Param(p) => p.ambient_vars(),
            CurveModel::Ring(r) => r.n + 1,
        }
    }

    pub fn is_curve(&self) -> bool {
        !matches!(self, CurveModel::Ring(_))
    }

    /// A degree bound used to cap Hilbert-function scans.
    pub fn degree_hint(&self) -> u32 {
        match self {
            CurveModel::Plane(p) => p.degree(),
            CurveModel::Param(p) => p.form_degree(),
            CurveModel::Ring(_) => 1,
        }
    }

    /// Monomials whose classes form the basis of `R_m`. For plane models
    /// these live in the working coordinates of the model.
    pub fn basis_monomials(&self, m: u32) -> Arc<Vec<Monomial>> {
        match self {
            CurveModel::Plane(p) => Arc::new(p.staircase(m).0.clone()),
            CurveModel::Param(p) => Arc::new(p.piece(m).monomials.clone()),
            CurveModel::Ring(r) => Arc::new(monomials_of_degree(r.n + 1, m)),
        }
    }

    /// Basis of `R_m` as coordinate vectors over the degree-`m` monomials of
    /// the ambient ring (descending grlex).
    pub fn graded_basis(&self, m: u32) -> SubspaceBasis {
        let all = monomials_of_degree(self.ambient_vars(), m);
        let vectors = self
            .basis_monomials(m)
            .iter()
            .map(|b| {
                all.iter()
                    .map(|a| if a == b { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        SubspaceBasis {
            ambient_dim: all.len(),
            vectors,
        }
    }

    pub fn hilbert_function(&self, m: u32) -> usize {
        match self {
            CurveModel::Plane(p) => p.staircase(m).0.len(),
            CurveModel::Param(p) => p.piece(m).monomials.len(),
            CurveModel::Ring(r) => count_monomials(r.n + 1, m),
        }
    }

    /// Coordinates in the basis of `R_{|β|}` of the class of `x^β`, with `β`
    /// in the model's working coordinates.
    pub fn monomial_coords(&self, mono: &Monomial) -> Arc<Vec<Rat>> {
        match self {
            CurveModel::Plane(p) => p.reduce_monomial(mono),
            CurveModel::Param(p) => p.monomial_coords(mono),
            CurveModel::Ring(r) => {
                let all = monomials_of_degree(r.n + 1, mono.degree());
                Arc::new(
                    all.iter()
                        .map(|a| if a == mono { Rat::one() } else { Rat::zero() })
                        .collect(),
                )
            }
        }
    }

    fn check_vars(&self, nvars: usize) -> Result<(), CurveError> {
        if nvars != self.ambient_vars() {
            return Err(CurveError::WrongVarCount {
                expected: self.ambient_vars(),
                got: nvars,
            });
        }
        Ok(())
    }

    fn check_len(&self, m: u32, len: usize) -> Result<(), CurveError> {
        let expected = self.hilbert_function(m);
        if len != expected {
            return Err(CurveError::CoordLength {
                degree: m,
                expected,
                got: len,
            });
        }
        Ok(())
    }

    /// Image in `R_m` of a homogeneous ambient form of degree `m`.
    pub fn restrict(&self, f: &Polynomial<Rat>) -> Result<Vec<Rat>, CurveError> {
        let m = homogeneous_degree_or_zero(f)?;
        self.restrict_in_degree(f, m)
    }

    /// Like [`restrict`](Self::restrict) with the degree given, so that the
    /// zero form lands in `R_m`.
    pub fn restrict_in_degree(&self, f: &Polynomial<Rat>, m: u32) -> Result<Vec<Rat>, CurveError> {
        self.check_vars(f.nvars())?;
        if !f.is_zero() && homogeneous_degree_or_zero(f)? != m {
            return Err(CurveError::NotHomogeneous);
        }
        let f = match self {
            CurveModel::Plane(p) => p.to_working(f),
            _ => f.clone(),
        };
        let mut out = vec![Rat::zero(); self.hilbert_function(m)];
        for (mono, c) in f.terms() {
            for (o, x) in out.iter_mut().zip(self.monomial_coords(mono).iter()) {
                if !x.is_zero() {
                    *o += c * x;
                }
            }
        }
        Ok(out)
    }

    /// Float version of [`restrict`](Self::restrict).
    pub fn restrict_f64(&self, f: &Polynomial<f64>) -> Result<Vec<f64>, CurveError> {
        self.check_vars(f.nvars())?;
        let m = if f.is_zero() {
            0
        } else {
            f.homogeneous_degree().ok_or(CurveError::NotHomogeneous)?
        };
        let f = match self {
            CurveModel::Plane(p) => p.to_working(f),
            _ => f.clone(),
        };
        let mut out = vec![0.0; self.hilbert_function(m)];
        for (mono, c) in f.terms() {
            for (o, x) in out.iter_mut().zip(self.monomial_coords(mono).iter()) {
                *o += c * x.to_f64();
            }
        }
        Ok(out)
    }

    /// An ambient form of degree `m` whose restriction is `coords`.
    pub fn lift(&self, m: u32, coords: &[Rat]) -> Result<Polynomial<Rat>, CurveError> {
        self.check_len(m, coords.len())?;
        let basis = self.basis_monomials(m);
        let p = Polynomial::from_terms(
            self.ambient_vars(),
            basis.iter().cloned().zip(coords.iter().cloned()),
        );
        Ok(match self {
            CurveModel::Plane(pl) => pl.from_working(&p),
            _ => p,
        })
    }

    /// Coordinates of `p·q` in `R_{a+b}` for `p ∈ R_a`, `q ∈ R_b`.
    pub fn multiply_to_coords(
        &self,
        a: u32,
        p: &[Rat],
        b: u32,
        q: &[Rat],
    ) -> Result<Vec<Rat>, CurveError> {
        self.check_len(a, p.len())?;
        self.check_len(b, q.len())?;
        let (ba, bb) = (self.basis_monomials(a), self.basis_monomials(b));
        let mut out = vec![Rat::zero(); self.hilbert_function(a + b)];
        for (x, ma) in p.iter().zip(ba.iter()) {
            if x.is_zero() {
                continue;
            }
            for (y, mb) in q.iter().zip(bb.iter()) {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (o, c) in out.iter_mut().zip(self.monomial_coords(&ma.mul(mb)).iter()) {
                    if !c.is_zero() {
                        *o += &xy * c;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Float version of [`multiply_to_coords`](Self::multiply_to_coords).
    pub fn multiply_f64(
        &self,
        a: u32,
        p: &[f64],
        b: u32,
        q: &[f64],
    ) -> Result<Vec<f64>, CurveError> {
        self.check_len(a, p.len())?;
        self.check_len(b, q.len())?;
        let (ba, bb) = (self.basis_monomials(a), self.basis_monomials(b));
        let mut out = vec![0.0; self.hilbert_function(a + b)];
        for (x, ma) in p.iter().zip(ba.iter()) {
            if *x == 0.0 {
                continue;
            }
            for (y, mb) in q.iter().zip(bb.iter()) {
                if *y == 0.0 {
                    continue;
                }
                for (o, c) in out.iter_mut().zip(self.monomial_coords(&ma.mul(mb)).iter()) {
                    *o += x * y * c.to_f64();
                }
            }
        }
        Ok(out)
    }

    /// Values of the basis of `R_m` at an ambient point (input coordinates).
    pub fn eval_basis(&self, m: u32, point: &[f64]) -> Vec<f64> {
        let pt = match self {
            CurveModel::Plane(p) => p.point_to_working(point),
            _ => point.to_vec(),
        };
        self.basis_monomials(m).iter().map(|b| b.eval(&pt)).collect()
    }

    /// Value of an element of `R_m` at a point on `X`.
    pub fn eval_element(&self, m: u32, coords: &[f64], point: &[f64]) -> f64 {
        self.eval_basis(m, point)
            .iter()
            .zip(coords)
            .map(|(b, c)| b * c)
            .sum()
    }

    /// Deterministic real points on `X`, unit norm, input coordinates. For
    /// the polynomial ring these are spread over the unit sphere.
    pub fn real_samples(&self, count: usize) -> Vec<Vec<f64>> {
        match self {
            CurveModel::Plane(p) => p.real_samples(count),
            CurveModel::Param(p) => p.real_samples(count),
            CurveModel::Ring(r) => sphere_samples(r.n + 1, count),
        }
    }
}

fn homogeneous_degree_or_zero<C: Coeff>(f: &Polynomial<C>) -> Result<u32, CurveError> {
    if f.is_zero() {
        return Ok(0);
    }
    f.homogeneous_degree().ok_or(CurveError::NotHomogeneous)
}

/// Quasi-uniform points on `S^{k-1}`: a golden-ratio spiral for `k = 3`,
/// a low-discrepancy sequence pushed through the Gaussian CDF otherwise.
fn sphere_samples(k: usize, count: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    if k == 3 {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        for i in 0..count {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let rho = (1.0 - z * z).sqrt();
            let th = golden * i as f64;
            out.push(vec![rho * th.cos(), rho * th.sin(), z]);
        }
        return out;
    }
    let primes = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    for i in 1..=count as u64 {
        let v: Vec<f64> = (0..k)
            .map(|c| {
                let u = halton(i, primes[c % primes.len()]);
                // Box–Muller-free map: tan spreads (0,1) over R
                (std::f64::consts::PI * (u - 0.5)).tan()
            })
            .collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 && n.is_finite() {
            out.push(v.iter().map(|x| x / n).collect());
        }
    }
    out
}

fn halton(mut i: u64, b: u64) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}
