//! Moment matrices on graded pieces, kernel utilities and a small SDP solver.

mod solver;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::algebra::{sym_eig, AlgebraError, Coeff, SymMatrix};
use crate::curves::{CurveError, CurveModel};

pub use solver::{solve_feasibility, Constraint, Diagnostic, SdpOptions, SdpOutcome, SdpProblem};

#[derive(Debug, thiserror::Error)]
pub enum SdpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite data")]
    NonFinite,
    #[error("functional has degree {got}, expected {expected}")]
    Degree { expected: u32, got: u32 },
    #[error("corank is {0}, expected 1")]
    Corank(usize),
    #[error("pointedness undecided: {0}")]
    Indeterminate(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A linear functional on `R_d`, `ℓ(g) = Σ coords[i]·g[i]` in the graded
/// basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentFunctional {
    pub degree: u32,
    pub coords: Vec<f64>,
}

impl MomentFunctional {
    pub fn new(degree: u32, coords: Vec<f64>) -> Result<Self, SdpError> {
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(SdpError::NonFinite);
        }
        Ok(MomentFunctional { degree, coords })
    }

    /// Evaluation at a point of the model: `g ↦ g(p)`.
    pub fn evaluation(model: &CurveModel, degree: u32, point: &[f64]) -> Self {
        MomentFunctional {
            degree,
            coords: model.eval_basis(degree, point),
        }
    }

    pub fn apply(&self, g: &[f64]) -> f64 {
        self.coords.iter().zip(g).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        MomentFunctional {
            degree: self.degree,
            coords: self.coords.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SdpError> {
        if self.degree != other.degree || self.coords.len() != other.coords.len() {
            return Err(SdpError::Degree {
                expected: self.degree,
                got: other.degree,
            });
        }
        Ok(MomentFunctional {
            degree: self.degree,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }

    /// Scaled to unit Euclidean norm; unchanged if zero.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.scale(1.0 / n)
        } else {
            self.clone()
        }
    }
}

fn check_functional(model: &CurveModel, ell: &MomentFunctional, degree: u32) -> Result<(), SdpError> {
    if ell.degree != degree {
        return Err(SdpError::Degree {
            expected: degree,
            got: ell.degree,
        });
    }
    let n = model.hilbert_function(degree);
    if ell.coords.len() != n {
        return Err(SdpError::Dimension(format!(
            "functional has {} coordinates, R_{degree} has dimension {n}",
            ell.coords.len()
        )));
    }
    Ok(())
}

/// `(a, b) ↦ ℓ(b_a b_b)` on the basis of `R_m`.
pub fn catalecticant(model: &CurveModel, ell: &MomentFunctional, m: u32) -> Result<SymMatrix, SdpError> {
    check_functional(model, ell, 2 * m)?;
    let basis = model.basis_monomials(m);
    Ok(SymMatrix::from_upper(basis.len(), |a, b| {
        let c = model.monomial_coords(&basis[a].mul(&basis[b]));
        c.iter().zip(&ell.coords).map(|(x, l)| x.to_f64() * l).sum()
    }))
}

/// `(a, b) ↦ ℓ(f b_a b_b)` on the basis of `R_k`, for `f ∈ R_{2j}`.
pub fn localized_catalecticant(
    model: &CurveModel,
    ell: &MomentFunctional,
    f: &[f64],
    j: u32,
    k: u32,
) -> Result<SymMatrix, SdpError> {
    check_functional(model, ell, 2 * j + 2 * k)?;
    let fb = model.basis_monomials(2 * j);
    if f.len() != fb.len() {
        return Err(SdpError::Dimension(format!(
            "f has {} coordinates, R_{} has dimension {}",
            f.len(),
            2 * j,
            fb.len()
        )));
    }
    let basis = model.basis_monomials(k);
    // ℓ(m_c · ·) as a functional on R_{2k}, one per term of f
    let shifted: Vec<f64> = {
        let b2 = model.basis_monomials(2 * k);
        let mut out = vec![0.0; b2.len()];
        for (c, fc) in fb.iter().zip(f) {
            if *fc == 0.0 {
                continue;
            }
            for (o, mono) in out.iter_mut().zip(b2.iter()) {
                let v = model.monomial_coords(&c.mul(mono));
                *o += fc * v.iter().zip(&ell.coords).map(|(x, l)| x.to_f64() * l).sum::<f64>();
            }
        }
        out
    };
    let reduced = MomentFunctional {
        degree: 2 * k,
        coords: shifted,
    };
    Ok(SymMatrix::from_upper(basis.len(), |a, b| {
        let c = model.monomial_coords(&basis[a].mul(&basis[b]));
        c.iter().zip(&reduced.coords).map(|(x, l)| x.to_f64() * l).sum()
    }))
}

/// Number of eigenvalues with `|λ| ≤ tol·(1 + max|λ|)`.
pub fn corank(m: &SymMatrix, tol: f64) -> Result<usize, SdpError> {
    let e = sym_eig(m)?;
    let big = e.eigenvalues.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    Ok(e.eigenvalues
        .iter()
        .filter(|x| x.abs() <= tol * (1.0 + big))
        .count())
}

/// Unit kernel vector of a corank-one matrix, first nonzero entry positive.
pub fn facet_normal(m: &SymMatrix, tol: f64) -> Result<Vec<f64>, SdpError> {
    let c = corank(m, tol)?;
    if c != 1 {
        return Err(SdpError::Corank(c));
    }
    let e = sym_eig(m)?;
    let big = e.eigenvalues.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let idx = e
        .eigenvalues
        .iter()
        .position(|x| x.abs() <= tol * (1.0 + big))
        .expect("corank one");
    let v: Vec<f64> = e.eigenvectors.column(idx).iter().copied().collect();
    let first = v
        .iter()
        .copied()
        .find(|x| x.abs() > 1e-12)
        .unwrap_or(1.0);
    let n = DVector::from_vec(v.clone()).norm();
    Ok(v.iter().map(|x| x * first.signum() / n).collect())
}

/// Outcome of [`check_pointed`].
#[derive(Debug, Clone, PartialEq)]
pub enum Pointedness {
    /// A functional whose catalecticant is positive definite.
    Pointed {
        functional: MomentFunctional,
        min_eigenvalue: f64,
    },
    /// A nonzero PSD Gram matrix whose sum of squares vanishes in `R_{2j}`.
    NotPointed { gram: SymMatrix, residual: f64 },
}

impl Pointedness {
    pub fn is_pointed(&self) -> bool {
        matches!(self, Pointedness::Pointed { .. })
    }
}

/// Coordinates of `Σ_{a≤b} G_ab (2 − δ_ab) b_a b_b` as constraints on `G`.
pub(crate) fn gram_constraints(
    model: &CurveModel,
    m: u32,
    block: usize,
    sign: f64,
    rows: &mut [Constraint],
) {
    let basis = model.basis_monomials(m);
    for a in 0..basis.len() {
        for b in a..basis.len() {
            let c = model.monomial_coords(&basis[a].mul(&basis[b]));
            let w = if a == b { sign } else { 2.0 * sign };
            for (row, x) in rows.iter_mut().zip(c.iter()) {
                let x = x.to_f64();
                if x != 0.0 {
                    row.push(block, a, b, w * x);
                }
            }
        }
    }
}

/// Whether `Σ_{X,2j}` is pointed, with a witness either way.
pub fn check_pointed(model: &CurveModel, j: u32, opts: &SdpOptions) -> Result<Pointedness, SdpError> {
    if j == 0 {
        return Err(SdpError::Dimension("j must be at least 1".into()));
    }
    let q = model.hilbert_function(j);
    let n = model.hilbert_function(2 * j);
    let mut rows = vec![Constraint::new(0.0); n];
    gram_constraints(model, j, 0, 1.0, &mut rows);
    let problem = SdpProblem {
        blocks: vec![q],
        constraints: rows,
        normalization: Constraint::trace(0, q, 1.0),
    };
    match solve_feasibility(&problem, opts)? {
        SdpOutcome::Feasible { blocks, .. } => {
            let gram = blocks.into_iter().next().expect("one block");
            let residual = problem
                .constraints
                .iter()
                .map(|c| c.eval(std::slice::from_ref(&gram)).abs())
                .fold(0.0, f64::max);
            Ok(Pointedness::NotPointed { gram, residual })
        }
        SdpOutcome::Separator { dual, .. } => {
            // Σ dual_r F_r is the catalecticant of dual, negative definite
            let functional = MomentFunctional::new(2 * j, dual.iter().map(|x| -x).collect())?.normalized();
            let cat = catalecticant(model, &functional, j)?;
            let e = sym_eig(&cat)?;
            let need = opts.delta * cat.trace() / q as f64;
            if e.min() >= need && need > 0.0 {
                Ok(Pointedness::Pointed {
                    functional,
                    min_eigenvalue: e.min(),
                })
            } else {
                Err(SdpError::Indeterminate(format!(
                    "separator catalecticant min eigenvalue {:.3e} below {need:.3e}",
                    e.min()
                )))
            }
        }
        SdpOutcome::Indeterminate(d) => Err(SdpError::Indeterminate(d.message)),
    }
}

#[cfg(test)]
mod tests;
