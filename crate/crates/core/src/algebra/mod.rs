//! Polynomial arithmetic and the dense linear-algebra kernels used by every
//! other module. Exact work happens over `BigRational`; floats only enter the
//! eigenvalue and SDP paths.

pub mod eigen;
pub mod exact;
pub mod monomial;
pub mod polynomial;
pub mod roots;
pub mod univariate;

pub use eigen::{max_eigenvalue, min_eigenvalue, sym_eig, SymEigen, SymMatrix};
pub use exact::{determinant, rank, rank_and_nullspace, Echelon, RankNullspace, SubspaceBasis};
pub use monomial::{binomial, count_monomials, monomials_of_degree, Monomial};
pub use polynomial::{poly_mul, AnyPoly, Coeff, Polynomial};

use thiserror::Error;

pub type Rat = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("variable count mismatch: {0} vs {1}")]
    VarCountMismatch(usize, usize),
    #[error("coefficient mode mismatch (exact vs float)")]
    ModeMismatch,
    #[error("non-finite value")]
    NonFinite,
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric")]
    NotSymmetric,
}

/// Integer as an exact rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// `n / d` as an exact rational.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}
