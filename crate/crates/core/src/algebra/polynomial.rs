use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};

use super::monomial::Monomial;
use super::{AlgebraError, Rat};

/// Coefficient field of a [`Polynomial`]: exact rationals or `f64`.
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn to_f64(&self) -> f64;
    fn from_rat(r: &Rat) -> Self;
}

impl Coeff for Rat {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
}

impl Coeff for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_rat(r: &Rat) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
}

/// Sparse polynomial in a fixed number of variables. Zero coefficients are
/// never stored.
#[derive(Clone, PartialEq, Debug)]
pub struct Polynomial<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::from_terms(nvars, [(Monomial::one(nvars), c)])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::from_terms(nvars, [(Monomial::var(nvars, i), C::one())])
    }

    pub fn monomial(m: Monomial, c: C) -> Self {
        let nvars = m.nvars();
        Self::from_terms(nvars, [(m, c)])
    }

    /// Build from `(monomial, coefficient)` pairs, summing repeats.
    ///
    /// Panics if a monomial has the wrong variable count.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial variable count mismatch");
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// The common degree of all terms, if the polynomial is homogeneous and
    /// nonzero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Monomial::degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.nvars != other.nvars {
            return Err(AlgebraError::VarCountMismatch(self.nvars, other.nvars));
        }
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.nvars != other.nvars {
            return Err(AlgebraError::VarCountMismatch(self.nvars, other.nvars));
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.add(&other.scale(&-C::one()))
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().map(|(m, v)| (m.clone(), v.clone() * c.clone())),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.nvars, C::one());
        for _ in 0..e {
            acc = acc.mul(self).expect("same variable count");
        }
        acc
    }

    pub fn eval(&self, point: &[C]) -> C {
        self.terms
            .iter()
            .fold(C::zero(), |acc, (m, c)| acc + c.clone() * m.eval(point))
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c.to_f64() * m.eval(point))
            .sum()
    }

    pub fn to_f64(&self) -> Polynomial<f64> {
        Polynomial::from_terms(
            self.nvars,
            self.terms.iter().map(|(m, c)| (m.clone(), c.to_f64())),
        )
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Partial derivative with respect to `x_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponents()[i];
            if e == 0 {
                continue;
            }
            let mut ex = m.exponents().to_vec();
            ex[i] -= 1;
            let mut k = C::zero();
            for _ in 0..e {
                k = k + C::one();
            }
            out.add_term(Monomial::new(ex), c.clone() * k);
        }
        out
    }

    /// Substitute a polynomial (all in a common ring) for each variable.
    pub fn compose(&self, subs: &[Polynomial<C>]) -> Result<Polynomial<C>, AlgebraError> {
        if subs.len() != self.nvars {
            return Err(AlgebraError::VarCountMismatch(self.nvars, subs.len()));
        }
        let target = subs.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(target, c.clone());
            for (s, &e) in subs.iter().zip(m.exponents()) {
                for _ in 0..e {
                    term = term.mul(s)?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }
}

impl Polynomial<Rat> {
    /// Exact conversion of a float polynomial; every finite `f64` is a dyadic
    /// rational.
    pub fn from_f64(p: &Polynomial<f64>) -> Result<Self, AlgebraError> {
        let mut out = Self::zero(p.nvars);
        for (m, c) in p.terms() {
            let r = Rat::from_float(*c).ok_or(AlgebraError::NonFinite)?;
            out.add_term(m.clone(), r);
        }
        Ok(out)
    }
}

/// A polynomial in either coefficient mode, as read from JSON.
#[derive(Clone, PartialEq, Debug)]
pub enum AnyPoly {
    Exact(Polynomial<Rat>),
    Float(Polynomial<f64>),
}

impl AnyPoly {
    pub fn nvars(&self) -> usize {
        match self {
            AnyPoly::Exact(p) => p.nvars(),
            AnyPoly::Float(p) => p.nvars(),
        }
    }

    pub fn to_f64(&self) -> Polynomial<f64> {
        match self {
            AnyPoly::Exact(p) => p.to_f64(),
            AnyPoly::Float(p) => p.clone(),
        }
    }

    pub fn homogeneous_degree(&self) -> Option<u32> {
        match self {
            AnyPoly::Exact(p) => p.homogeneous_degree(),
            AnyPoly::Float(p) => p.homogeneous_degree(),
        }
    }
}

/// Product of two polynomials of the same mode and variable count.
pub fn poly_mul(p: &AnyPoly, q: &AnyPoly) -> Result<AnyPoly, AlgebraError> {
    match (p, q) {
        (AnyPoly::Exact(a), AnyPoly::Exact(b)) => Ok(AnyPoly::Exact(a.mul(b)?)),
        (AnyPoly::Float(a), AnyPoly::Float(b)) => Ok(AnyPoly::Float(a.mul(b)?)),
        _ => Err(AlgebraError::ModeMismatch),
    }
}
