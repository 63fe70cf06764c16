use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent vector of a monomial in `x_0, …, x_n`.
///
/// Ordering is graded lexicographic with `x_0 ≻ x_1 ≻ ⋯`: higher total degree
/// first, then larger leading exponent.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    /// The monomial `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    /// Evaluate at a point given as a slice of values.
    pub fn eval<T>(&self, point: &[T]) -> T
    where
        T: Clone + num_traits::One + std::ops::Mul<Output = T>,
    {
        let mut acc = T::one();
        for (x, &e) in point.iter().zip(&self.0) {
            for _ in 0..e {
                acc = acc * x.clone();
            }
        }
        acc
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{i}")?;
            } else {
                write!(f, "x{i}^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// All monomials of total degree `degree` in `nvars` variables, in descending
/// graded-lex order (so `x_0^degree` comes first).
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
    fn rec(nvars: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == nvars {
            prefix.push(left);
            out.push(Monomial(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            rec(nvars, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Monomial(Vec::new()));
        }
        return out;
    }
    rec(nvars, degree, &mut Vec::with_capacity(nvars), &mut out);
    out
}

/// Number of monomials of degree `degree` in `nvars` variables.
pub fn count_monomials(nvars: usize, degree: u32) -> usize {
    if nvars == 0 {
        return usize::from(degree == 0);
    }
    binomial(degree as i64 + nvars as i64 - 1, nvars as i64 - 1) as usize
}

/// Binomial coefficient with the convention `C(a, b) = 0` for `a < b` or `b < 0`.
pub fn binomial(a: i64, b: i64) -> i64 {
    if b < 0 || a < b {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: i64 = 1;
    for i in 0..b {
        acc = acc * (a - i) / (i + 1);
    }
    acc
}
