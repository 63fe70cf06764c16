//! Dense univariate polynomials over Q, coefficients in ascending order.

use num_traits::{One, Zero};

use super::Rat;

pub fn trim(mut v: Vec<Rat>) -> Vec<Rat> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

/// Degree, or `None` for the zero polynomial.
pub fn degree(v: &[Rat]) -> Option<usize> {
    v.iter().rposition(|c| !c.is_zero())
}

pub fn make_monic(v: Vec<Rat>) -> Vec<Rat> {
    let v = trim(v);
    match v.last() {
        None => v,
        Some(l) => {
            let inv = l.recip();
            v.into_iter().map(|c| c * &inv).collect()
        }
    }
}

/// Quotient and remainder of `a` by a nonzero `b`.
pub fn div_rem(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let b = trim(b.to_vec());
    let db = b.len().checked_sub(1).expect("division by the zero polynomial");
    let mut r = trim(a.to_vec());
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![Rat::zero(); r.len() - db];
    let lb = b[db].recip();
    while r.len() > db {
        let k = r.len() - 1;
        let f = &r[k] * &lb;
        for (i, bi) in b.iter().enumerate() {
            if !bi.is_zero() {
                let v = &f * bi;
                r[k - db + i] -= v;
            }
        }
        q[k - db] = f;
        r.pop();
        r = trim(r);
    }
    (q, r)
}

/// Monic greatest common divisor.
pub fn gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let (mut a, mut b) = (make_monic(a.to_vec()), make_monic(b.to_vec()));
    while !b.is_empty() {
        let (_, r) = div_rem(&a, &b);
        a = b;
        b = make_monic(r);
    }
    a
}

pub fn derivative(v: &[Rat]) -> Vec<Rat> {
    v.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * Rat::from_integer(i.into()))
        .collect()
}

/// Product of the distinct irreducible factors, monic.
pub fn squarefree_part(v: &[Rat]) -> Vec<Rat> {
    let v = trim(v.to_vec());
    if v.len() <= 1 {
        return make_monic(v);
    }
    let g = gcd(&v, &derivative(&v));
    make_monic(div_rem(&v, &g).0)
}

pub fn eval(v: &[Rat], x: &Rat) -> Rat {
    v.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
}

/// The polynomial of degree `< xs.len()` through the given values (Newton form).
pub fn interpolate(xs: &[Rat], ys: &[Rat]) -> Vec<Rat> {
    let n = xs.len();
    let mut coef = ys.to_vec();
    for k in 1..n {
        for i in (k..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - k]);
        }
    }
    // expand Newton basis into monomials
    let mut out = vec![Rat::zero(); n];
    for k in (0..n).rev() {
        // out = out * (x - xs[k]) + coef[k]
        let mut next = vec![Rat::zero(); n];
        for i in 0..n {
            if out[i].is_zero() {
                continue;
            }
            if i + 1 < n {
                next[i + 1] += &out[i];
            }
            next[i] -= &out[i] * &xs[k];
        }
        next[0] += &coef[k];
        out = next;
    }
    trim(out)
}

pub fn one() -> Vec<Rat> {
    vec![Rat::one()]
}
