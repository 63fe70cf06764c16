use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::algebra::{exact, univariate, Coeff, Echelon, Monomial, Polynomial, Rat};

use super::CurveError;

/// Image of `P¹ → Pⁿ`, `[s:t] ↦ [φ₀ : ⋯ : φₙ]`. The graded piece `R_m` is
/// identified with the span `V_m` of all degree-`m` products of the `φᵢ`
/// inside the binary forms of degree `d·m`.
#[derive(Debug)]
pub struct ParamCurveModel {
    forms: Vec<Polynomial<Rat>>,
    /// Coefficient vectors; index `k` holds the coefficient of `s^(d-k) t^k`.
    form_vecs: Vec<Vec<Rat>>,
    degree: u32,
    /// `λᵢ`, the least common denominator of `φᵢ`.
    scales: Vec<BigInt>,
    int_forms: Vec<Vec<BigInt>>,
    int_pullbacks: RwLock<HashMap<Monomial, Arc<Vec<BigInt>>>>,
    pieces: RwLock<HashMap<u32, Arc<GradedPiece>>>,
    coords: RwLock<HashMap<Monomial, Arc<Vec<Rat>>>>,
}

/// Basis of `V_m` in terms of the integer pullbacks, with `A·X = D·I`
/// for the pivot minor `A`.
#[derive(Debug)]
pub(crate) struct GradedPiece {
    pub monomials: Vec<Monomial>,
    vectors: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    adjugate: Vec<Vec<BigInt>>,
    det: BigInt,
}

impl GradedPiece {
    /// Integer `c` with `D·w = Σ c_j v_j`, or `None` if `w ∉ V_m`.
    fn solve(&self, w: &[BigInt]) -> Option<Vec<BigInt>> {
        let rhs: Vec<&BigInt> = self.pivots.iter().map(|&r| &w[r]).collect();
        let c: Vec<BigInt> = self
            .adjugate
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&rhs)
                    .filter(|(x, y)| !x.is_zero() && !y.is_zero())
                    .map(|(x, y)| x * *y)
                    .sum()
            })
            .collect();
        for (k, wk) in w.iter().enumerate() {
            let lhs = &self.det * wk;
            let rhs: BigInt = c
                .iter()
                .zip(&self.vectors)
                .filter(|(x, v)| !x.is_zero() && !v[k].is_zero())
                .map(|(x, v)| x * &v[k])
                .sum();
            if lhs != rhs {
                return None;
            }
        }
        Some(c)
    }
}

impl ParamCurveModel {
    pub fn new(forms: Vec<Polynomial<Rat>>) -> Result<Self, CurveError> {
        if forms.len() < 2 {
            return Err(CurveError::TooFewForms(forms.len()));
        }
        let mut degree = None;
        for f in &forms {
            if f.nvars() != 2 {
                return Err(CurveError::WrongVarCount {
                    expected: 2,
                    got: f.nvars(),
                });
            }
            if f.is_zero() {
                continue;
            }
            let d = f.homogeneous_degree().ok_or(CurveError::NotHomogeneous)?;
            match degree {
                None => degree = Some(d),
                Some(e) if e != d => return Err(CurveError::FormDegreeMismatch(e, d)),
                _ => {}
            }
        }
        let degree = degree.ok_or(CurveError::AllFormsZero)?;
        if degree == 0 {
            return Err(CurveError::DegreeTooSmall(0));
        }
        let form_vecs: Vec<Vec<Rat>> = forms.iter().map(|f| binary_vec(f, degree)).collect();
        if has_common_root(&form_vecs) {
            return Err(CurveError::CommonRoot);
        }
        let scales: Vec<BigInt> = form_vecs
            .iter()
            .map(|v| v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom())))
            .collect();
        let int_forms = form_vecs
            .iter()
            .zip(&scales)
            .map(|(v, l)| v.iter().map(|c| c.numer() * (l / c.denom())).collect())
            .collect();
        Ok(ParamCurveModel {
            forms,
            form_vecs,
            degree,
            scales,
            int_forms,
            int_pullbacks: RwLock::new(HashMap::new()),
            pieces: RwLock::new(HashMap::new()),
            coords: RwLock::new(HashMap::new()),
        })
    }

    pub fn forms(&self) -> &[Polynomial<Rat>] {
        &self.forms
    }

    /// Common degree of the parametrizing forms.
    pub fn form_degree(&self) -> u32 {
        self.degree
    }

    pub fn ambient_vars(&self) -> usize {
        self.forms.len()
    }

    /// Binary form `∏ φᵢ^{βᵢ}` as a coefficient vector of length `d·|β| + 1`.
    #[cfg(test)]
    pub(crate) fn pullback(&self, mono: &Monomial) -> Vec<Rat> {
        let l = self.scale_of(mono);
        self.int_pullback(mono)
            .iter()
            .map(|c| Rat::new(c.clone(), l.clone()))
            .collect()
    }

    /// `∏ ψᵢ^{βᵢ}` for the integer forms `ψᵢ = λᵢ φᵢ`.
    fn int_pullback(&self, mono: &Monomial) -> Arc<Vec<BigInt>> {
        if let Some(v) = self.int_pullbacks.read().unwrap().get(mono) {
            return v.clone();
        }
        let v = match mono.exponents().iter().position(|&e| e > 0) {
            None => vec![BigInt::one()],
            Some(i) => {
                let mut e = mono.exponents().to_vec();
                e[i] -= 1;
                let rest = self.int_pullback(&Monomial::new(e));
                convolve_int(&rest, &self.int_forms[i])
            }
        };
        let v = Arc::new(v);
        self.int_pullbacks
            .write()
            .unwrap()
            .insert(mono.clone(), v.clone());
        v
    }

    /// `λ^β`.
    fn scale_of(&self, mono: &Monomial) -> BigInt {
        mono.exponents()
            .iter()
            .zip(&self.scales)
            .fold(BigInt::one(), |acc, (&e, l)| acc * l.pow(e))
    }

    pub(crate) fn piece(&self, m: u32) -> Arc<GradedPiece> {
        if let Some(p) = self.pieces.read().unwrap().get(&m) {
            return p.clone();
        }
        // V_m = span{ x_i · b : b a basis monomial of V_(m-1) }
        let candidates: Vec<Monomial> = if m == 0 {
            vec![Monomial::one(self.ambient_vars())]
        } else {
            let prev = self.piece(m - 1);
            let n = self.ambient_vars();
            let mut c: Vec<Monomial> = prev
                .monomials
                .iter()
                .flat_map(|b| (0..n).map(move |i| b.mul(&Monomial::var(n, i))))
                .collect();
            c.sort_unstable_by(|a, b| b.cmp(a));
            c.dedup();
            c
        };
        // Pivots are chosen modulo a prime; independence over Z follows from
        // the nonzero minor, and spanning is checked exactly below.
        let piece = exact::PRIMES
            .iter()
            .find_map(|&p| self.try_piece(m, &candidates, Some(p)))
            .or_else(|| self.try_piece(m, &candidates, None))
            .expect("exact selection spans V_m");
        let piece = Arc::new(piece);
        self.pieces.write().unwrap().insert(m, piece.clone());
        piece
    }

    fn try_piece(&self, m: u32, candidates: &[Monomial], prime: Option<u64>) -> Option<GradedPiece> {
        let dim = (self.degree * m) as usize + 1;
        let mut monomials = Vec::new();
        let mut vectors = Vec::new();
        let mut rest = Vec::new();
        let pivots = match prime {
            Some(p) => {
                let mut ech = exact::ModEchelon::new(p);
                for mono in candidates {
                    let v = self.int_pullback(mono);
                    if ech.rank() < dim && ech.insert(&v) {
                        monomials.push(mono.clone());
                        vectors.push(v.as_ref().clone());
                    } else {
                        rest.push(mono.clone());
                    }
                }
                ech.pivot_positions()
            }
            None => {
                let mut ech = Echelon::new();
                for mono in candidates {
                    let v = self.int_pullback(mono);
                    let r: Vec<Rat> = v.iter().map(|x| Rat::from_integer(x.clone())).collect();
                    if ech.rank() < dim && ech.insert(r) {
                        monomials.push(mono.clone());
                        vectors.push(v.as_ref().clone());
                    } else {
                        rest.push(mono.clone());
                    }
                }
                ech.pivots()
            }
        };
        let square: Vec<Vec<BigInt>> = pivots
            .iter()
            .map(|&r| vectors.iter().map(|v| v[r].clone()).collect())
            .collect();
        let (adjugate, det) = exact::integer_inverse(&square)?;
        let piece = GradedPiece {
            monomials,
            vectors,
            pivots,
            adjugate,
            det,
        };
        for mono in &rest {
            piece.solve(&self.int_pullback(mono))?;
        }
        Some(piece)
    }

    pub(crate) fn monomial_coords(&self, mono: &Monomial) -> Arc<Vec<Rat>> {
        if let Some(v) = self.coords.read().unwrap().get(mono) {
            return v.clone();
        }
        let piece = self.piece(mono.degree());
        let numer = piece
            .solve(&self.int_pullback(mono))
            .expect("pullback of a monomial lies in V_m");
        let denom = &piece.det * self.scale_of(mono);
        let v: Vec<Rat> = numer
            .into_iter()
            .zip(&piece.monomials)
            .map(|(c, b)| Rat::new(c * self.scale_of(b), denom.clone()))
            .collect();
        let v = Arc::new(v);
        self.coords.write().unwrap().insert(mono.clone(), v.clone());
        v
    }

    /// `[φ₀(s,1) : ⋯]`, or `[φ₀(1,0) : ⋯]` for `s = None` (the point at infinity).
    pub fn point_at(&self, s: Option<Complex64>) -> Vec<Complex64> {
        self.form_vecs
            .iter()
            .map(|v| match s {
                Some(s) => eval_binary(v, s),
                None => Complex64::new(v[0].to_f64(), 0.0),
            })
            .collect()
    }

    /// Real representative of `ξ(s)` when the image point is real (as for a
    /// conjugate pair of parameters): the phase of the largest coordinate is
    /// divided out, and the result has unit norm. `None` if the image is not
    /// real to within `tol` relative.
    pub fn real_point_at(&self, s: Option<Complex64>, tol: f64) -> Option<Vec<f64>> {
        let z = self.point_at(s);
        let big = z.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm()))?;
        if big.norm() == 0.0 {
            return None;
        }
        let phase = big / big.norm();
        let w: Vec<Complex64> = z.iter().map(|x| x / phase).collect();
        let n = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if w.iter().any(|x| x.im.abs() > tol * n) {
            return None;
        }
        Some(w.iter().map(|x| x.re / n).collect())
    }

    /// Real points sampled at `s = tan θ` on a uniform grid in θ, plus the
    /// image of `[1:0]`; each scaled to unit norm.
    pub fn real_samples(&self, count: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(count + 1);
        let mut push = |p: Vec<Complex64>| {
            let v: Vec<f64> = p.iter().map(|z| z.re).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 0.0 && n.is_finite() {
                out.push(v.iter().map(|x| x / n).collect());
            }
        };
        push(self.point_at(None));
        for k in 0..count {
            let th = -std::f64::consts::FRAC_PI_2
                + std::f64::consts::PI * (k as f64 + 0.5) / count as f64;
            push(self.point_at(Some(Complex64::new(th.tan(), 0.0))));
        }
        out
    }
}

/// Coefficient vector of a binary form of degree `d`.
pub(crate) fn binary_vec(f: &Polynomial<Rat>, d: u32) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); d as usize + 1];
    for (m, c) in f.terms() {
        v[m.exponents()[1] as usize] = c.clone();
    }
    v
}

pub(crate) fn binary_poly(v: &[Rat]) -> Polynomial<Rat> {
    let d = v.len() as u32 - 1;
    Polynomial::from_terms(
        2,
        v.iter()
            .enumerate()
            .map(|(k, c)| (Monomial::new(vec![d - k as u32, k as u32]), c.clone())),
    )
}

pub(crate) fn eval_binary(v: &[Rat], s: Complex64) -> Complex64 {
    // Σ c_k s^(d-k)
    v.iter()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * s + c.to_f64())
}

fn convolve_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Whether the binary forms share a root in `P¹(C)`.
fn has_common_root(forms: &[Vec<Rat>]) -> bool {
    // [1:0] is a root iff the s^d coefficient vanishes
    if forms.iter().all(|v| v[0].is_zero()) {
        return true;
    }
    // f(s, 1) = Σ c_k s^(d-k); ascending order is the reversed vector
    let mut g: Vec<Rat> = Vec::new();
    for v in forms {
        let asc: Vec<Rat> = v.iter().rev().cloned().collect();
        g = if g.is_empty() {
            univariate::trim(asc)
        } else {
            univariate::gcd(&g, &asc)
        };
    }
    g.len() > 1
}

impl Echelon {
    /// Pivot positions in insertion order.
    pub(crate) fn pivots(&self) -> Vec<usize> {
        self.pivot_positions()
    }
}
