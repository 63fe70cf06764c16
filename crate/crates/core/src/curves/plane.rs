use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};

use crate::algebra::{monomials_of_degree, roots, Monomial, Polynomial, Rat};

use super::CurveError;

/// Basis monomials of one degree with their positions.
type StaircaseBasis = (Vec<Monomial>, HashMap<Monomial, usize>);

/// Plane curve `V(h) ⊂ P²`. The coordinate ring is presented by the
/// staircase of monomials whose exponent in the leading variable is below
/// `deg h`; reduction divides by `h` in that variable.
#[derive(Debug)]
pub struct PlaneCurveModel {
    h_input: Polynomial<Rat>,
    /// `h` after the optional shift `x0 ← x0 + λ x1`, scaled monic in `lead`.
    h: Polynomial<Rat>,
    shift: Option<Rat>,
    lead: usize,
    degree: u32,
    reductions: RwLock<HashMap<Monomial, Arc<Vec<Rat>>>>,
    bases: RwLock<HashMap<u32, Arc<StaircaseBasis>>>,
}

impl PlaneCurveModel {
    pub fn new(h: Polynomial<Rat>) -> Result<Self, CurveError> {
        if h.nvars() != 3 {
            return Err(CurveError::WrongVarCount {
                expected: 3,
                got: h.nvars(),
            });
        }
        let degree = h.homogeneous_degree().ok_or(CurveError::NotHomogeneous)?;
        if degree < 2 {
            return Err(CurveError::DegreeTooSmall(degree));
        }
        let mut shift = None;
        let mut working = h.clone();
        let mut lambda = 0i64;
        let lead = loop {
            if let Some(i) = (0..3).find(|&i| !working.coeff(&pure_power(i, degree)).is_zero()) {
                break i;
            }
            lambda += 1;
            if lambda > 64 {
                return Err(CurveError::NoMonicDirection);
            }
            let l = Rat::from_integer(lambda.into());
            let subs = vec![
                Polynomial::var(3, 0).add(&Polynomial::var(3, 1).scale(&l))?,
                Polynomial::var(3, 1),
                Polynomial::var(3, 2),
            ];
            working = h.compose(&subs)?;
            shift = Some(l);
        };
        let lc = working.coeff(&pure_power(lead, degree));
        let working = working.scale(&lc.recip());
        Ok(PlaneCurveModel {
            h_input: h,
            h: working,
            shift,
            lead,
            degree,
            reductions: RwLock::new(HashMap::new()),
            bases: RwLock::new(HashMap::new()),
        })
    }

    pub fn defining_form(&self) -> &Polynomial<Rat> {
        &self.h_input
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Variable in which the working form is monic.
    pub fn leading_variable(&self) -> usize {
        self.lead
    }

    /// The `λ` of the coordinate change `x0 ← x0 + λ x1`, if one was needed.
    pub fn shift(&self) -> Option<&Rat> {
        self.shift.as_ref()
    }

    /// Map a form in the input coordinates to working coordinates.
    pub(crate) fn to_working<C: crate::algebra::Coeff>(
        &self,
        f: &Polynomial<C>,
    ) -> Polynomial<C> {
        match &self.shift {
            None => f.clone(),
            Some(l) => {
                let l = C::from_rat(l);
                let subs = vec![
                    Polynomial::var(3, 0)
                        .add(&Polynomial::var(3, 1).scale(&l))
                        .expect("3 vars"),
                    Polynomial::var(3, 1),
                    Polynomial::var(3, 2),
                ];
                f.compose(&subs).expect("3 vars")
            }
        }
    }

    /// Inverse of [`to_working`](Self::to_working).
    pub(crate) fn from_working<C: crate::algebra::Coeff>(
        &self,
        f: &Polynomial<C>,
    ) -> Polynomial<C> {
        match &self.shift {
            None => f.clone(),
            Some(l) => {
                let l = C::from_rat(&-l.clone());
                let subs = vec![
                    Polynomial::var(3, 0)
                        .add(&Polynomial::var(3, 1).scale(&l))
                        .expect("3 vars"),
                    Polynomial::var(3, 1),
                    Polynomial::var(3, 2),
                ];
                f.compose(&subs).expect("3 vars")
            }
        }
    }

    /// Map a point in the input coordinates to working coordinates.
    pub(crate) fn point_to_working(&self, p: &[f64]) -> Vec<f64> {
        match &self.shift {
            None => p.to_vec(),
            Some(l) => {
                let l = crate::algebra::Coeff::to_f64(l);
                vec![p[0] - l * p[1], p[1], p[2]]
            }
        }
    }

    pub(crate) fn staircase(&self, m: u32) -> Arc<(Vec<Monomial>, HashMap<Monomial, usize>)> {
        if let Some(b) = self.bases.read().unwrap().get(&m) {
            return b.clone();
        }
        let monos: Vec<Monomial> = monomials_of_degree(3, m)
            .into_iter()
            .filter(|mo| mo.exponents()[self.lead] < self.degree)
            .collect();
        let index = monos.iter().cloned().enumerate().map(|(i, mo)| (mo, i)).collect();
        let b = Arc::new((monos, index));
        self.bases.write().unwrap().insert(m, b.clone());
        b
    }

    /// Coordinates of the class of a monomial (working coordinates) in the
    /// staircase basis.
    pub(crate) fn reduce_monomial(&self, mono: &Monomial) -> Arc<Vec<Rat>> {
        if let Some(v) = self.reductions.read().unwrap().get(mono) {
            return v.clone();
        }
        let m = mono.degree();
        let basis = self.staircase(m);
        let mut out = vec![Rat::zero(); basis.0.len()];
        if mono.exponents()[self.lead] < self.degree {
            out[basis.1[mono]] = Rat::one();
        } else {
            // x^β = x^(β - d e_lead) · x_lead^d ≡ x^(β - d e_lead) · (x_lead^d - h)
            let quotient = mono
                .checked_div(&pure_power(self.lead, self.degree))
                .expect("leading exponent >= degree");
            for (t, c) in self.h.terms() {
                if t.exponents()[self.lead] == self.degree {
                    continue;
                }
                let sub = self.reduce_monomial(&quotient.mul(t));
                for (o, s) in out.iter_mut().zip(sub.iter()) {
                    if !s.is_zero() {
                        *o -= c * s;
                    }
                }
            }
        }
        let out = Arc::new(out);
        self.reductions
            .write()
            .unwrap()
            .insert(mono.clone(), out.clone());
        out
    }

    /// Real points of the curve, sampled on the pencil of lines through
    /// `[0:0:1]` (input coordinates, unit Euclidean norm).
    pub fn real_samples(&self, lines: usize) -> Vec<Vec<f64>> {
        let h = self.h_input.to_f64();
        let d = self.degree as usize;
        let mut out = Vec::new();
        for k in 0..lines {
            let a = std::f64::consts::PI * (k as f64 + 0.5) / lines as f64;
            let (c, s) = (a.cos(), a.sin());
            // binary form in (r, w): h(r c, r s, w); coefficient of r^i w^(d-i)
            let mut coeffs = vec![0.0; d + 1];
            for (mo, co) in h.terms() {
                let e = mo.exponents();
                let i = (e[0] + e[1]) as usize;
                coeffs[i] += co * c.powi(e[0] as i32) * s.powi(e[1] as i32);
            }
            // w = 1 chart, roots in r
            for r in roots::real_roots(&coeffs, 1e-7) {
                push_unit(&mut out, [r * c, r * s, 1.0]);
            }
            // the point at w = 0 lies on the curve iff the leading coefficient vanishes
            let scale = coeffs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            if coeffs[d].abs() <= 1e-12 * scale {
                push_unit(&mut out, [c, s, 0.0]);
            }
        }
        if h.eval_f64(&[0.0, 0.0, 1.0]).abs() <= 1e-12 * h.max_abs_coeff() {
            out.push(vec![0.0, 0.0, 1.0]);
        }
        out
    }
}

fn push_unit(out: &mut Vec<Vec<f64>>, p: [f64; 3]) {
    let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 && n.is_finite() {
        out.push(p.iter().map(|x| x / n).collect());
    }
}

fn pure_power(i: usize, d: u32) -> Monomial {
    let mut e = vec![0; 3];
    e[i] = d;
    Monomial::new(e)
}
