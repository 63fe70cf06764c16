//! Pairs of parameters with the same image.
//!
//! For `s ≠ t` the points `ξ(s)`, `ξ(t)` coincide iff every minor
//! `(pᵢ(s)pⱼ(t) − pⱼ(s)pᵢ(t)) / (s − t)` vanishes. We eliminate `t` from two
//! fixed combinations through their Sylvester matrix, read the `s` roots off
//! a companion linearization, and polish every candidate on the full system.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use nalgebra::DMatrix;

use crate::algebra::{ratio, roots, Coeff, Rat};
use crate::curves::{binary_vec, ParamCurveModel};

use super::HarnackError;

const CLUSTER_TOL: f64 = 1e-8;
const ACCEPT: f64 = 1e-6;
const SPURIOUS: f64 = 1e-3;

/// A point of `P¹(C)` in the chart `s = x0/x1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Finite(Complex64),
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// Conjugate parameters: an isolated real point.
    Solitary,
    /// Two real parameters: two real branches cross.
    Crossing,
    /// Non-real image point.
    Complex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodePair {
    pub s: Param,
    pub t: Param,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeReport {
    pub pairs: Vec<NodePair>,
    /// Largest normalized 2×2 minor over the reported pairs.
    pub residual: f64,
}

impl NodeReport {
    pub fn count(&self, kind: NodeKind) -> usize {
        self.pairs.iter().filter(|p| p.kind == kind).count()
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Param::Finite(z) => [z.re, z.im].serialize(s),
            Param::Infinity => s.serialize_str("inf"),
        }
    }
}

impl Serialize for NodeKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            NodeKind::Solitary => "solitary",
            NodeKind::Crossing => "crossing",
            NodeKind::Complex => "complex",
        })
    }
}

impl Serialize for NodePair {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("NodePair", 3)?;
        st.serialize_field("s", &self.s)?;
        st.serialize_field("t", &self.t)?;
        st.serialize_field("kind", &self.kind)?;
        st.end()
    }
}

impl Serialize for NodeReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("NodeReport", 2)?;
        st.serialize_field("pairs", &self.pairs)?;
        st.serialize_field("residual", &self.residual)?;
        st.end()
    }
}

/// Dense bivariate polynomial, `c[i][j]` the coefficient of `s^i t^j`.
#[derive(Debug, Clone, PartialEq)]
struct Biv(Vec<Vec<Rat>>);

impl Biv {
    fn zero() -> Self {
        Biv(Vec::new())
    }

    fn get_mut(&mut self, i: usize, j: usize) -> &mut Rat {
        if self.0.len() <= i {
            self.0.resize(i + 1, Vec::new());
        }
        if self.0[i].len() <= j {
            self.0[i].resize(j + 1, Rat::zero());
        }
        &mut self.0[i][j]
    }

    fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(Zero::is_zero)
    }

    fn terms(&self) -> impl Iterator<Item = (usize, usize, &Rat)> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, x)| (i, j, x)))
            .filter(|(_, _, x)| !x.is_zero())
    }

    fn to_complex(&self) -> CBiv {
        let big = self.terms().map(|(_, _, c)| c.abs()).max().unwrap_or_else(Rat::one);
        CBiv(
            self.terms()
                .map(|(i, j, c)| (i as i32, j as i32, Complex64::new((c / &big).to_f64(), 0.0)))
                .collect(),
        )
    }
}

/// Sparse complex bivariate polynomial for evaluation.
#[derive(Debug, Clone)]
struct CBiv(Vec<(i32, i32, Complex64)>);

impl CBiv {
    fn eval(&self, z1: Complex64, z2: Complex64) -> (Complex64, Complex64, Complex64) {
        let p1 = powers(z1, self.degree(0));
        let p2 = powers(z2, self.degree(1));
        let (mut v, mut d1, mut d2) = Default::default();
        for &(i, j, c) in &self.0 {
            let (i, j) = (i as usize, j as usize);
            v += c * p1[i] * p2[j];
            if i > 0 {
                d1 += c * p1[i - 1] * p2[j] * i as f64;
            }
            if j > 0 {
                d2 += c * p1[i] * p2[j - 1] * j as f64;
            }
        }
        (v, d1, d2)
    }

    /// Sum of `|c|·|z1|^i·|z2|^j`, the natural scale of a value at `(z1, z2)`.
    fn magnitude(&self, z1: Complex64, z2: Complex64) -> f64 {
        let (a, b) = (z1.norm(), z2.norm());
        let p1: Vec<f64> = (0..=self.degree(0)).scan(1.0, |acc, _| {
            let v = *acc;
            *acc *= a;
            Some(v)
        }).collect();
        let p2: Vec<f64> = (0..=self.degree(1)).scan(1.0, |acc, _| {
            let v = *acc;
            *acc *= b;
            Some(v)
        }).collect();
        self.0
            .iter()
            .map(|&(i, j, c)| c.norm() * p1[i as usize] * p2[j as usize])
            .sum()
    }

    fn degree(&self, var: usize) -> usize {
        self.0
            .iter()
            .map(|&(i, j, _)| if var == 0 { i } else { j } as usize)
            .max()
            .unwrap_or(0)
    }

    /// Coefficients in `t` after substituting `s = z`, ascending.
    fn in_t(&self, z: Complex64) -> Vec<Complex64> {
        let mut c = vec![Complex64::zero(); self.degree(1) + 1];
        for &(i, j, x) in &self.0 {
            c[j as usize] += x * z.powi(i);
        }
        c
    }

    fn add_scaled(&mut self, other: &CBiv, c: f64) {
        self.0.extend(other.0.iter().map(|&(i, j, x)| (i, j, x * c)));
    }
}

fn powers(z: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..=n {
        out.push(acc);
        acc *= z;
    }
    out
}

/// `(p(s)q(t) − q(s)p(t)) / (s − t)` with ascending coefficient vectors.
fn divided_minor(p: &[Rat], q: &[Rat]) -> Biv {
    let mut out = Biv::zero();
    for (a, pa) in p.iter().enumerate() {
        if pa.is_zero() {
            continue;
        }
        for (b, qb) in q.iter().enumerate() {
            if qb.is_zero() || a == b {
                continue;
            }
            // (s^a t^b − s^b t^a)/(s − t) = ± (st)^lo · Σ s^k t^(hi−lo−1−k)
            let c = if a > b { pa * qb } else { -(pa * qb) };
            let (lo, hi) = (a.min(b), a.max(b));
            for k in 0..hi - lo {
                *out.get_mut(lo + k, hi - 1 - k) += &c;
            }
        }
    }
    out
}

/// Möbius change of parameter keeping nodes away from `[1:0]`:
/// `φ'(x0,x1) = φ(a x0 + b x1, c x0 + d x1)`.
const MOBIUS: [(i64, i64); 4] = [(1, 1), (2, 7), (-3, 11), (1, 1)];

fn mobius() -> [Rat; 4] {
    MOBIUS.map(|(p, q)| ratio(p, q))
}

/// The fixed change above, preceded by `s ↦ c + R s` so that the finite
/// roots of the forms land in the unit disc.
fn adapted_mobius(forms: &[Vec<Rat>]) -> [Rat; 4] {
    let mut roots_all = Vec::new();
    for v in forms {
        let asc: Vec<f64> = v.iter().rev().map(|c| c.to_f64()).collect();
        roots_all.extend(roots::real_poly_roots(&asc).into_iter().filter(|z| z.norm() < 1e6));
    }
    let [a, b, c, d] = mobius();
    if roots_all.is_empty() {
        return [a, b, c, d];
    }
    let lo = roots_all.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let hi = roots_all.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let mid = 0.5 * (lo + hi);
    let radius = roots_all
        .iter()
        .map(|z| (z - mid).norm())
        .fold(1.0, f64::max);
    // dyadic with denominator 64 keeps the change exact and small
    let dy = |x: f64| ratio((x * 64.0).round() as i64, 64);
    let (mid, radius) = (dy(mid), dy(radius));
    [
        &radius * &a + &mid * &c,
        &radius * &b + &mid * &d,
        c,
        d,
    ]
}

fn transform(v: &[Rat], m: &[Rat; 4]) -> Vec<Rat> {
    let d = v.len() - 1;
    let lin0 = [m[0].clone(), m[1].clone()];
    let lin1 = [m[2].clone(), m[3].clone()];
    let pow = |l: &[Rat; 2], e: usize| {
        let mut out = vec![Rat::one()];
        for _ in 0..e {
            let mut next = vec![Rat::zero(); out.len() + 1];
            for (k, x) in out.iter().enumerate() {
                next[k] += x * &l[0];
                next[k + 1] += x * &l[1];
            }
            out = next;
        }
        out
    };
    let mut out = vec![Rat::zero(); d + 1];
    for (k, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let a = pow(&lin0, d - k);
        let b = pow(&lin1, k);
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += c * x * y;
            }
        }
    }
    out
}

/// Roots in `s` of `Res_t(f, g)`: the Sylvester matrix in `t` is a matrix
/// polynomial in `s`, linearized by a block companion matrix after the
/// substitution `s = s0 + 1/u`, whose leading block is `Syl(s0)`.
fn hidden_variable_roots(f: &CBiv, g: &CBiv) -> Result<Vec<Complex64>, HarnackError> {
    let (m, n) = (f.degree(1), g.degree(1));
    let size = m + n;
    let k_deg = f.degree(0).max(g.degree(0));
    if size == 0 {
        return Ok(Vec::new());
    }
    // blocks[k] is the coefficient of s^k
    let mut blocks = vec![DMatrix::<f64>::zeros(size, size); k_deg + 1];
    for (r, poly, deg) in (0..n)
        .map(|r| (r, f, m))
        .chain((0..m).map(|r| (n + r, g, n)))
    {
        let shift = if r < n { r } else { r - n };
        for &(i, j, c) in &poly.0 {
            blocks[i as usize][(r, shift + deg - j as usize)] += c.re;
        }
    }
    for s0 in SHIFTS {
        // B_(K−i) = Σ_(k ≥ i) C(k, i) s0^(k−i) A_k
        let b: Vec<DMatrix<f64>> = (0..=k_deg)
            .map(|deg_u| {
                let i = k_deg - deg_u;
                let mut acc = DMatrix::zeros(size, size);
                for (k, a) in blocks.iter().enumerate().skip(i) {
                    acc += a * (binom(k, i) * s0.powi((k - i) as i32));
                }
                acc
            })
            .collect();
        let lead = &b[k_deg];
        let svd = lead.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > 1e-10 * smax) {
            continue;
        }
        let Some(inv) = lead.clone().try_inverse() else {
            continue;
        };
        let dim = size * k_deg;
        if dim == 0 {
            return Ok(Vec::new());
        }
        let mut comp = DMatrix::<f64>::zeros(dim, dim);
        for blk in 0..k_deg.saturating_sub(1) {
            for d in 0..size {
                comp[(blk * size + d, (blk + 1) * size + d)] = 1.0;
            }
        }
        let last = (k_deg - 1) * size;
        for (k, bk) in b.iter().take(k_deg).enumerate() {
            let blockv = -(&inv * bk);
            comp.view_mut((last, k * size), (size, size)).copy_from(&blockv);
        }
        let Some(eig) = crate::algebra::roots::eigenvalues(&comp) else {
            continue;
        };
        let scale = eig.iter().map(|u| u.norm()).fold(0.0, f64::max).max(1.0);
        return Ok(eig
            .iter()
            .filter(|u| u.norm() > 1e-10 * scale)
            .map(|u| Complex64::new(s0, 0.0) + u.inv())
            .collect());
    }
    Err(HarnackError::Elimination(
        "Sylvester matrix singular at every shift".into(),
    ))
}

const SHIFTS: [f64; 4] = [0.371_9, -0.613_7, 1.283_1, -2.047_3];

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact rationals to floats after scaling by the largest magnitude.
fn scaled_f64(v: &[Rat]) -> Vec<f64> {
    let big = v.iter().map(|c| c.abs()).max().unwrap_or_else(Rat::zero);
    if big.is_zero() {
        return vec![0.0; v.len()];
    }
    v.iter().map(|c| (c / &big).to_f64()).collect()
}

struct System {
    minors: Vec<CBiv>,
}

impl System {
    fn residual(&self, z1: Complex64, z2: Complex64) -> f64 {
        self.minors
            .iter()
            .map(|m| m.eval(z1, z2).0.norm() / m.magnitude(z1, z2).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }

    /// Gauss–Newton on all minors.
    fn polish(&self, mut z1: Complex64, mut z2: Complex64) -> (Complex64, Complex64) {
        for _ in 0..60 {
            // normal equations, 2×2 Hermitian
            let (mut a11, mut a12, mut a22) = (0.0, Complex64::zero(), 0.0);
            let (mut b1, mut b2) = (Complex64::zero(), Complex64::zero());
            let mut before: f64 = 0.0;
            for m in &self.minors {
                let s = m.magnitude(z1, z2).max(f64::MIN_POSITIVE);
                let (v, d1, d2) = m.eval(z1, z2);
                let (v, d1, d2) = (v / s, d1 / s, d2 / s);
                before = before.max(v.norm());
                a11 += d1.norm_sqr();
                a22 += d2.norm_sqr();
                a12 += d1.conj() * d2;
                b1 -= d1.conj() * v;
                b2 -= d2.conj() * v;
            }
            let det = a11 * a22 - a12.norm_sqr();
            if det.abs() <= 1e-300 {
                break;
            }
            let dz1 = (b1 * a22 - a12 * b2) / det;
            let dz2 = (b2 * a11 - a12.conj() * b1) / det;
            if !(dz1.norm().is_finite() && dz2.norm().is_finite()) {
                break;
            }
            let (n1, n2) = (z1 + dz1, z2 + dz2);
            if before < 1e-12 && self.residual(n1, n2) > before {
                break;
            }
            z1 = n1;
            z2 = n2;
            if dz1.norm() + dz2.norm() <= 1e-15 * (1.0 + z1.norm() + z2.norm()) {
                break;
            }
        }
        (z1, z2)
    }
}

fn eval_asc(p: &[f64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c)
}

/// Largest 2×2 minor of the unit vectors along `p(s)` and `p(t)`.
fn normalized_minor(forms: &[Vec<f64>], s: Complex64, t: Complex64) -> f64 {
    let a: Vec<Complex64> = forms.iter().map(|p| eval_asc(p, s)).collect();
    let b: Vec<Complex64> = forms.iter().map(|p| eval_asc(p, t)).collect();
    let na = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut worst: f64 = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let m = (a[i] * b[j] - a[j] * b[i]) / (na * nb);
            worst = worst.max(m.norm());
        }
    }
    worst
}

/// All pairs `{s, t}`, `s ≠ t`, with `ξ(s) = ξ(t)`. The parametrization is
/// assumed birational onto its image. A point through which `r` branches
/// pass shows up as `C(r,2)` pairs.
pub fn detect_nodes(model: &ParamCurveModel) -> Result<NodeReport, HarnackError> {
    let d = model.form_degree();
    let raw: Vec<Vec<Rat>> = model.forms().iter().map(|f| binary_vec(f, d)).collect();
    let mob = adapted_mobius(&raw);
    // ascending coefficients of p_i(s) = φ'_i(s, 1)
    let forms: Vec<Vec<Rat>> = raw
        .iter()
        .map(|v| {
            let mut v = transform(v, &mob);
            v.reverse();
            v
        })
        .collect();
    let mut minors = Vec::new();
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            let m = divided_minor(&forms[i], &forms[j]);
            if !m.is_zero() {
                minors.push(m.to_complex());
            }
        }
    }
    if minors.is_empty() {
        return Err(HarnackError::Elimination("all minors vanish; the image is a point".into()));
    }
    let forms_f: Vec<Vec<f64>> = forms.iter().map(|v| scaled_f64(v)).collect();
    let system = System { minors };

    // two fixed combinations of the minors
    let mut f = CBiv(Vec::new());
    let mut g = CBiv(Vec::new());
    for (k, m) in system.minors.iter().enumerate() {
        f.add_scaled(m, 1.0 + ((7 * k + 3) % 11) as f64 / 11.0);
        g.add_scaled(m, if k % 2 == 0 { 1.0 } else { -1.0 } * (2.0 + ((5 * k * k + 2 * k) % 13) as f64) / 13.0);
    }
    let pair = System {
        minors: vec![f.clone(), g.clone()],
    };

    let mut found: Vec<(Complex64, Complex64)> = Vec::new();
    let mut worst_accepted: f64 = 0.0;
    let close = |a: (Complex64, Complex64), b: (Complex64, Complex64)| {
        let scale = 1.0 + a.0.norm() + a.1.norm();
        (a.0 - b.0).norm() + (a.1 - b.1).norm() <= CLUSTER_TOL * scale
            || (a.0 - b.1).norm() + (a.1 - b.0).norm() <= CLUSTER_TOL * scale
    };
    let starts = hidden_variable_roots(&f, &g)?;
    // candidate refinement is independent per start; results keep start order
    let refine = |s: Complex64| -> Vec<(Complex64, Complex64, f64)> {
        let mut out = Vec::new();
        for t in roots::complex_roots(&f.in_t(s)) {
            let (s, t) = pair.polish(s, t);
            if (s - t).norm() <= 1e-6 * (1.0 + s.norm() + t.norm())
                || normalized_minor(&forms_f, s, t) > SPURIOUS
            {
                continue;
            }
            let (s, t) = system.polish(s, t);
            if (s - t).norm() <= 1e-6 * (1.0 + s.norm() + t.norm()) {
                continue;
            }
            let r = normalized_minor(&forms_f, s, t);
            if r <= SPURIOUS {
                out.push((s, t, r));
            }
        }
        out
    };
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(16);
    let chunk = starts.len().div_ceil(threads).max(1);
    let refined: Vec<(Complex64, Complex64, f64)> = std::thread::scope(|sc| {
        let handles: Vec<_> = starts
            .chunks(chunk)
            .map(|c| sc.spawn(|| c.iter().flat_map(|&s| refine(s)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("node refinement thread"))
            .collect()
    });
    for (s, t, r) in refined {
        if r > ACCEPT {
            return Err(HarnackError::IllConditioned(r));
        }
        if found.iter().any(|&p| close(p, (s, t))) {
            continue;
        }
        worst_accepted = worst_accepted.max(r);
        found.push((s, t));
    }

    let mut pairs: Vec<NodePair> = found
        .into_iter()
        .map(|(mut s, mut t)| {
            let real = |z: Complex64| z.im.abs() <= CLUSTER_TOL * (1.0 + z.norm());
            let kind = if real(s) && real(t) {
                s.im = 0.0;
                t.im = 0.0;
                NodeKind::Crossing
            } else if (s - t.conj()).norm() <= CLUSTER_TOL * (1.0 + s.norm()) {
                NodeKind::Solitary
            } else {
                NodeKind::Complex
            };
            let (mut s, mut t) = (unmap(s, &mob), unmap(t, &mob));
            order_pair(&mut s, &mut t);
            NodePair { s, t, kind }
        })
        .collect();
    pairs.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal));
    Ok(NodeReport {
        pairs,
        residual: worst_accepted,
    })
}

/// Undo the Möbius change: `s = (a s' + b)/(c s' + d)`.
fn unmap(z: Complex64, m: &[Rat; 4]) -> Param {
    let [a, b, c, d] = m.clone().map(|x| x.to_f64());
    let num = z * a + b;
    let den = z * c + d;
    if den.norm() <= 1e-12 * num.norm() {
        Param::Infinity
    } else {
        let w = num / den;
        Param::Finite(if w.im.abs() <= 1e-14 * (1.0 + w.norm()) {
            Complex64::new(w.re, 0.0)
        } else {
            w
        })
    }
}

fn key(p: &NodePair) -> (f64, f64, f64, f64) {
    let k = |x: &Param| match x {
        Param::Finite(z) => (z.re, z.im),
        Param::Infinity => (f64::INFINITY, 0.0),
    };
    let (a, b) = (k(&p.s), k(&p.t));
    (a.0, a.1, b.0, b.1)
}

/// Puts the smaller parameter (real part, then imaginary part) first.
fn order_pair(s: &mut Param, t: &mut Param) {
    let k = |x: &Param| match x {
        Param::Finite(z) => (z.re, z.im),
        Param::Infinity => (f64::INFINITY, 0.0),
    };
    if k(t) < k(s) {
        std::mem::swap(s, t);
    }
}
