//! Dense primal–dual interior point method for block feasibility problems.
//!
//! The problem `⟨F_k, X⟩ = h_k`, `⟨N, X⟩ = 1`, `X ⪰ 0` is homogenized with a
//! scalar block `s ≥ 0` and replaced by
//!
//! ```text
//! max τ   s.t.   X̂ − τI ⪰ 0,   ⟨F̂_k, X̂⟩ = 0,   tr X̂ = 1.
//! ```
//!
//! Eliminating `τ` through the trace row leaves a standard pair
//! `min ⟨C, W⟩, 𝒜(W) = b, W ⪰ 0` / `max bᵀu, C − 𝒜*(u) ⪰ 0` with `W = X̂ − τI`.
//! The dual starts strictly feasible at `u = 0`, so every dual iterate bounds
//! `τ*` from above; a negative bound is a separator.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::SymMatrix;

use super::SdpError;

/// `Σ coeff · X[block][i][j]` over entries with `i ≤ j`, equal to `rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub terms: Vec<(usize, usize, usize, f64)>,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(rhs: f64) -> Self {
        Constraint {
            terms: Vec::new(),
            rhs,
        }
    }

    /// Add `coeff · X[block][i][j]`; the pair is stored as `i ≤ j`.
    pub fn push(&mut self, block: usize, i: usize, j: usize, coeff: f64) {
        if coeff != 0.0 {
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            self.terms.push((block, i, j, coeff));
        }
    }

    /// `tr X_block = rhs`.
    pub fn trace(block: usize, order: usize, rhs: f64) -> Self {
        let mut c = Constraint::new(rhs);
        for i in 0..order {
            c.push(block, i, i, 1.0);
        }
        c
    }

    pub fn eval(&self, blocks: &[SymMatrix]) -> f64 {
        self.terms
            .iter()
            .map(|&(b, i, j, c)| c * blocks[b].get(i, j))
            .sum()
    }

    /// The symmetric matrices `F` with `⟨F, X⟩` equal to the functional.
    fn matrices(&self, orders: &[usize]) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = orders.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for &(b, i, j, c) in &self.terms {
            if i == j {
                out[b][(i, i)] += c;
            } else {
                out[b][(i, j)] += 0.5 * c;
                out[b][(j, i)] += 0.5 * c;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    /// Orders of the PSD blocks.
    pub blocks: Vec<usize>,
    pub constraints: Vec<Constraint>,
    /// Designated normalization; its right-hand side is taken as 1.
    pub normalization: Constraint,
}

impl SdpProblem {
    pub fn validate(&self) -> Result<(), SdpError> {
        for c in self.constraints.iter().chain([&self.normalization]) {
            if !c.rhs.is_finite() {
                return Err(SdpError::NonFinite);
            }
            for &(b, i, j, x) in &c.terms {
                if !x.is_finite() {
                    return Err(SdpError::NonFinite);
                }
                let n = *self.blocks.get(b).ok_or_else(|| {
                    SdpError::Dimension(format!("block {b} of {}", self.blocks.len()))
                })?;
                if i > j || j >= n {
                    return Err(SdpError::Dimension(format!(
                        "entry ({i}, {j}) in block {b} of order {n}"
                    )));
                }
            }
        }
        if self.normalization.terms.is_empty() {
            return Err(SdpError::Dimension("empty normalization".into()));
        }
        Ok(())
    }

    /// Largest violation of the constraints and the normalization.
    pub fn residual(&self, x: &[SymMatrix]) -> f64 {
        let r = self
            .constraints
            .iter()
            .map(|c| (c.eval(x) - c.rhs).abs())
            .fold(0.0, f64::max);
        r.max((self.normalization.eval(x) - 1.0).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpOptions {
    pub eps_feas: f64,
    pub eps_gap: f64,
    pub max_iter: usize,
    /// Separator margin required by callers after normalizing `‖ℓ‖₂ = 1`.
    pub delta: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            eps_feas: 1e-8,
            eps_gap: 1e-10,
            max_iter: 200,
            delta: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub iterations: usize,
    pub primal_infeasibility: f64,
    pub gap: f64,
    /// Phase-I value certified by the primal iterate.
    pub tau_primal: f64,
    /// Upper bound on the phase-I value from the dual iterate.
    pub tau_dual: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SdpOutcome {
    Feasible {
        blocks: Vec<SymMatrix>,
        residual: f64,
    },
    /// `dual[k]` multiplies constraint `k`; `Σ dual_k F_k` is negative
    /// definite on every block with the given margin and `Σ dual_k h_k ≥ 0`.
    Separator {
        dual: Vec<f64>,
        margin: f64,
    },
    Indeterminate(Diagnostic),
}

type Blocks = Vec<DMatrix<f64>>;

/// Eigenvalue tolerance of a feasible answer, in units of `eps_feas` times
/// the largest eigenvalue.
const PSD_SLACK: f64 = 100.0;

fn dot(a: &Blocks, b: &Blocks) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn axpy(a: &Blocks, s: f64, b: &Blocks) -> Blocks {
    a.iter().zip(b).map(|(x, y)| x + y * s).collect()
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn inverse_spd(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    m.clone().cholesky().map(|c| c.inverse())
}

/// Largest `α` with `X + α dX ⪰ 0`.
fn max_step(x: &Blocks, dx: &Blocks) -> f64 {
    let mut alpha = f64::INFINITY;
    for (xb, db) in x.iter().zip(dx) {
        let Some(ch) = xb.clone().cholesky() else {
            return 0.0;
        };
        let l = ch.l();
        let Some(li) = l.clone().try_inverse() else {
            return 0.0;
        };
        let s = sym(&(&li * db * li.transpose()));
        let lmin = s.symmetric_eigenvalues().min();
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}

struct Phase1 {
    orders: Vec<usize>,
    n: f64,
    a: Vec<Blocks>,
    b: DVector<f64>,
    c: Blocks,
    /// Row scaling applied to each homogenized constraint.
    scales: Vec<f64>,
}

impl Phase1 {
    fn new(p: &SdpProblem) -> Self {
        let mut orders = p.blocks.clone();
        let s_block = orders.len();
        orders.push(1);
        let n: f64 = orders.iter().sum::<usize>() as f64;
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut scales = Vec::new();
        for (con, rhs) in p
            .constraints
            .iter()
            .map(|c| (c, c.rhs))
            .chain([(&p.normalization, 1.0)])
        {
            let mut f = con.matrices(&orders);
            f[s_block][(0, 0)] = -rhs;
            let norm = f.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt();
            let scale = if norm > 0.0 { 1.0 / norm } else { 1.0 };
            for m in f.iter_mut() {
                *m *= scale;
            }
            let tr: f64 = f.iter().map(|m| m.trace()).sum();
            for m in f.iter_mut() {
                for i in 0..m.nrows() {
                    m[(i, i)] -= tr / n;
                }
            }
            a.push(f);
            b.push(-tr / n);
            scales.push(scale);
        }
        let c = orders
            .iter()
            .map(|&k| DMatrix::identity(k, k) / n)
            .collect();
        Phase1 {
            orders,
            n,
            a,
            b: DVector::from_vec(b),
            c,
            scales,
        }
    }

    fn op(&self, w: &Blocks) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|ak| dot(ak, w)))
    }

    fn adj(&self, u: &DVector<f64>) -> Blocks {
        let mut out: Blocks = self.orders.iter().map(|&k| DMatrix::zeros(k, k)).collect();
        for (ak, &uk) in self.a.iter().zip(u.iter()) {
            if uk != 0.0 {
                for (o, m) in out.iter_mut().zip(ak) {
                    *o += m * uk;
                }
            }
        }
        out
    }
}

struct Run {
    ph: Phase1,
    w: Blocks,
    u: DVector<f64>,
    z: Blocks,
    diag: Diagnostic,
    converged: bool,
}

fn interior_point(p: &SdpProblem, opts: &SdpOptions) -> Run {
    let ph = Phase1::new(p);
    let kdim = ph.a.len();
    let nb = ph.orders.len();
    let mut w: Blocks = ph.orders.iter().map(|&k| DMatrix::identity(k, k)).collect();
    let mut u = DVector::<f64>::zeros(kdim);
    let mut z = ph.c.clone();
    let bnorm = 1.0 + ph.b.norm();

    let mut diag = Diagnostic {
        iterations: 0,
        primal_infeasibility: f64::INFINITY,
        gap: f64::INFINITY,
        tau_primal: f64::NEG_INFINITY,
        tau_dual: f64::INFINITY,
        message: String::new(),
    };
    let tau_of_w = |w: &Blocks| (1.0 - w.iter().map(|m| m.trace()).sum::<f64>()) / ph.n;

    let mut converged = false;
    // the primal iterate closest to feasible with τ ≥ 0, as (merit, W)
    let mut best: Option<(f64, Blocks, f64, f64)> = None;
    for iter in 0..opts.max_iter {
        diag.iterations = iter;
        let rp = &ph.b - ph.op(&w);
        let atu = ph.adj(&u);
        let rd: Blocks = (0..nb).map(|i| &ph.c[i] - &z[i] - &atu[i]).collect();
        let gap = dot(&w, &z);
        let pobj = dot(&ph.c, &w);
        let dobj = ph.b.dot(&u);
        diag.primal_infeasibility = rp.norm() / bnorm;
        diag.gap = gap;
        diag.tau_primal = tau_of_w(&w);
        diag.tau_dual = 1.0 / ph.n - dobj;
        if !(gap.is_finite() && pobj.is_finite() && dobj.is_finite()) {
            diag.message = "non-finite iterate".into();
            break;
        }
        let merit = diag.primal_infeasibility.max(-diag.tau_primal);
        if best.as_ref().is_none_or(|b| merit < b.0) {
            best = Some((merit, w.clone(), diag.primal_infeasibility, diag.tau_primal));
        }
        let rel_gap = gap / (1.0 + pobj.abs() + dobj.abs());
        if diag.primal_infeasibility <= opts.eps_feas && rel_gap <= opts.eps_gap {
            converged = true;
            break;
        }
        // with the gap closed, further steps only lose primal accuracy
        if rel_gap <= 1e-3 * opts.eps_gap {
            diag.message = "gap closed before primal feasibility".into();
            break;
        }
        // a strongly negative dual bound settles infeasibility early
        if diag.tau_dual < -1.0 {
            converged = true;
            break;
        }
        let mu = gap / ph.n;

        let zi: Option<Blocks> = z.iter().map(inverse_spd).collect();
        let Some(zi) = zi else {
            diag.message = "dual slack lost definiteness".into();
            break;
        };
        // Schur complement M_kl = ⟨A_k, W A_l Z⁻¹⟩
        let g: Vec<Blocks> = ph
            .a
            .iter()
            .map(|al| (0..nb).map(|i| &w[i] * &al[i] * &zi[i]).collect())
            .collect();
        let mut m = DMatrix::<f64>::zeros(kdim, kdim);
        for k in 0..kdim {
            for l in k..kdim {
                let v = dot(&ph.a[k], &g[l]);
                m[(k, l)] = v;
                m[(l, k)] = v;
            }
        }
        let exact = m.clone();
        let reg = 1e-14 * (0..kdim).map(|k| m[(k, k)]).fold(0.0, f64::max).max(1e-300);
        for k in 0..kdim {
            m[(k, k)] += reg;
        }
        let Some(chol) = m.cholesky() else {
            diag.message = "Schur complement not positive definite".into();
            break;
        };

        let direction = |sigma: f64, corr: Option<(&Blocks, &Blocks)>| {
            // H = σμZ⁻¹ − W − W R_d Z⁻¹ − dW_a dZ_a Z⁻¹
            let h: Blocks = (0..nb)
                .map(|i| {
                    let mut h = &zi[i] * (sigma * mu) - &w[i] - &w[i] * &rd[i] * &zi[i];
                    if let Some((dwa, dza)) = corr {
                        h -= &dwa[i] * &dza[i] * &zi[i];
                    }
                    h
                })
                .collect();
            let rhs = &rp - ph.op(&h);
            // refinement against the unregularized system keeps 𝒜(dW) = r_p
            let mut du = chol.solve(&rhs);
            for _ in 0..2 {
                let r = &rhs - &exact * &du;
                du += chol.solve(&r);
            }
            let atdu = ph.adj(&du);
            let dz: Blocks = (0..nb).map(|i| &rd[i] - &atdu[i]).collect();
            let dw: Blocks = (0..nb)
                .map(|i| sym(&(&h[i] + &w[i] * &atdu[i] * &zi[i])))
                .collect();
            (dw, du, dz)
        };

        let (dwa, _, dza) = direction(0.0, None);
        let ap = (max_step(&w, &dwa)).min(1.0);
        let ad = (max_step(&z, &dza)).min(1.0);
        let mu_aff = dot(&axpy(&w, ap, &dwa), &axpy(&z, ad, &dza)) / ph.n;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        let (dw, du, dz) = direction(sigma, Some((&dwa, &dza)));
        let ap = (0.95 * max_step(&w, &dw)).min(1.0);
        let ad = (0.95 * max_step(&z, &dz)).min(1.0);
        if ap <= 1e-14 && ad <= 1e-14 {
            diag.message = "step length collapsed".into();
            break;
        }
        w = axpy(&w, ap, &dw);
        u += &du * ad;
        z = axpy(&z, ad, &dz);
        diag.iterations = iter + 1;
    }
    if !converged && diag.message.is_empty() {
        diag.message = format!("no convergence in {} iterations", opts.max_iter);
    }
    // later iterates can lose primal accuracy as μ → 0
    if let Some((_, bw, pinf, tau)) = best {
        if pinf.max(-tau) < diag.primal_infeasibility.max(-diag.tau_primal) {
            w = bw;
            diag.primal_infeasibility = pinf;
            diag.tau_primal = tau;
        }
    }
    Run {
        ph,
        w,
        u,
        z,
        diag,
        converged,
    }
}

/// Feasibility of `P`: a solution, a separating dual vector, or a
/// diagnostic. Never both a solution and a separator.
pub fn solve_feasibility(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpOutcome, SdpError> {
    p.validate()?;
    Ok(solve_at_depth(p, opts, 0))
}

/// Rounds of facial reduction attempted before giving up.
const MAX_REDUCTIONS: usize = 3;

fn solve_at_depth(p: &SdpProblem, opts: &SdpOptions, depth: usize) -> SdpOutcome {
    let Run {
        ph,
        w,
        u,
        z,
        mut diag,
        converged,
    } = interior_point(p, opts);
    let nb = ph.orders.len();
    // an accepted solution whose eigenvalues needed the slack
    let mut fallback: Option<(SdpOutcome, f64)> = None;

    if diag.tau_dual < -opts.eps_feas {
        // Σ u_k F̂_k ⪯ τ_d I ≺ 0 in the scaled rows
        let dual: Vec<f64> = (0..p.constraints.len())
            .map(|k| u[k] * ph.scales[k])
            .collect();
        return SdpOutcome::Separator {
            dual,
            margin: -diag.tau_dual,
        };
    }
    // `accept` re-checks the polished candidate, so a looser gate is safe
    if diag.tau_primal >= -opts.eps_feas && diag.primal_infeasibility <= 1e3 * opts.eps_feas {
        let tau = diag.tau_primal;
        let s = w[nb - 1][(0, 0)] + tau;
        if s > opts.eps_feas {
            let blocks: Vec<SymMatrix> = (0..nb - 1)
                .map(|i| {
                    let k = ph.orders[i];
                    SymMatrix::symmetrize(&((&w[i] + DMatrix::identity(k, k) * tau) / s))
                })
                .collect();
            match accept(p, blocks, opts) {
                Ok((out, slack)) if slack >= -opts.eps_feas => return out,
                Ok(candidate) => fallback = Some(candidate),
                Err(msg) => diag.message = msg,
            }
        } else {
            diag.message = "feasible phase-I value with vanishing normalization".into();
        }
    } else if converged && diag.message.is_empty() {
        diag.message = "phase-I value within tolerance of zero".into();
    }

    // a phase-I value of zero: Z − τ_d I exposes a face holding every solution
    if depth < MAX_REDUCTIONS && diag.tau_dual < 1e-6 {
        let exposing: Blocks = z
            .iter()
            .map(|zb| zb - DMatrix::identity(zb.nrows(), zb.nrows()) * diag.tau_dual)
            .collect();
        if let Some(face) = Face::exposed_by(&exposing) {
            if let Some(reduced) = face.restrict(p) {
                match solve_at_depth(&reduced, opts, depth + 1) {
                    SdpOutcome::Feasible { blocks, .. } => match accept(p, face.lift(&blocks), opts) {
                        Ok((out, slack)) if fallback.as_ref().is_none_or(|f| slack > f.1) => return out,
                        Ok(_) => {}
                        Err(msg) => diag.message = format!("after facial reduction: {msg}"),
                    },
                    SdpOutcome::Separator { .. } => {
                        diag.message = "no solution on the exposed face".into();
                    }
                    SdpOutcome::Indeterminate(d) => {
                        diag.message = format!("after facial reduction: {}", d.message);
                    }
                }
            }
        }
    }
    match fallback {
        Some((out, _)) => out,
        None => SdpOutcome::Indeterminate(diag),
    }
}

/// Polishes a candidate and returns it if the residual and eigenvalue
/// checks pass, with its least eigenvalue relative to the largest.
fn accept(
    p: &SdpProblem,
    blocks: Vec<SymMatrix>,
    opts: &SdpOptions,
) -> Result<(SdpOutcome, f64), String> {
    let blocks = refine(p, blocks, opts.eps_feas);
    let residual = p.residual(&blocks);
    let min_eig = blocks
        .iter()
        .map(|b| crate::algebra::min_eigenvalue(b).unwrap_or(f64::NEG_INFINITY))
        .fold(f64::INFINITY, f64::min);
    let max_eig = blocks
        .iter()
        .map(|b| crate::algebra::max_eigenvalue(b).unwrap_or(f64::INFINITY))
        .fold(1.0, f64::max);
    // the projection in `refine` trades residual for eigenvalue drift
    // of the same order as the interior-point accuracy
    if residual <= opts.eps_feas && min_eig >= -PSD_SLACK * opts.eps_feas * max_eig {
        Ok((SdpOutcome::Feasible { blocks, residual }, min_eig / max_eig))
    } else {
        Err(format!(
            "feasible phase-I value but residual {residual:.3e}, min eigenvalue {min_eig:.3e}"
        ))
    }
}

/// Per block, an orthonormal basis `V` of the kernel of an exposing matrix;
/// every solution has the form `V S Vᵀ`. The last block is the
/// homogenizing scalar.
struct Face {
    bases: Vec<DMatrix<f64>>,
}

impl Face {
    /// Splits the joint spectrum of the exposing blocks at its widest
    /// gap, which must span at least two orders of magnitude.
    fn exposed_by(e: &Blocks) -> Option<Face> {
        let eigs: Vec<_> = e.iter().map(|m| m.clone().symmetric_eigen()).collect();
        let top = eigs
            .iter()
            .flat_map(|d| d.eigenvalues.iter().copied())
            .fold(0.0f64, f64::max);
        if top <= 0.0 {
            return None;
        }
        // below this the spectrum is interior-point noise
        let floor = 1e-8 * top;
        let mut all: Vec<f64> = eigs
            .iter()
            .flat_map(|d| d.eigenvalues.iter().map(|&x| x.max(floor)))
            .collect();
        all.sort_by(f64::total_cmp);
        let (ratio, cut) = all
            .windows(2)
            .map(|v| (v[1] / v[0], (v[0] * v[1]).sqrt()))
            .fold((1.0, 0.0), |best, c| if c.0 > best.0 { c } else { best });
        if ratio < 100.0 {
            return None;
        }
        let bases: Vec<DMatrix<f64>> = eigs
            .iter()
            .map(|d| {
                let keep: Vec<usize> = (0..d.eigenvalues.len())
                    .filter(|&i| d.eigenvalues[i] < cut)
                    .collect();
                DMatrix::from_fn(d.eigenvectors.nrows(), keep.len(), |r, c| {
                    d.eigenvectors[(r, keep[c])]
                })
            })
            .collect();
        // the homogenizing scalar must stay free, and something must be cut
        let (last, rest) = bases.split_last()?;
        if last.ncols() != 1 || rest.iter().zip(e).all(|(v, m)| v.ncols() == m.nrows()) {
            return None;
        }
        Some(Face {
            bases: rest.to_vec(),
        })
    }

    /// The problem in the face coordinates `S`, with rows that became
    /// linearly dependent dropped (the normalization is always kept).
    fn restrict(&self, p: &SdpProblem) -> Option<SdpProblem> {
        let live: Vec<usize> = (0..self.bases.len())
            .filter(|&b| self.bases[b].ncols() > 0)
            .collect();
        let orders: Vec<usize> = live.iter().map(|&b| self.bases[b].ncols()).collect();
        let map = |c: &Constraint| -> Constraint {
            let f = c.matrices(&p.blocks);
            let mut out = Constraint::new(c.rhs);
            for (nb, &b) in live.iter().enumerate() {
                let v = &self.bases[b];
                let g = v.transpose() * &f[b] * v;
                let scale = g.amax();
                for i in 0..g.nrows() {
                    for j in i..g.ncols() {
                        let x = if i == j { g[(i, i)] } else { 2.0 * g[(i, j)] };
                        if x.abs() > 1e-15 * scale {
                            out.push(nb, i, j, x);
                        }
                    }
                }
            }
            out
        };
        let normalization = map(&p.normalization);
        if normalization.terms.is_empty() {
            return None;
        }
        // greedy independent subset, normalization first
        let dim: usize = orders.iter().map(|n| n * (n + 1) / 2).sum();
        let mut offsets = Vec::new();
        let mut acc = 0;
        for n in &orders {
            offsets.push(acc);
            acc += n * (n + 1) / 2;
        }
        let dense = |c: &Constraint| {
            let mut v = DVector::<f64>::zeros(dim);
            for &(b, i, j, x) in &c.terms {
                v[offsets[b] + j * (j + 1) / 2 + i] += x;
            }
            v
        };
        let mut basis: Vec<DVector<f64>> = Vec::new();
        let mut independent = |v: DVector<f64>| {
            let n0 = v.norm();
            let mut r = v;
            for q in &basis {
                let d = q.dot(&r);
                r -= q * d;
            }
            let n = r.norm();
            if n > 1e-9 * n0 && n > 0.0 {
                basis.push(r / n);
                true
            } else {
                false
            }
        };
        if !independent(dense(&normalization)) {
            return None;
        }
        let constraints: Vec<Constraint> = p
            .constraints
            .iter()
            .map(map)
            .filter(|c| independent(dense(c)))
            .collect();
        Some(SdpProblem {
            blocks: orders,
            constraints,
            normalization,
        })
    }

    fn lift(&self, reduced: &[SymMatrix]) -> Vec<SymMatrix> {
        let mut it = reduced.iter();
        self.bases
            .iter()
            .map(|v| {
                if v.ncols() == 0 {
                    SymMatrix::zeros(v.nrows())
                } else {
                    let s = it.next().expect("one reduced block per live block");
                    SymMatrix::symmetrize(&(v * s.as_matrix() * v.transpose()))
                }
            })
            .collect()
    }
}

/// Least-norm correction of the blocks onto the affine space of all rows,
/// including the normalization. The rows are independent for the problems
/// built here, so the correction is of the size of the residual and moves
/// eigenvalues by at most that much. Kept only if the residual drops.
fn refine(p: &SdpProblem, blocks: Vec<SymMatrix>, eps: f64) -> Vec<SymMatrix> {
    let start = p.residual(&blocks);
    if start <= 1e-3 * eps {
        return blocks;
    }
    let rows: Vec<&Constraint> = p.constraints.iter().chain([&p.normalization]).collect();
    let mut offsets = Vec::new();
    let mut nvar = 0;
    for &n in &p.blocks {
        offsets.push(nvar);
        nvar += n * (n + 1) / 2;
    }
    // entry (i, j), i ≤ j, of block b
    let index = |b: usize, i: usize, j: usize| offsets[b] + j * (j + 1) / 2 + i;
    let mut m = DMatrix::<f64>::zeros(rows.len(), nvar);
    for (k, row) in rows.iter().enumerate() {
        for &(b, i, j, c) in &row.terms {
            m[(k, index(b, i, j))] += c;
        }
    }
    let mut out = blocks;
    let mut current = start;
    // corrections X 𝒜*(y) X first: directions where X is nearly singular
    // are damped, so the iterate stays PSD
    let mats: Vec<Vec<DMatrix<f64>>> = rows.iter().map(|c| c.matrices(&p.blocks)).collect();
    for _ in 0..5 {
        let xs: Vec<DMatrix<f64>> = out.iter().map(|x| x.as_matrix().clone()).collect();
        let xfx: Vec<Vec<DMatrix<f64>>> = mats
            .iter()
            .map(|f| f.iter().zip(&xs).map(|(fb, x)| x * fb * x).collect())
            .collect();
        let n = rows.len();
        let mut g = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            for l in k..n {
                let v: f64 = mats[k].iter().zip(&xfx[l]).map(|(a, b)| a.dot(b)).sum();
                g[(k, l)] = v;
                g[(l, k)] = v;
            }
        }
        let r = DVector::from_iterator(
            n,
            (0..n).map(|k| {
                let target = if k + 1 == n { 1.0 } else { rows[k].rhs };
                target - rows[k].eval(&out)
            }),
        );
        let Ok(y) = g.svd(true, true).solve(&r, 1e-14) else {
            break;
        };
        let next: Vec<SymMatrix> = (0..p.blocks.len())
            .map(|b| {
                let mut d = DMatrix::<f64>::zeros(p.blocks[b], p.blocks[b]);
                for (k, yk) in y.iter().enumerate() {
                    if *yk != 0.0 {
                        d += &xfx[k][b] * *yk;
                    }
                }
                SymMatrix::symmetrize(&(&xs[b] + d))
            })
            .collect();
        let res = p.residual(&next);
        let psd = next
            .iter()
            .all(|x| crate::algebra::min_eigenvalue(x).is_ok_and(|e| e >= 0.0));
        if res >= current || !psd {
            break;
        }
        out = next;
        current = res;
        if current <= 1e-3 * eps {
            return out;
        }
    }
    for _ in 0..3 {
        let r = DVector::from_iterator(
            rows.len(),
            (0..rows.len()).map(|k| {
                let target = if k + 1 == rows.len() { 1.0 } else { rows[k].rhs };
                target - rows[k].eval(&out)
            }),
        );
        let Ok(delta) = m.clone().svd(true, true).solve(&r, 1e-13) else {
            break;
        };
        let next: Vec<SymMatrix> = out
            .iter()
            .enumerate()
            .map(|(b, x)| {
                SymMatrix::from_upper(x.order(), |i, j| x.get(i, j) + delta[index(b, i, j)])
            })
            .collect();
        let res = p.residual(&next);
        if res >= current {
            break;
        }
        out = next;
        current = res;
        if current <= 1e-3 * eps {
            break;
        }
    }
    out
}
