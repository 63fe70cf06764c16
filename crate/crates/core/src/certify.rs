//! Multiplier certificates `f·g ∈ Σ_{2j+2k}` with `g ∈ Σ_{2k}`, strict
//! separators ruling them out, and solver-free verification of both.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{sym_eig, AlgebraError, Coeff, Polynomial, Rat, SymMatrix};
use crate::curves::{CurveError, CurveModel};
use crate::sdp::{
    catalecticant, gram_constraints, localized_catalecticant, solve_feasibility, Constraint,
    Diagnostic, MomentFunctional, SdpError, SdpOptions, SdpOutcome, SdpProblem,
};

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("f vanishes in R_{0}")]
    ZeroForm(u32),
    #[error("f has {got} coordinates, R_{degree} has dimension {expected}")]
    Dimension {
        degree: u32,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `g = Σ A_ab b_a b_b ∈ Σ_{2k}` and `f·g = Σ B_uv c_u c_v ∈ Σ_{2j+2k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierCertificate {
    pub j: u32,
    pub k: u32,
    #[serde(rename = "gram_A")]
    pub gram_a: SymMatrix,
    #[serde(rename = "gram_B")]
    pub gram_b: SymMatrix,
    pub residual: f64,
    /// Minimum eigenvalues of `A` and `B`.
    pub eig_margins: (f64, f64),
}

/// A functional on `R_{2j+2k}`, positive on `Σ_{2j+2k}∖0` and negative on
/// `f·Σ_{2k}∖0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrictSeparator {
    pub ell: MomentFunctional,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CertifyOutcome {
    Certificate(MultiplierCertificate),
    Separator(StrictSeparator),
    Indeterminate(Diagnostic),
}

impl CertifyOutcome {
    pub fn is_certificate(&self) -> bool {
        matches!(self, CertifyOutcome::Certificate(_))
    }

    pub fn is_separator(&self) -> bool {
        matches!(self, CertifyOutcome::Separator(_))
    }
}

/// Result of an independent check, with the reasons for any failure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    pub passed: bool,
    pub reasons: Vec<String>,
}

impl Verification {
    fn from_reasons(reasons: Vec<String>) -> Self {
        Verification {
            passed: reasons.is_empty(),
            reasons,
        }
    }
}

/// Restriction of an ambient form of degree `2j` to float coordinates of
/// `R_{2j}`.
pub fn restrict_form(model: &CurveModel, f: &Polynomial<Rat>, j: u32) -> Result<Vec<f64>, CertifyError> {
    Ok(model
        .restrict_in_degree(f, 2 * j)?
        .iter()
        .map(|c| c.to_f64())
        .collect())
}

fn check_form(model: &CurveModel, f: &[f64], j: u32) -> Result<f64, CertifyError> {
    let n = model.hilbert_function(2 * j);
    if f.len() != n {
        return Err(CertifyError::Dimension {
            degree: 2 * j,
            expected: n,
            got: f.len(),
        });
    }
    if f.iter().any(|x| !x.is_finite()) {
        return Err(SdpError::NonFinite.into());
    }
    let norm = f.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if norm == 0.0 {
        return Err(CertifyError::ZeroForm(2 * j));
    }
    Ok(norm)
}

/// Blocks `(A, B)` of orders `HF(k)`, `HF(j+k)`; one row per coordinate of
/// `R_{2j+2k}` equating `f·Σ A_ab b_a b_b` with `Σ B_uv c_u c_v`, and
/// `tr A = 1`. `f` is first scaled to unit ∞-norm.
pub fn build_multiplier_problem(
    model: &CurveModel,
    f: &[f64],
    j: u32,
    k: u32,
) -> Result<SdpProblem, CertifyError> {
    let norm = check_form(model, f, j)?;
    let fb = model.basis_monomials(2 * j);
    let terms: Vec<_> = fb
        .iter()
        .zip(f)
        .filter(|(_, c)| **c != 0.0)
        .map(|(m, c)| (m.clone(), c / norm))
        .collect();
    let basis = model.basis_monomials(k);
    let mut rows = vec![Constraint::new(0.0); model.hilbert_function(2 * j + 2 * k)];
    for a in 0..basis.len() {
        for b in a..basis.len() {
            let w = if a == b { 1.0 } else { 2.0 };
            let ab = basis[a].mul(&basis[b]);
            let mut acc = vec![0.0; rows.len()];
            for (m, c) in &terms {
                for (o, x) in acc.iter_mut().zip(model.monomial_coords(&m.mul(&ab)).iter()) {
                    *o += c * x.to_f64();
                }
            }
            for (row, x) in rows.iter_mut().zip(acc) {
                row.push(0, a, b, w * x);
            }
        }
    }
    gram_constraints(model, j + k, 1, -1.0, &mut rows);
    Ok(SdpProblem {
        blocks: vec![basis.len(), model.hilbert_function(j + k)],
        constraints: rows,
        normalization: Constraint::trace(0, basis.len(), 1.0),
    })
}

/// Solves the multiplier problem at `(j, k)`. Certificates and separators
/// are returned only after passing [`verify_certificate`] at `1e−6` and
/// [`verify_separator`] at `opts.delta`.
pub fn certify_multiplier(
    model: &CurveModel,
    f: &[f64],
    j: u32,
    k: u32,
    opts: &SdpOptions,
) -> Result<CertifyOutcome, CertifyError> {
    let problem = build_multiplier_problem(model, f, j, k)?;
    let norm = check_form(model, f, j)?;
    let outcome = solve_feasibility(&problem, opts)?;
    let indeterminate = |message: String| {
        CertifyOutcome::Indeterminate(Diagnostic {
            iterations: 0,
            primal_infeasibility: f64::NAN,
            gap: f64::NAN,
            tau_primal: f64::NAN,
            tau_dual: f64::NAN,
            message,
        })
    };
    match outcome {
        SdpOutcome::Feasible { blocks, residual } => {
            let mut it = blocks.into_iter();
            let a = it.next().expect("block A");
            // (f/‖f‖)·A = B, so f·A = ‖f‖·B
            let b = it.next().expect("block B").scale(norm);
            let eig_margins = (
                crate::algebra::min_eigenvalue(&a)?,
                crate::algebra::min_eigenvalue(&b)?,
            );
            let cert = MultiplierCertificate {
                j,
                k,
                gram_a: a,
                gram_b: b,
                residual,
                eig_margins,
            };
            let v = verify_certificate(model, f, &cert, 1e-6);
            if v.passed {
                let residual = certificate_residual(model, f, &cert)?;
                Ok(CertifyOutcome::Certificate(MultiplierCertificate { residual, ..cert }))
            } else {
                Ok(indeterminate(format!(
                    "solver solution failed verification: {}",
                    v.reasons.join("; ")
                )))
            }
        }
        SdpOutcome::Separator { dual, .. } => {
            // rows are coordinates of R_{2j+2k}, so the multipliers are ℓ itself
            let ell = MomentFunctional::new(2 * j + 2 * k, dual)?.normalized();
            let margin = separator_margin(model, f, j, k, &ell)?;
            let sep = StrictSeparator { ell, margin };
            let v = verify_separator(model, f, j, &sep, opts.delta);
            if v.passed {
                Ok(CertifyOutcome::Separator(sep))
            } else {
                Ok(indeterminate(format!(
                    "solver separator failed verification: {}",
                    v.reasons.join("; ")
                )))
            }
        }
        SdpOutcome::Indeterminate(d) => Ok(CertifyOutcome::Indeterminate(d)),
    }
}

/// `Σ_{a,b} G_ab red(b_a b_b)` in `R_{2m}`.
fn gram_element(model: &CurveModel, m: u32, g: &SymMatrix) -> Vec<f64> {
    let basis = model.basis_monomials(m);
    let mut out = vec![0.0; model.hilbert_function(2 * m)];
    for a in 0..basis.len() {
        for b in 0..basis.len() {
            let x = g.get(a, b);
            if x == 0.0 {
                continue;
            }
            for (o, c) in out.iter_mut().zip(model.monomial_coords(&basis[a].mul(&basis[b])).iter()) {
                *o += x * c.to_f64();
            }
        }
    }
    out
}

/// `(‖red(f·A) − red(B)‖∞, ‖red(f·A)‖∞)`.
fn certificate_defect(
    model: &CurveModel,
    f: &[f64],
    cert: &MultiplierCertificate,
) -> Result<(f64, f64), CertifyError> {
    let g = gram_element(model, cert.k, &cert.gram_a);
    let fg = model.multiply_f64(2 * cert.j, f, 2 * cert.k, &g)?;
    let sigma = gram_element(model, cert.j + cert.k, &cert.gram_b);
    let diff = fg.iter().zip(&sigma).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    let size = fg.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    Ok((diff, size))
}

fn certificate_residual(model: &CurveModel, f: &[f64], cert: &MultiplierCertificate) -> Result<f64, CertifyError> {
    Ok(certificate_defect(model, f, cert)?.0)
}

/// Re-checks a certificate from scratch: both Gram matrices PSD to `−tol`,
/// `tr A = 1` and `f·g = σ` coefficientwise to `tol·(1 + ‖f·g‖∞)`.
pub fn verify_certificate(
    model: &CurveModel,
    f: &[f64],
    cert: &MultiplierCertificate,
    tol: f64,
) -> Verification {
    let mut reasons = Vec::new();
    let p = model.hilbert_function(cert.k);
    let q = model.hilbert_function(cert.j + cert.k);
    if cert.gram_a.order() != p || cert.gram_b.order() != q {
        reasons.push(format!(
            "Gram orders ({}, {}) but HF gives ({p}, {q})",
            cert.gram_a.order(),
            cert.gram_b.order()
        ));
        return Verification::from_reasons(reasons);
    }
    if f.len() != model.hilbert_function(2 * cert.j) {
        reasons.push("f has the wrong dimension".into());
        return Verification::from_reasons(reasons);
    }
    for (name, g) in [("A", &cert.gram_a), ("B", &cert.gram_b)] {
        match crate::algebra::min_eigenvalue(g) {
            Ok(e) if e >= -tol => {}
            Ok(e) => reasons.push(format!("min eigenvalue of {name} is {e:.3e}")),
            Err(e) => reasons.push(format!("{name}: {e}")),
        }
    }
    let tr = cert.gram_a.trace();
    if (tr - 1.0).abs() > tol {
        reasons.push(format!("trace of A is {tr}"));
    }
    match certificate_defect(model, f, cert) {
        Ok((diff, size)) if diff <= tol * (1.0 + size) => {}
        Ok((diff, size)) => reasons.push(format!("f·g − σ has sup norm {diff:.3e} (f·g: {size:.3e})")),
        Err(e) => reasons.push(e.to_string()),
    }
    Verification::from_reasons(reasons)
}

/// `min(λ_min Cat(ℓ, j+k), −λ_max Loc(ℓ, f, k))`.
pub fn separator_margin(
    model: &CurveModel,
    f: &[f64],
    j: u32,
    k: u32,
    ell: &MomentFunctional,
) -> Result<f64, CertifyError> {
    let cat = sym_eig(&catalecticant(model, ell, j + k)?).map_err(SdpError::from)?;
    let loc = sym_eig(&localized_catalecticant(model, ell, f, j, k)?).map_err(SdpError::from)?;
    Ok(cat.min().min(-loc.max()))
}

/// Re-checks a separator: `‖ℓ‖₂ = 1`, `Cat(ℓ, j+k) ⪰ δI` and
/// `Loc(ℓ, f, k) ⪯ −δI`.
pub fn verify_separator(
    model: &CurveModel,
    f: &[f64],
    j: u32,
    sep: &StrictSeparator,
    delta: f64,
) -> Verification {
    let mut reasons = Vec::new();
    let ell = &sep.ell;
    if ell.degree < 2 * j || ell.degree % 2 == 1 {
        reasons.push(format!("functional degree {} is not 2j + 2k", ell.degree));
        return Verification::from_reasons(reasons);
    }
    let k = (ell.degree - 2 * j) / 2;
    if (ell.norm() - 1.0).abs() > 1e-9 {
        reasons.push(format!("‖ℓ‖₂ = {}", ell.norm()));
    }
    match catalecticant(model, ell, j + k).map_err(CertifyError::from).and_then(|m| {
        Ok(sym_eig(&m).map_err(SdpError::from)?.min())
    }) {
        Ok(e) if e >= delta => {}
        Ok(e) => reasons.push(format!("catalecticant min eigenvalue {e:.3e} below {delta:.3e}")),
        Err(e) => reasons.push(e.to_string()),
    }
    match localized_catalecticant(model, ell, f, j, k)
        .map_err(CertifyError::from)
        .and_then(|m| Ok(sym_eig(&m).map_err(SdpError::from)?.max()))
    {
        Ok(e) if e <= -delta => {}
        Ok(e) => reasons.push(format!("localized max eigenvalue {e:.3e} above {:.3e}", -delta)),
        Err(e) => reasons.push(e.to_string()),
    }
    Verification::from_reasons(reasons)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchEntry {
    pub k: u32,
    #[serde(flatten)]
    pub outcome: CertifyOutcome,
}

/// Outcomes for `k = 0, 1, …, k_max`, stopping after the first certificate
/// unless `exhaustive`. Exhaustive searches solve all `k` concurrently.
pub fn search_min_multiplier_degree(
    model: &CurveModel,
    f: &[f64],
    j: u32,
    k_max: u32,
    exhaustive: bool,
    opts: &SdpOptions,
) -> Result<Vec<SearchEntry>, CertifyError> {
    if exhaustive {
        let results: Vec<Result<CertifyOutcome, CertifyError>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..=k_max)
                .map(|k| s.spawn(move || certify_multiplier(model, f, j, k, opts)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("search thread panicked"))
                .collect()
        });
        return (0..=k_max)
            .zip(results)
            .map(|(k, r)| r.map(|outcome| SearchEntry { k, outcome }))
            .collect();
    }
    let mut out = Vec::new();
    for k in 0..=k_max {
        let outcome = certify_multiplier(model, f, j, k, opts)?;
        let done = outcome.is_certificate();
        out.push(SearchEntry { k, outcome });
        if done {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
