//! Univariate polynomial roots via companion-matrix eigenvalues, followed by
//! Newton polishing. Coefficients are given in ascending degree order.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

// Relative diagonal shifts tried when the QR iteration stalls, as it does on
// companion matrices whose eigenvalues share one modulus (e.g. `t⁴ + 1`).
const SCHUR_SHIFTS: [f64; 4] = [0.0, 0.371_9, -0.613_7, 1.283_1];

fn schur_budget(n: usize) -> usize {
    100 * n.max(10)
}

/// Eigenvalues of a real square matrix, or `None` if the Schur iteration
/// fails to converge under every shift.
pub fn eigenvalues(m: &DMatrix<f64>) -> Option<Vec<Complex64>> {
    let n = m.nrows();
    let scale = m.amax().max(1e-300);
    for s in SCHUR_SHIFTS {
        let sigma = s * scale;
        let mut a = m.clone();
        for i in 0..n {
            a[(i, i)] -= sigma;
        }
        if let Some(schur) = Schur::try_new(a, f64::EPSILON, schur_budget(n)) {
            return Some(
                schur
                    .complex_eigenvalues()
                    .iter()
                    .map(|z| z + sigma)
                    .collect(),
            );
        }
    }
    None
}

fn complex_eigenvalues(m: &DMatrix<Complex64>) -> Option<Vec<Complex64>> {
    let n = m.nrows();
    let scale = m.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    for s in SCHUR_SHIFTS {
        let sigma = Complex64::new(s * scale, 0.5 * s * scale);
        let mut a = m.clone();
        for i in 0..n {
            a[(i, i)] -= sigma;
        }
        if let Some(schur) = Schur::try_new(a, f64::EPSILON, schur_budget(n)) {
            let (_, t) = schur.unpack();
            return Some((0..n).map(|i| t[(i, i)] + sigma).collect());
        }
    }
    None
}

/// Simultaneous Aberth iteration; the fallback when no Schur form converges.
fn aberth(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].norm();
    let radius = 1.0 + coeffs[..n].iter().map(|c| c.norm() / lead).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * radius, 0.4 + std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulse: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulse);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn trim(coeffs: &[Complex64]) -> &[Complex64] {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut n = coeffs.len();
    while n > 0 && coeffs[n - 1].norm() <= 1e-300_f64.max(scale * 1e-15) {
        n -= 1;
    }
    &coeffs[..n]
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Newton iterations on `p(z) = 0` starting from `z`.
pub fn polish(coeffs: &[Complex64], mut z: Complex64, iters: usize) -> Complex64 {
    for _ in 0..iters {
        let (p, dp) = horner(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        let nz = z - step;
        let (np, _) = horner(coeffs, nz);
        if np.norm() >= p.norm() {
            break;
        }
        z = nz;
    }
    z
}

/// All complex roots (with multiplicity) of a polynomial with complex
/// coefficients.
pub fn complex_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let c = trim(coeffs);
    if c.len() <= 1 {
        return Vec::new();
    }
    // zero roots split off exactly
    let zeros = c.iter().take_while(|x| x.norm() == 0.0).count();
    let c = &c[zeros..];
    let n = c.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); zeros];
    if n == 0 {
        return out;
    }
    let lead = c[n];
    let comp = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let eig = complex_eigenvalues(&comp).unwrap_or_else(|| aberth(c));
    out.extend(eig.into_iter().map(|z| polish(c, z, 8)));
    out
}

/// All complex roots of a polynomial with real coefficients.
pub fn real_poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let c = trim(&c);
    if c.len() <= 1 {
        return Vec::new();
    }
    let zeros = c.iter().take_while(|x| x.norm() == 0.0).count();
    let body = &c[zeros..];
    let n = body.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); zeros];
    if n == 0 {
        return out;
    }
    let lead = body[n].re;
    let comp = DMatrix::<f64>::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -body[i].re / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eig = eigenvalues(&comp).unwrap_or_else(|| aberth(body));
    out.extend(eig.into_iter().map(|z| polish(body, z, 8)));
    out
}

/// Real roots (imaginary part below `tol` relative to `1 + |z|`).
pub fn real_roots(coeffs: &[f64], tol: f64) -> Vec<f64> {
    let mut v: Vec<f64> = real_poly_roots(coeffs)
        .into_iter()
        .filter(|z| z.im.abs() <= tol * (1.0 + z.norm()))
        .map(|z| z.re)
        .collect();
    v.sort_by(f64::total_cmp);
    v
}
