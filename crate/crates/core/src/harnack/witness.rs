//! Nonnegative elements vanishing at prescribed real points: products of
//! quadrics `Σ (x_l − q_l x_c)² − ε x_c²`, one ball per point, each ball
//! touching the curve only at its point.

use num_traits::Zero;

use crate::algebra::{monomials_of_degree, rank_and_nullspace, Coeff, Polynomial, Rat};
use crate::curves::CurveModel;

use super::HarnackError;

const SAMPLES: usize = 4000;
const ON_CURVE_TOL: f64 = 1e-9;
const GRADIENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub j: u32,
    /// Ambient form of degree `2j`.
    pub form: Polynomial<Rat>,
    /// Its image in `R_{2j}`.
    pub coords: Vec<Rat>,
    /// Index of the coordinate set to 1 for the affine chart.
    pub chart: usize,
    /// Ball centers `q_i` (chart coordinate included, equal to 1).
    pub centers: Vec<Vec<f64>>,
    /// Squared radii `ε_i`.
    pub radii_sq: Vec<f64>,
}

/// How far a real point is from lying on the model, relative to the size of
/// the equations. Parametrized models use their implicit equations up to
/// degree `min(d, 4)`.
pub fn on_curve_residual(model: &CurveModel, p: &[f64]) -> f64 {
    let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return f64::INFINITY;
    }
    let unit: Vec<f64> = p.iter().map(|x| x / norm).collect();
    match model {
        CurveModel::Ring(_) => 0.0,
        CurveModel::Plane(pl) => {
            let h = pl.defining_form().to_f64();
            h.eval_f64(&unit).abs() / h.max_abs_coeff()
        }
        CurveModel::Param(pm) => {
            let top = pm.form_degree().min(4);
            let mut worst: f64 = 0.0;
            for m in 1..=top {
                for eq in implicit_equations(model, m) {
                    let scale: f64 = eq.terms().map(|(_, c)| c.abs()).sum();
                    worst = worst.max(eq.eval_f64(&unit).abs() / scale);
                }
            }
            worst
        }
    }
}

/// A basis of the degree-`m` forms vanishing on the model, as float
/// polynomials.
pub fn implicit_equations(model: &CurveModel, m: u32) -> Vec<Polynomial<f64>> {
    let monos = monomials_of_degree(model.ambient_vars(), m);
    let hf = model.hilbert_function(m);
    // column per ambient monomial: its coordinates in R_m
    let cols: Vec<std::sync::Arc<Vec<Rat>>> = monos.iter().map(|b| model.monomial_coords(b)).collect();
    let rows: Vec<Vec<Rat>> = (0..hf)
        .map(|r| cols.iter().map(|c| c[r].clone()).collect())
        .collect();
    let ns = rank_and_nullspace(&rows, monos.len());
    ns.nullspace
        .vectors
        .iter()
        .map(|v| {
            Polynomial::from_terms(
                model.ambient_vars(),
                monos
                    .iter()
                    .cloned()
                    .zip(v.iter().map(|c| c.to_f64()))
                    .filter(|(_, c)| *c != 0.0),
            )
        })
        .collect()
}

/// Deterministic unit directions in `R^k`.
fn directions(k: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..k {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; k];
            v[i] = s;
            out.push(v);
        }
    }
    if k == 2 {
        for a in 0..72 {
            let th = std::f64::consts::PI * 2.0 * a as f64 / 72.0;
            out.push(vec![th.cos(), th.sin()]);
        }
    } else {
        let golden = 0.618_033_988_749_895_f64;
        for i in 1..=96u32 {
            let v: Vec<f64> = (0..k)
                .map(|c| {
                    let u = ((i as f64) * golden * (c as f64 + 1.0).sqrt()).fract();
                    (std::f64::consts::PI * (u - 0.5)).tan()
                })
                .collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 0.0 && n.is_finite() {
                out.push(v.iter().map(|x| x / n).collect());
            }
        }
    }
    out
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Affine coordinates in the chart `x_c = 1`, chart coordinate dropped.
fn affine(p: &[f64], c: usize) -> Vec<f64> {
    p.iter()
        .enumerate()
        .filter(|(l, _)| *l != c)
        .map(|(_, x)| x / p[c])
        .collect()
}

/// Nearest dyadic rational with denominator `2^24`.
fn dyadic(x: f64) -> Rat {
    let scaled = (x * (1u64 << 24) as f64).round();
    Rat::new(
        num_bigint::BigInt::from(scaled as i64),
        num_bigint::BigInt::from(1u64 << 24),
    )
}

/// An element of `R_{2j}` that is nonnegative on the real points of the
/// model and vanishes at the `j` given points, each with nonzero gradient.
pub fn make_nonnegative_witness(
    model: &CurveModel,
    points: &[Vec<f64>],
    j: u32,
) -> Result<Witness, HarnackError> {
    let nv = model.ambient_vars();
    if points.len() != j as usize {
        return Err(HarnackError::PointCount {
            expected: j as usize,
            got: points.len(),
        });
    }
    for (index, p) in points.iter().enumerate() {
        let residual = if p.len() == nv {
            on_curve_residual(model, p)
        } else {
            f64::INFINITY
        };
        if residual > ON_CURVE_TOL {
            return Err(HarnackError::OffCurve { index, residual });
        }
    }
    if j == 0 {
        let form = Polynomial::constant(nv, Rat::from_integer(1.into()));
        return Ok(Witness {
            j,
            coords: model.restrict(&form)?,
            form,
            chart: 0,
            centers: Vec::new(),
            radii_sq: Vec::new(),
        });
    }
    // chart where every point is far from infinity
    let rel = |p: &Vec<f64>, c: usize| p[c].abs() / p.iter().map(|x| x * x).sum::<f64>().sqrt();
    let chart = (0..nv)
        .max_by(|&a, &b| {
            let ma = points.iter().map(|p| rel(p, a)).fold(f64::INFINITY, f64::min);
            let mb = points.iter().map(|p| rel(p, b)).fold(f64::INFINITY, f64::min);
            ma.total_cmp(&mb)
        })
        .unwrap();
    if let Some(index) = points.iter().position(|p| rel(p, chart) < 1e-6) {
        return Err(HarnackError::NoChart { index });
    }
    let targets: Vec<Vec<f64>> = points.iter().map(|p| affine(p, chart)).collect();
    let samples: Vec<Vec<f64>> = model
        .real_samples(SAMPLES)
        .iter()
        .filter(|y| y[chart].abs() > 1e-9)
        .map(|y| affine(y, chart))
        .collect();
    let dirs = directions(nv - 1);

    let mut centers = Vec::new();
    let mut radii_sq = Vec::new();
    let mut form = Polynomial::constant(nv, Rat::from_integer(1.into()));
    for (index, a) in targets.iter().enumerate() {
        let scale = 1.0 + a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let others: Vec<&Vec<f64>> = samples
            .iter()
            .filter(|y| dist2(y, a).sqrt() > 1e-7 * scale)
            .chain(targets.iter().enumerate().filter(|(k, _)| *k != index).map(|(_, t)| t))
            .collect();
        let mut chosen = None;
        'radii: for step in 0..24 {
            let rho = scale * 0.5f64.powi(step);
            let mut best: Option<(f64, &Vec<f64>)> = None;
            for v in &dirs {
                let q: Vec<f64> = a.iter().zip(v).map(|(x, y)| x + rho * y).collect();
                let margin = others
                    .iter()
                    .map(|y| (dist2(y, &q) - rho * rho) / dist2(y, a))
                    .fold(f64::INFINITY, f64::min);
                if best.is_none_or(|(m, _)| margin > m) {
                    best = Some((margin, v));
                }
            }
            if let Some((margin, v)) = best {
                if margin >= 1e-2 {
                    chosen = Some(a.iter().zip(v).map(|(x, y)| x + rho * y).collect::<Vec<f64>>());
                    break 'radii;
                }
            }
        }
        let q = chosen.ok_or(HarnackError::NoIsolation { index })?;
        let q_exact: Vec<Rat> = q.iter().map(|&x| dyadic(x)).collect();
        let q_f: Vec<f64> = q_exact.iter().map(Coeff::to_f64).collect();
        let eps = Rat::from_float(dist2(a, &q_f)).expect("finite");
        // Σ_{l≠c} (x_l − q_l x_c)² − ε x_c²
        let xc = Polynomial::var(nv, chart);
        let mut h = xc.mul(&xc)?.scale(&-eps.clone());
        for (k, l) in (0..nv).filter(|&l| l != chart).enumerate() {
            let lin = Polynomial::var(nv, l).sub(&xc.scale(&q_exact[k]))?;
            h = h.add(&lin.mul(&lin)?)?;
        }
        form = form.mul(&h)?;
        let mut full = q_f.clone();
        full.insert(chart, 1.0);
        centers.push(full);
        radii_sq.push(eps.to_f64());
    }

    // each point is a simple zero of the lift
    let coef = form.max_abs_coeff();
    for (index, p) in points.iter().enumerate() {
        let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        let unit: Vec<f64> = p.iter().map(|x| x / n).collect();
        let grad = (0..nv)
            .map(|l| form.derivative(l).eval_f64(&unit).powi(2))
            .sum::<f64>()
            .sqrt();
        if grad < GRADIENT_TOL * coef {
            return Err(HarnackError::FlatWitness {
                index,
                gradient: grad / coef,
            });
        }
    }
    let coords = model.restrict_in_degree(&form, 2 * j)?;
    debug_assert!(coords.iter().any(|c| !c.is_zero()));
    Ok(Witness {
        j,
        form,
        coords,
        chart,
        centers,
        radii_sq,
    })
}
