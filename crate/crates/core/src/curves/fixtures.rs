//! Built-in curves and forms.

use crate::algebra::{ratio, Monomial, Polynomial, Rat};

use super::{CurveError, CurveModel};

/// Polynomial from `(exponents, numerator, denominator)` triples.
pub fn poly_from(nvars: usize, terms: &[(&[u32], i64, i64)]) -> Polynomial<Rat> {
    Polynomial::from_terms(
        nvars,
        terms
            .iter()
            .map(|(e, p, q)| (Monomial::new(e.to_vec()), ratio(*p, *q))),
    )
}

/// Deltoid: `(x0²+x1²)² + 2x2²(x0²+x1²) − ⅓x2⁴ − ⁸⁄₃x2(x0³ − 3x0x1²)`.
pub fn deltoid_form() -> Polynomial<Rat> {
    poly_from(
        3,
        &[
            (&[4, 0, 0], 1, 1),
            (&[2, 2, 0], 2, 1),
            (&[0, 4, 0], 1, 1),
            (&[2, 0, 2], 2, 1),
            (&[0, 2, 2], 2, 1),
            (&[0, 0, 4], -1, 3),
            (&[3, 0, 1], -8, 3),
            (&[1, 2, 1], 8, 1),
        ],
    )
}

/// The three cusps of the deltoid, `[1 : ω : 1]`-type points with `x2 = 1`.
pub fn deltoid_cusps() -> Vec<Vec<f64>> {
    (0..3)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            vec![a.cos(), a.sin(), 1.0]
        })
        .collect()
}

/// Rational quartic with a real triple point at `[0:0:1]`.
pub fn quartic_triple_point_forms() -> Vec<Polynomial<Rat>> {
    vec![
        poly_from(2, &[(&[3, 1], 1, 1), (&[2, 2], -1, 1)]),
        poly_from(2, &[(&[2, 2], 1, 1), (&[1, 3], -1, 1)]),
        poly_from(2, &[(&[4, 0], 1, 1), (&[0, 4], 1, 1)]),
    ]
}

/// `x0² + x1² + x2²`, a conic without real points.
pub fn empty_conic_form() -> Polynomial<Rat> {
    poly_from(3, &[(&[2, 0, 0], 1, 1), (&[0, 2, 0], 1, 1), (&[0, 0, 2], 1, 1)])
}

/// `x0² + x1² − x2²`, a conic with real points.
pub fn real_conic_form() -> Polynomial<Rat> {
    poly_from(3, &[(&[2, 0, 0], 1, 1), (&[0, 2, 0], 1, 1), (&[0, 0, 2], -1, 1)])
}

/// `(x2² − x1² − x0²)(x0² + x1² + x2²)^(j−1)`, nonnegative on the deltoid and
/// zero exactly at its cusps.
pub fn deltoid_witness(j: u32) -> Polynomial<Rat> {
    let conic = poly_from(3, &[(&[0, 0, 2], 1, 1), (&[0, 2, 0], -1, 1), (&[2, 0, 0], -1, 1)]);
    let sphere = empty_conic_form();
    conic
        .mul(&sphere.pow(j.saturating_sub(1)))
        .expect("ternary forms")
}

/// Motzkin form `x0⁴x1² + x0²x1⁴ − 3x0²x1²x2² + x2⁶`.
pub fn motzkin_form() -> Polynomial<Rat> {
    poly_from(
        3,
        &[
            (&[4, 2, 0], 1, 1),
            (&[2, 4, 0], 1, 1),
            (&[2, 2, 2], -3, 1),
            (&[0, 0, 6], 1, 1),
        ],
    )
}

/// Names accepted by [`curve_by_name`].
pub const CURVE_NAMES: &[&str] = &["deltoid", "quartic-triple-point", "p2", "empty-conic"];

pub fn curve_by_name(name: &str) -> Result<CurveModel, CurveError> {
    match name {
        "deltoid" => CurveModel::plane(deltoid_form()),
        "quartic-triple-point" => CurveModel::param(quartic_triple_point_forms()),
        "p2" => Ok(CurveModel::ring(2)),
        "empty-conic" => CurveModel::plane(empty_conic_form()),
        _ => Err(CurveError::UnknownName(name.to_string())),
    }
}

/// Resolves `deltoid-witness:J` and `motzkin`; returns the form and its
/// half-degree `j`.
pub fn form_by_name(name: &str) -> Result<(Polynomial<Rat>, u32), CurveError> {
    if name == "motzkin" {
        return Ok((motzkin_form(), 3));
    }
    if let Some(j) = name.strip_prefix("deltoid-witness:") {
        let j: u32 = j
            .parse()
            .ok()
            .filter(|&j| j >= 1)
            .ok_or_else(|| CurveError::UnknownName(name.to_string()))?;
        return Ok((deltoid_witness(j), j));
    }
    Err(CurveError::UnknownName(name.to_string()))
}
