//! JSON forms of polynomials, curves and rationals. Rationals travel as
//! `"p/q"` strings, floats as JSON numbers.

use serde::Serializer;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{AlgebraError, AnyPoly, Monomial, Polynomial, Rat};
use crate::curves::{CurveError, CurveModel};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad rational `{0}`")]
    BadRational(String),
    #[error("unexpected shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub fn rat_to_string(r: &Rat) -> String {
    r.to_string()
}

pub fn parse_rat(s: &str) -> Result<Rat, IoError> {
    s.trim()
        .parse::<Rat>()
        .map_err(|_| IoError::BadRational(s.to_string()))
        .and_then(|r| {
            if r.denom().sign() == num_bigint::Sign::Minus {
                Err(IoError::BadRational(s.to_string()))
            } else {
                Ok(r)
            }
        })
}

pub(crate) fn ser_rat<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rat_to_string(r))
}

fn terms_json<C>(p: &Polynomial<C>, coef: impl Fn(&C) -> Value) -> Value
where
    C: crate::algebra::Coeff,
{
    // descending monomial order
    let terms: Vec<Value> = p
        .terms()
        .rev()
        .map(|(m, c)| json!({"exp": m.exponents(), "coef": coef(c)}))
        .collect();
    json!({"vars": p.nvars(), "terms": terms})
}

pub fn poly_to_json(p: &Polynomial<Rat>) -> Value {
    terms_json(p, |c| Value::String(rat_to_string(c)))
}

pub fn poly_f64_to_json(p: &Polynomial<f64>) -> Value {
    terms_json(p, |c| json!(c))
}

pub fn any_poly_to_json(p: &AnyPoly) -> Value {
    match p {
        AnyPoly::Exact(p) => poly_to_json(p),
        AnyPoly::Float(p) => poly_f64_to_json(p),
    }
}

/// Reads a polynomial; exact when every coefficient is a string, float when
/// every coefficient is a number.
pub fn poly_from_json(v: &Value) -> Result<AnyPoly, IoError> {
    let shape = |m: &str| IoError::Shape(m.to_string());
    let vars = v
        .get("vars")
        .and_then(Value::as_u64)
        .ok_or_else(|| shape("polynomial needs integer `vars`"))? as usize;
    let terms = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| shape("polynomial needs array `terms`"))?;
    let mut exact = Polynomial::<Rat>::zero(vars);
    let mut float = Polynomial::<f64>::zero(vars);
    let (mut n_exact, mut n_float) = (0, 0);
    for t in terms {
        let exp: Vec<u32> = t
            .get("exp")
            .and_then(Value::as_array)
            .ok_or_else(|| shape("term needs array `exp`"))?
            .iter()
            .map(|e| e.as_u64().map(|e| e as u32))
            .collect::<Option<_>>()
            .ok_or_else(|| shape("exponents must be nonnegative integers"))?;
        if exp.len() != vars {
            return Err(shape("exponent length differs from `vars`"));
        }
        let mono = Monomial::new(exp);
        match t.get("coef") {
            Some(Value::String(s)) => {
                exact.add_term(mono, parse_rat(s)?);
                n_exact += 1;
            }
            Some(Value::Number(x)) => {
                let x = x.as_f64().ok_or_else(|| shape("coefficient out of range"))?;
                if !x.is_finite() {
                    return Err(AlgebraError::NonFinite.into());
                }
                float.add_term(mono, x);
                n_float += 1;
            }
            _ => return Err(shape("coefficient must be a string or a number")),
        }
    }
    match (n_exact, n_float) {
        (_, 0) => Ok(AnyPoly::Exact(exact)),
        (0, _) => Ok(AnyPoly::Float(float)),
        _ => Err(AlgebraError::ModeMismatch.into()),
    }
}

/// Reads a polynomial, converting float coefficients exactly to rationals.
pub fn exact_poly_from_json(v: &Value) -> Result<Polynomial<Rat>, IoError> {
    Ok(match poly_from_json(v)? {
        AnyPoly::Exact(p) => p,
        AnyPoly::Float(p) => Polynomial::from_f64(&p)?,
    })
}

pub fn curve_to_json(model: &CurveModel) -> Value {
    match model {
        CurveModel::Plane(p) => json!({"kind": "plane", "h": poly_to_json(p.defining_form())}),
        CurveModel::Param(p) => json!({
            "kind": "param",
            "forms": p.forms().iter().map(poly_to_json).collect::<Vec<_>>(),
        }),
        CurveModel::Ring(r) => json!({"kind": "ring", "n": r.n}),
    }
}

pub fn curve_from_json(v: &Value) -> Result<CurveModel, IoError> {
    let shape = |m: &str| IoError::Shape(m.to_string());
    match v.get("kind").and_then(Value::as_str) {
        Some("plane") => {
            let h = exact_poly_from_json(v.get("h").ok_or_else(|| shape("plane curve needs `h`"))?)?;
            Ok(CurveModel::plane(h)?)
        }
        Some("param") => {
            let forms = v
                .get("forms")
                .and_then(Value::as_array)
                .ok_or_else(|| shape("param curve needs array `forms`"))?
                .iter()
                .map(exact_poly_from_json)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(CurveModel::param(forms)?)
        }
        Some("ring") => {
            let n = v
                .get("n")
                .and_then(Value::as_u64)
                .ok_or_else(|| shape("ring needs integer `n`"))?;
            Ok(CurveModel::ring(n as usize))
        }
        _ => Err(shape("`kind` must be plane, param or ring")),
    }
}

/// Rational vector as strings.
pub fn rats_to_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(|r| Value::String(rat_to_string(r))).collect())
}
