//! Samplers of nonnegative elements shared by the integration tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sosdeg::algebra::{monomials_of_degree, Coeff, Polynomial, Rat};
use sosdeg::curves::{empty_conic_form, CurveModel};
use sosdeg::harnack::make_nonnegative_witness;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Restriction of `(x0² + x1² + x2²)^j`, positive on every real point.
pub fn sphere_power(model: &CurveModel, j: u32) -> Vec<f64> {
    let sq: Vec<f64> = model
        .restrict_in_degree(&empty_conic_form(), 2)
        .unwrap()
        .iter()
        .map(Coeff::to_f64)
        .collect();
    let mut u = vec![1.0];
    for i in 0..j {
        u = model.multiply_f64(2 * i, &u, 2, &sq).unwrap();
    }
    u
}

/// Ambient form of degree `m` with small random integer coefficients.
pub fn random_form(nvars: usize, m: u32, rng: &mut ChaCha8Rng) -> Polynomial<Rat> {
    Polynomial::from_terms(
        nvars,
        monomials_of_degree(nvars, m)
            .into_iter()
            .map(|mo| (mo, Rat::from_integer(rng.gen_range(-4i64..=4).into()))),
    )
}

fn restrict_f64(model: &CurveModel, g: &Polynomial<Rat>, m: u32) -> Vec<f64> {
    model
        .restrict_in_degree(g, m)
        .unwrap()
        .iter()
        .map(Coeff::to_f64)
        .collect()
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Minimum of `f / (x0²+x1²+x2²)^j` over a dense set of real points.
pub fn min_on_real_points(model: &CurveModel, f: &[f64], j: u32, count: usize) -> f64 {
    let u = sphere_power(model, j);
    model
        .real_samples(count)
        .iter()
        .map(|p| model.eval_element(2 * j, f, p) / model.eval_element(2 * j, &u, p))
        .fold(f64::INFINITY, f64::min)
}

/// `h − c·(x0²+x1²+x2²)^j` for a random `h ∈ R_{2j}`, with `c` placed 5% of
/// the sampled range of `h/(x0²+x1²+x2²)^j` below its sampled minimum. These
/// are usually not sums of squares in degree `2j`. Panics unless the result is
/// positive on a four times denser sample.
pub fn shifted_pos(model: &CurveModel, j: u32, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let n = model.hilbert_function(2 * j);
    let h: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
    let u = sphere_power(model, j);
    let ratios: Vec<f64> = model
        .real_samples(4000)
        .iter()
        .map(|p| model.eval_element(2 * j, &h, p) / model.eval_element(2 * j, &u, p))
        .collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let c = lo - 0.05 * (hi - lo);
    let f: Vec<f64> = h.iter().zip(&u).map(|(a, b)| a - c * b).collect();
    assert!(min_on_real_points(model, &f, j, 16000) > 0.0, "seed {seed}: not positive");
    f
}

/// A witness vanishing at `j` real points of the model plus two squares of
/// random ambient forms of degree `j`, scaled to unit sup norm.
pub fn witness_plus_squares(model: &CurveModel, j: u32, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let pts = model.real_samples(97);
    let chosen: Vec<Vec<f64>> = (0..j)
        .map(|i| pts[(r.gen_range(0..97) + 31 * i as usize) % pts.len()].clone())
        .collect();
    let w: Vec<f64> = make_nonnegative_witness(model, &chosen, j)
        .unwrap()
        .coords
        .iter()
        .map(Coeff::to_f64)
        .collect();
    let wn = sup_norm(&w);
    let mut f: Vec<f64> = w.iter().map(|x| x / wn).collect();
    for _ in 0..2 {
        let g = restrict_f64(model, &random_form(model.ambient_vars(), j, &mut r), j);
        let g2 = model.multiply_f64(j, &g, j, &g).unwrap();
        let gn = sup_norm(&g2);
        for (a, b) in f.iter_mut().zip(&g2) {
            *a += b / gn;
        }
    }
    f
}
