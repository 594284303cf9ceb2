#![allow(dead_code)]

use pinchflow::tensor_core::{Dims, GradientSample, SecondFundamentalForm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dims(n: usize, m: usize) -> Dims {
    Dims::new(n, m).unwrap()
}

pub fn random_form(r: &mut ChaCha8Rng, d: Dims) -> SecondFundamentalForm {
    SecondFundamentalForm::from_fn(d, |_, _, _| r.sample::<f64, _>(StandardNormal))
}

pub fn random_symmetric_grad(r: &mut ChaCha8Rng, d: Dims) -> GradientSample {
    let n = d.n();
    let raw: Vec<f64> = (0..d.m() * n * n * n).map(|_| r.sample(StandardNormal)).collect();
    GradientSample::symmetrized(d, &raw).unwrap()
}

/// Round sphere of radius `r` in slot 0.
pub fn sphere(n: usize, m: usize, r: f64) -> SecondFundamentalForm {
    SecondFundamentalForm::from_fn(dims(n, m), |a, i, j| if a == 0 && i == j { 1.0 / r } else { 0.0 })
}

/// S^p(a) × S^q(b) in slots 0 and 1.
pub fn product(p: usize, q: usize, a: f64, b: f64) -> SecondFundamentalForm {
    SecondFundamentalForm::from_fn(dims(p + q, 2), |s, i, j| match (s, i == j) {
        (0, true) if i < p => 1.0 / a,
        (1, true) if i >= p => 1.0 / b,
        _ => 0.0,
    })
}

pub fn rel_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
}
