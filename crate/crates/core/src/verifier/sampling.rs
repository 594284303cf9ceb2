//! Seeded samplers for forms, gradient tensors and matrix families.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor_core::{Dims, GradientSample, SecondFundamentalForm};

/// Distribution of sampled second fundamental forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    /// Independent `N(0, σ²)` entries.
    Gaussian { sigma: f64 },
    /// `|A|² = c|H|² − d` after rescaling the mean curvature.
    Boundary { c: f64, d: f64 },
    /// `f = c|H|² − |A|² − d > 0`.
    Pinched { c: f64, d: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub dims: Dims,
    pub distribution: Distribution,
    pub seed: u64,
}

/// Generator for trial `trial`: the seed fixes the key, the trial index the stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(trial);
    r
}

fn normal(r: &mut ChaCha8Rng) -> f64 {
    r.sample(StandardNormal)
}

fn normals(r: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| normal(r)).collect()
}

pub fn gaussian_form(r: &mut ChaCha8Rng, dims: Dims, sigma: f64) -> SecondFundamentalForm {
    SecondFundamentalForm::from_fn(dims, |_, _, _| sigma * normal(r))
}

/// Traceless Gaussian form with log-normal per-slot scales, so that the
/// principal and orthogonal parts vary in relative size.
fn traceless_form(r: &mut ChaCha8Rng, dims: Dims) -> SecondFundamentalForm {
    let scales: Vec<f64> = (0..dims.m()).map(|_| normal(r).exp()).collect();
    let b = SecondFundamentalForm::from_fn(dims, |a, _, _| scales[a] * normal(r));
    let n = dims.n() as f64;
    let tr: Vec<f64> = (0..dims.m()).map(|a| b.trace(a) / n).collect();
    SecondFundamentalForm::from_fn(dims, |a, i, j| b.get(a, i, j) - if i == j { tr[a] } else { 0.0 })
}

fn unit_vector(r: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    loop {
        let v = normals(r, m);
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-8 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}

/// `Å + (t/n) ν ⊗ I`, so that `H = t ν`.
fn with_mean(ring: &SecondFundamentalForm, nu: &[f64], t: f64) -> SecondFundamentalForm {
    let n = ring.dims().n() as f64;
    SecondFundamentalForm::from_fn(ring.dims(), |a, i, j| {
        ring.get(a, i, j) + if i == j { t * nu[a] / n } else { 0.0 }
    })
}

fn check_pinching_constants(dims: Dims, c: f64, d: f64) -> Result<()> {
    if !(c > 1.0 / dims.n() as f64) || !c.is_finite() || !d.is_finite() {
        return Err(Error::InvalidConstants(format!("sampler needs c > 1/n and finite d, got c = {c}, d = {d}")));
    }
    Ok(())
}

/// Form on the boundary `|A|² = c|H|² − d`: fixes a traceless part and sets
/// `|H|² = (|Å|² + d)/(c − 1/n)`. Requires `|Å|² + d > 0`, redrawn otherwise.
pub fn boundary_form(r: &mut ChaCha8Rng, dims: Dims, c: f64, d: f64) -> Result<SecondFundamentalForm> {
    check_pinching_constants(dims, c, d)?;
    let e = c - 1.0 / dims.n() as f64;
    for _ in 0..1000 {
        let ring = traceless_form(r, dims);
        let nu = unit_vector(r, dims.m());
        let num = ring.norm2() + d;
        if num > 0.0 {
            return Ok(with_mean(&ring, &nu, (num / e).sqrt()));
        }
    }
    Err(Error::InvalidSample("boundary sampler found no admissible traceless part".into()))
}

/// Strictly pinched form: `|H|² = (1 + u)(|Å|² + d)/(c − 1/n)` with `u`
/// log-uniform on `[1e−4, 10]`, so `f = u(|Å|² + d) > 0`.
pub fn pinched_form(r: &mut ChaCha8Rng, dims: Dims, c: f64, d: f64) -> Result<SecondFundamentalForm> {
    check_pinching_constants(dims, c, d)?;
    let e = c - 1.0 / dims.n() as f64;
    for _ in 0..1000 {
        let ring = traceless_form(r, dims);
        let nu = unit_vector(r, dims.m());
        let u = 10f64.powf(r.random_range(-4.0..1.0));
        let num = ring.norm2() + d;
        if num > 0.0 {
            return Ok(with_mean(&ring, &nu, ((1.0 + u) * num / e).sqrt()));
        }
    }
    Err(Error::InvalidSample("pinched sampler found no admissible traceless part".into()))
}

pub fn sample_form(r: &mut ChaCha8Rng, dims: Dims, dist: Distribution) -> Result<SecondFundamentalForm> {
    match dist {
        Distribution::Gaussian { sigma } => Ok(gaussian_form(r, dims, sigma)),
        Distribution::Boundary { c, d } => boundary_form(r, dims, c, d),
        Distribution::Pinched { c, d } => pinched_form(r, dims, c, d),
    }
}

/// Fully symmetric Gaussian 3-tensor per normal slot.
pub fn symmetric_gradient(r: &mut ChaCha8Rng, dims: Dims) -> GradientSample {
    let n = dims.n();
    let raw = normals(r, dims.m() * n * n * n);
    GradientSample::symmetrized(dims, &raw).expect("length matches dims")
}

/// Codazzi-symmetric gradient sample. Mixes a symmetric Gaussian tensor with
/// pure-trace tensors whose mean-curvature gradient is generic, tangent to
/// `nu1` or orthogonal to it.
pub fn codazzi_gradient(r: &mut ChaCha8Rng, dims: Dims, nu1: &[f64]) -> GradientSample {
    let (n, m) = (dims.n(), dims.m());
    let s = symmetric_gradient(r, dims);
    let kind = r.random_range(0..4u8);
    if kind == 0 {
        return s;
    }
    let mut g = normals(r, n * m);
    for i in 0..n {
        let row = &mut g[i * m..(i + 1) * m];
        let along: f64 = row.iter().zip(nu1).map(|(x, y)| x * y).sum();
        for (x, y) in row.iter_mut().zip(nu1) {
            match kind {
                2 => *x -= along * y,
                3 => *x = along * y,
                _ => {}
            }
        }
    }
    let e = GradientSample::trace_tensor(dims, &g, &vec![0.0; n * m]).expect("shapes match");
    let weight = if kind == 1 { 0.1 } else { 1.0 };
    e.add(&s.scaled(weight)).expect("same dims")
}

/// `D(w)_ijk = (w_j δ_ik + w_k δ_ij)/(n − 1)`: symmetric in `(j, k)` with
/// trace defect exactly `w`.
pub fn defect_tensor(dims: Dims, w: &[f64]) -> Result<GradientSample> {
    let (n, m) = (dims.n(), dims.m());
    if w.len() != n * m {
        return Err(Error::ShapeMismatch { expected: n * m, got: w.len() });
    }
    let s = 1.0 / (n as f64 - 1.0);
    Ok(GradientSample::from_fn(dims, |a, i, j, k| {
        s * (w[j * m + a] * f64::from(u8::from(i == k)) + w[k * m + a] * f64::from(u8::from(i == j)))
    }))
}

/// Gradient with a prescribed trace defect: `S + D(w)` for a symmetric
/// Gaussian `S` and Gaussian `w`, or (one draw in four) the trace tensor
/// `E(g, w)` alone.
pub fn kato_gradient(r: &mut ChaCha8Rng, dims: Dims) -> (GradientSample, Vec<f64>) {
    let len = dims.n() * dims.m();
    let w = normals(r, len);
    if r.random_range(0..4u8) == 0 {
        let g = normals(r, len);
        let t = GradientSample::trace_tensor(dims, &g, &w).expect("shapes match");
        return (t, w);
    }
    let s = symmetric_gradient(r, dims);
    let t = s.add(&defect_tensor(dims, &w).expect("shapes match")).expect("same dims");
    (t, w)
}
