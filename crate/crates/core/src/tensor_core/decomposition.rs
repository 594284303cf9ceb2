use serde::{Deserialize, Serialize};

use super::form::{mean_curvature, Dims, SecondFundamentalForm};
use crate::error::{Error, Result};

/// Default cutoff below which `|H|` is treated as zero.
pub const DEFAULT_TOL_H: f64 = 1e-12;

/// Squared norms of the split pieces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitNorms {
    /// |A|²
    pub a2: f64,
    /// |H|²
    pub mean2: f64,
    /// |h|²
    pub h2: f64,
    /// |A⁻|²
    pub a_minus2: f64,
    /// |h̊|²
    pub h_ring2: f64,
    /// |Å|², computed from `A^α − (H^α/n) I` directly.
    pub a_ring2: f64,
}

/// Split of a form along the principal normal `ν₁ = H/|H|`:
/// `A = A⁻ + h ⊗ ν₁` with `⟨A⁻, ν₁⟩ = 0`, and `h̊ = h − (|H|/n) I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalDecomposition {
    dims: Dims,
    nu1: Vec<f64>,
    h: Vec<f64>,
    h_ring: Vec<f64>,
    a_minus: SecondFundamentalForm,
    mean_norm: f64,
    norms: SplitNorms,
}

/// Decomposes with the default `|H|` cutoff.
pub fn principal_decompose(a: &SecondFundamentalForm) -> Result<PrincipalDecomposition> {
    principal_decompose_with_tol(a, DEFAULT_TOL_H)
}

pub fn principal_decompose_with_tol(
    a: &SecondFundamentalForm,
    tol_h: f64,
) -> Result<PrincipalDecomposition> {
    let dims = a.dims();
    let (n, m) = (dims.n(), dims.m());
    let mc = mean_curvature(a);
    let norm = mc.norm();
    if !(norm > tol_h) {
        return Err(Error::DegenerateMeanCurvature { norm, tol: tol_h });
    }
    let nu1: Vec<f64> = mc.vector().iter().map(|x| x / norm).collect();

    let mut h = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] = (0..m).map(|al| a.get(al, i, j) * nu1[al]).sum();
        }
    }
    let a_minus = SecondFundamentalForm::from_fn(dims, |al, i, j| a.get(al, i, j) - h[i * n + j] * nu1[al]);
    let mut h_ring = h.clone();
    for i in 0..n {
        h_ring[i * n + i] -= norm / n as f64;
    }

    let h_vec = mc.vector();
    let mut a_ring2 = 0.0;
    for al in 0..m {
        for i in 0..n {
            for j in 0..n {
                let shift = if i == j { h_vec[al] / n as f64 } else { 0.0 };
                let v = a.get(al, i, j) - shift;
                a_ring2 += v * v;
            }
        }
    }
    let norms = SplitNorms {
        a2: a.norm2(),
        mean2: mc.norm2(),
        h2: h.iter().map(|x| x * x).sum(),
        a_minus2: a_minus.norm2(),
        h_ring2: h_ring.iter().map(|x| x * x).sum(),
        a_ring2,
    };
    Ok(PrincipalDecomposition {
        dims,
        nu1,
        h,
        h_ring,
        a_minus,
        mean_norm: norm,
        norms,
    })
}

impl PrincipalDecomposition {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Unit principal normal ν₁.
    pub fn nu1(&self) -> &[f64] {
        &self.nu1
    }

    /// `h_ij`, row-major.
    pub fn h(&self) -> &[f64] {
        &self.h
    }

    #[inline]
    pub fn h_at(&self, i: usize, j: usize) -> f64 {
        self.h[i * self.dims.n() + j]
    }

    /// `h̊_ij`, row-major.
    pub fn h_ring(&self) -> &[f64] {
        &self.h_ring
    }

    #[inline]
    pub fn h_ring_at(&self, i: usize, j: usize) -> f64 {
        self.h_ring[i * self.dims.n() + j]
    }

    pub fn a_minus(&self) -> &SecondFundamentalForm {
        &self.a_minus
    }

    /// |H|.
    pub fn mean_norm(&self) -> f64 {
        self.mean_norm
    }

    pub fn norms(&self) -> &SplitNorms {
        &self.norms
    }

    /// Rebuilds `A⁻ + h ⊗ ν₁`.
    pub fn reconstruct(&self) -> SecondFundamentalForm {
        let n = self.dims.n();
        SecondFundamentalForm::from_fn(self.dims, |al, i, j| {
            self.a_minus.get(al, i, j) + self.h[i * n + j] * self.nu1[al]
        })
    }

    /// Largest entrywise deviation between `a` and the reconstruction.
    pub fn reconstruction_error(&self, a: &SecondFundamentalForm) -> f64 {
        self.reconstruct()
            .components()
            .iter()
            .zip(a.components())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|Σ_α A⁻^α_ij ν₁^α|` over all `(i, j)`.
    pub fn a_minus_normal_leak(&self) -> f64 {
        let (n, m) = (self.dims.n(), self.dims.m());
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..m).map(|al| self.a_minus.get(al, i, j) * self.nu1[al]).sum();
                worst = worst.max(s.abs());
            }
        }
        worst
    }

    /// Vector-valued trace `Σ_i A⁻_ii`.
    pub fn a_minus_trace(&self) -> Vec<f64> {
        (0..self.dims.m()).map(|al| self.a_minus.trace(al)).collect()
    }
}
