use serde::{Deserialize, Serialize};

use super::decomposition::PrincipalDecomposition;
use super::form::{Dims, SecondFundamentalForm};
use super::kron;

/// Normal curvature of a flat-background immersion point,
/// `R⊥_ijαβ = Σ_p (A^α_ip A^β_jp − A^β_ip A^α_jp)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalCurvature {
    dims: Dims,
    /// Index `((i * n + j) * m + α) * m + β`.
    components: Vec<f64>,
    /// `R⊥_ij(ν₁)_β = Σ_α R⊥_ijαβ ν₁^α`, index `(i * n + j) * m + β`.
    principal_slice: Vec<f64>,
    full_norm2: f64,
    principal_norm2: f64,
    hat_part_norm2: f64,
}

impl NormalCurvature {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn get(&self, i: usize, j: usize, alpha: usize, beta: usize) -> f64 {
        let (n, m) = (self.dims.n(), self.dims.m());
        self.components[((i * n + j) * m + alpha) * m + beta]
    }

    pub fn principal_slice(&self) -> &[f64] {
        &self.principal_slice
    }

    /// Σ_ijαβ (R⊥_ijαβ)².
    pub fn full_norm2(&self) -> f64 {
        self.full_norm2
    }

    /// Σ_ij |R⊥_ij(ν₁)|².
    pub fn principal_norm2(&self) -> f64 {
        self.principal_norm2
    }

    /// |R̂⊥|²: both normal slots projected orthogonally to ν₁.
    pub fn hat_part_norm2(&self) -> f64 {
        self.hat_part_norm2
    }

    /// `2|R⊥|² − 2Σ|R(ν₁)|² − (2|R̂⊥|² + 2Σ|R(ν₁)|²)`; zero up to rounding.
    pub fn split_residual(&self) -> f64 {
        2.0 * self.full_norm2 - 2.0 * self.principal_norm2
            - (2.0 * self.hat_part_norm2 + 2.0 * self.principal_norm2)
    }

    /// `Σ|R⊥_ij(ν₁)|² − Σ|h̊_ip A⁻_jp − h̊_jp A⁻_ip|²`; zero up to rounding.
    pub fn principal_identity_residual(&self, decomp: &PrincipalDecomposition) -> f64 {
        let (n, m) = (self.dims.n(), self.dims.m());
        let am = decomp.a_minus();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                for b in 0..m {
                    let v: f64 = (0..n)
                        .map(|p| decomp.h_ring_at(i, p) * am.get(b, j, p) - decomp.h_ring_at(j, p) * am.get(b, i, p))
                        .sum();
                    s += v * v;
                }
            }
        }
        self.principal_norm2 - s
    }
}

/// Flat-background normal curvature with its principal split.
pub fn normal_curvature(a: &SecondFundamentalForm, decomp: &PrincipalDecomposition) -> NormalCurvature {
    let dims = a.dims();
    let (n, m) = (dims.n(), dims.m());
    let nu = decomp.nu1();

    let mut components = vec![0.0; n * n * m * m];
    for i in 0..n {
        for j in 0..n {
            for al in 0..m {
                for be in 0..m {
                    let v: f64 = (0..n)
                        .map(|p| a.get(al, i, p) * a.get(be, j, p) - a.get(be, i, p) * a.get(al, j, p))
                        .sum();
                    components[((i * n + j) * m + al) * m + be] = v;
                }
            }
        }
    }

    let mut principal_slice = vec![0.0; n * n * m];
    let mut hat_part_norm2 = 0.0;
    let mut block = vec![0.0; m * m];
    let mut tmp = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let base = (i * n + j) * m * m;
            block.copy_from_slice(&components[base..base + m * m]);
            for be in 0..m {
                principal_slice[(i * n + j) * m + be] = (0..m).map(|al| block[al * m + be] * nu[al]).sum();
            }
            // P R P with P = I − ν₁ν₁ᵀ.
            for al in 0..m {
                for be in 0..m {
                    tmp[al * m + be] = (0..m)
                        .map(|g| (kron(al, g) - nu[al] * nu[g]) * block[g * m + be])
                        .sum();
                }
            }
            for al in 0..m {
                for be in 0..m {
                    let v: f64 = (0..m)
                        .map(|g| tmp[al * m + g] * (kron(g, be) - nu[g] * nu[be]))
                        .sum();
                    hat_part_norm2 += v * v;
                }
            }
        }
    }
    let full_norm2 = components.iter().map(|x| x * x).sum();
    let principal_norm2 = principal_slice.iter().map(|x| x * x).sum();
    NormalCurvature {
        dims,
        components,
        principal_slice,
        full_norm2,
        principal_norm2,
        hat_part_norm2,
    }
}

/// Σ_αβ |[A^α, A^β]|² computed from matrix products; equals the full
/// normal-curvature norm for symmetric slots.
pub fn commutator_norm2(a: &SecondFundamentalForm) -> f64 {
    let dims = a.dims();
    let (n, m) = (dims.n(), dims.m());
    let mut s = 0.0;
    for al in 0..m {
        for be in 0..m {
            if al == be {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    let v: f64 = (0..n)
                        .map(|p| a.get(al, i, p) * a.get(be, p, j) - a.get(be, i, p) * a.get(al, p, j))
                        .sum();
                    s += v * v;
                }
            }
        }
    }
    s
}
