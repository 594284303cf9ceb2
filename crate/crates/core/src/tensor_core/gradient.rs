use serde::{Deserialize, Serialize};

use super::decomposition::PrincipalDecomposition;
use super::form::Dims;
use super::kron;
use crate::error::{Error, Result};

/// Sample of `∇⊥A` at a point: `T^α_ijk` models `∇⊥_i A^α_jk`.
///
/// Storage index is `((α * n + i) * n + j) * n + k`. The tensor is always
/// symmetric in `(j, k)`; full symmetry in `(i, j, k)` is the flat-background
/// Codazzi condition and is checked separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientSample {
    dims: Dims,
    t: Vec<f64>,
}

impl GradientSample {
    pub fn new(dims: Dims, t: Vec<f64>) -> Result<Self> {
        let (n, m) = (dims.n(), dims.m());
        if t.len() != m * n * n * n {
            return Err(Error::ShapeMismatch {
                expected: m * n * n * n,
                got: t.len(),
            });
        }
        for a in 0..m {
            for i in 0..n {
                for j in 0..n {
                    for k in (j + 1)..n {
                        if t[((a * n + i) * n + j) * n + k] != t[((a * n + i) * n + k) * n + j] {
                            return Err(Error::InvalidSample(format!(
                                "slot {a}: T_{i}{j}{k} is not symmetric in its last two indices"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self { dims, t })
    }

    pub fn zeros(dims: Dims) -> Self {
        let n = dims.n();
        Self {
            dims,
            t: vec![0.0; dims.m() * n * n * n],
        }
    }

    /// Evaluates `f(α, i, j, k)` on `j <= k` and mirrors in `(j, k)`.
    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let (n, m) = (dims.n(), dims.m());
        let mut t = vec![0.0; m * n * n * n];
        for a in 0..m {
            for i in 0..n {
                for j in 0..n {
                    for k in j..n {
                        let v = f(a, i, j, k);
                        t[((a * n + i) * n + j) * n + k] = v;
                        t[((a * n + i) * n + k) * n + j] = v;
                    }
                }
            }
        }
        Self { dims, t }
    }

    /// Averages `raw` (same layout) over all permutations of `(i, j, k)`.
    pub fn symmetrized(dims: Dims, raw: &[f64]) -> Result<Self> {
        let (n, m) = (dims.n(), dims.m());
        if raw.len() != m * n * n * n {
            return Err(Error::ShapeMismatch {
                expected: m * n * n * n,
                got: raw.len(),
            });
        }
        let at = |a: usize, i: usize, j: usize, k: usize| raw[((a * n + i) * n + j) * n + k];
        // Sort the index triple so every permutation evaluates identical sums.
        Ok(Self::from_fn(dims, |a, i, j, k| {
            let mut idx = [i, j, k];
            idx.sort_unstable();
            let [p, q, r] = idx;
            (at(a, p, q, r) + at(a, p, r, q) + at(a, q, p, r) + at(a, q, r, p) + at(a, r, p, q) + at(a, r, q, p))
                / 6.0
        }))
    }

    /// Trace tensor built from a mean-curvature gradient `g` and a trace
    /// defect `w` (both laid out as `i * m + α`):
    /// `(g_i δ_jk + g_j δ_ik + g_k δ_ij)/(n+2)
    ///  − 2 w_i δ_jk /((n+2)(n−1)) + n (w_j δ_ik + w_k δ_ij)/((n+2)(n−1))`.
    pub fn trace_tensor(dims: Dims, g: &[f64], w: &[f64]) -> Result<Self> {
        let (n, m) = (dims.n(), dims.m());
        if g.len() != n * m || w.len() != n * m {
            return Err(Error::ShapeMismatch {
                expected: n * m,
                got: g.len().min(w.len()),
            });
        }
        let nf = n as f64;
        let c0 = 1.0 / (nf + 2.0);
        let c1 = -2.0 / ((nf + 2.0) * (nf - 1.0));
        let c2 = nf / ((nf + 2.0) * (nf - 1.0));
        Ok(Self::from_fn(dims, |a, i, j, k| {
            let gi = g[i * m + a];
            let gj = g[j * m + a];
            let gk = g[k * m + a];
            let (wi, wj, wk) = (w[i * m + a], w[j * m + a], w[k * m + a]);
            c0 * (gi * kron(j, k) + gj * kron(i, k) + gk * kron(i, j))
                + c1 * wi * kron(j, k)
                + c2 * (wj * kron(i, k) + wk * kron(i, j))
        }))
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    #[inline]
    pub fn get(&self, alpha: usize, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dims.n();
        self.t[((alpha * n + i) * n + j) * n + k]
    }

    pub fn components(&self) -> &[f64] {
        &self.t
    }

    /// |∇⊥A|² = Σ (T^α_ijk)².
    pub fn norm2(&self) -> f64 {
        self.t.iter().map(|x| x * x).sum()
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            dims: self.dims,
            t: self.t.iter().map(|x| x * lambda).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch {
                expected: self.t.len(),
                got: other.t.len(),
            });
        }
        Ok(Self {
            dims: self.dims,
            t: self.t.iter().zip(&other.t).map(|(x, y)| x + y).collect(),
        })
    }

    /// Largest `|T_ijk − T_jik|`; zero exactly when the Codazzi symmetry holds.
    pub fn codazzi_defect(&self) -> f64 {
        let (n, m) = (self.dims.n(), self.dims.m());
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for i in 0..n {
                for j in (i + 1)..n {
                    for k in 0..n {
                        worst = worst.max((self.get(a, i, j, k) - self.get(a, j, i, k)).abs());
                    }
                }
            }
        }
        worst
    }

    /// `∇_i H^α = Σ_k T^α_ikk`, laid out as `i * m + α`.
    pub fn mean_curvature_gradient(&self) -> Vec<f64> {
        let (n, m) = (self.dims.n(), self.dims.m());
        let mut g = vec![0.0; n * m];
        for i in 0..n {
            for a in 0..m {
                g[i * m + a] = (0..n).map(|k| self.get(a, i, k, k)).sum();
            }
        }
        g
    }

    /// Trace defect `w_k = Σ_j T_jjk − Σ_j T_kjj`, laid out as `k * m + α`.
    pub fn trace_defect(&self) -> Vec<f64> {
        let (n, m) = (self.dims.n(), self.dims.m());
        let mut w = vec![0.0; n * m];
        for k in 0..n {
            for a in 0..m {
                w[k * m + a] = (0..n).map(|j| self.get(a, j, j, k) - self.get(a, k, j, j)).sum();
            }
        }
        w
    }
}

/// Squared norms of the gradient pieces used by the gradient inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientNorms {
    /// |∇⊥A|²
    pub grad_a2: f64,
    /// |∇⊥H|²
    pub grad_mean2: f64,
    /// |∇|H||²
    pub grad_abs_mean2: f64,
    /// |∇⊥ν₁|²
    pub nu1_grad2: f64,
    /// |∇h|²
    pub h_grad2: f64,
    /// |∇⊥A⁻|²
    pub a_minus_grad2: f64,
    /// |∇̂⊥A⁻|²
    pub a_minus_grad_hat2: f64,
    /// |⟨∇⊥A⁻, ν₁⟩|²
    pub a_minus_grad_nu1_2: f64,
    /// |⟨∇⊥Å, ν₁⟩|²
    pub a_ring_grad_nu1_2: f64,
    /// Σ|∇̂⊥A⁻ + h ∇⊥ν₁|²
    pub perp_sym2: f64,
    /// Σ|∇̂⊥A⁻ + h̊ ∇⊥ν₁|²
    pub perp_sym_ring2: f64,
    /// Σ|⟨∇⊥A⁻, ν₁⟩ + ∇h|²
    pub nu1_sym2: f64,
    /// Σ_ijk Q_ijk ⟨A⁻_ij, ∇⊥_k ν₁⟩
    pub q_pairing: f64,
}

/// Gradient sample split along the principal normal.
///
/// Layouts: vectors over `(i, α)` use `i * m + α`; scalar 3-tensors use
/// `(i * n + j) * n + k` with the derivative index first; normal-valued
/// 3-tensors use `((α * n + i) * n + j) * n + k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientSplit {
    dims: Dims,
    /// ∇_i H^α.
    pub grad_mean: Vec<f64>,
    /// ∇_i |H|.
    pub grad_abs_mean: Vec<f64>,
    /// ∇⊥_i ν₁^α.
    pub nu1_grad: Vec<f64>,
    /// ∇_i h_jk.
    pub h_grad: Vec<f64>,
    /// ∇⊥_i A⁻^α_jk.
    pub a_minus_grad: Vec<f64>,
    /// ⟨∇⊥_i A⁻_jk, ν₁⟩.
    pub a_minus_grad_nu1: Vec<f64>,
    /// ∇̂⊥_i A⁻^α_jk (orthogonal projection of ∇⊥A⁻).
    pub a_minus_grad_hat: Vec<f64>,
    /// ⟨∇⊥_i Å_jk, ν₁⟩.
    pub a_ring_grad_nu1: Vec<f64>,
    /// Q_ijk with derivative index last, stored at `(i * n + j) * n + k`.
    pub q: Vec<f64>,
    pub norms: GradientNorms,
}

impl GradientSplit {
    pub fn dims(&self) -> Dims {
        self.dims
    }
}

/// Codazzi tolerance for [`split_gradient`], relative to `max(1, max|T|)`.
pub const CODAZZI_TOL: f64 = 1e-9;

/// Splits `∇⊥A` along `ν₁`:
/// `∇_i ν₁ = P(∇_i H)/|H|`, `∇_i|H| = ⟨∇_i H, ν₁⟩`,
/// `∇_i h_jk = ⟨T_ijk, ν₁⟩ + ⟨A_jk, ∇_i ν₁⟩`, `∇A⁻ = T − ∇h ν₁ − h ∇ν₁`.
pub fn split_gradient(decomp: &PrincipalDecomposition, grad: &GradientSample) -> Result<GradientSplit> {
    let dims = decomp.dims();
    if grad.dims() != dims {
        return Err(Error::InvalidSample("gradient dimensions differ from the form".into()));
    }
    let (n, m) = (dims.n(), dims.m());
    let scale = grad.components().iter().fold(1.0f64, |s, x| s.max(x.abs()));
    let defect = grad.codazzi_defect();
    if defect > CODAZZI_TOL * scale {
        return Err(Error::InvalidSample(format!("Codazzi symmetry defect {defect:e}")));
    }
    let nu = decomp.nu1();
    let mean = decomp.mean_norm();
    let am = decomp.a_minus();
    let nf = n as f64;
    let t3 = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let t4 = |a: usize, i: usize, j: usize, k: usize| ((a * n + i) * n + j) * n + k;

    let grad_mean = grad.mean_curvature_gradient();
    let mut grad_abs_mean = vec![0.0; n];
    let mut nu1_grad = vec![0.0; n * m];
    for i in 0..n {
        let along: f64 = (0..m).map(|a| grad_mean[i * m + a] * nu[a]).sum();
        grad_abs_mean[i] = along;
        for a in 0..m {
            nu1_grad[i * m + a] = (grad_mean[i * m + a] - along * nu[a]) / mean;
        }
    }

    // A_jk = A⁻_jk + h_jk ν₁, and ν₁ ⟂ ∇ν₁, so ⟨A_jk, ∇_i ν₁⟩ = ⟨A⁻_jk, ∇_i ν₁⟩.
    let mut h_grad = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let tn: f64 = (0..m).map(|a| grad.get(a, i, j, k) * nu[a]).sum();
                let an: f64 = (0..m)
                    .map(|a| (am.get(a, j, k) + decomp.h_at(j, k) * nu[a]) * nu1_grad[i * m + a])
                    .sum();
                h_grad[t3(i, j, k)] = tn + an;
            }
        }
    }

    let mut a_minus_grad = vec![0.0; m * n * n * n];
    for a in 0..m {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    a_minus_grad[t4(a, i, j, k)] = grad.get(a, i, j, k)
                        - h_grad[t3(i, j, k)] * nu[a]
                        - decomp.h_at(j, k) * nu1_grad[i * m + a];
                }
            }
        }
    }

    let mut a_minus_grad_nu1 = vec![0.0; n * n * n];
    let mut a_minus_grad_hat = vec![0.0; m * n * n * n];
    let mut a_ring_grad_nu1 = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let along: f64 = (0..m).map(|a| a_minus_grad[t4(a, i, j, k)] * nu[a]).sum();
                a_minus_grad_nu1[t3(i, j, k)] = along;
                for a in 0..m {
                    a_minus_grad_hat[t4(a, i, j, k)] = a_minus_grad[t4(a, i, j, k)] - along * nu[a];
                }
                let tn: f64 = (0..m).map(|a| grad.get(a, i, j, k) * nu[a]).sum();
                a_ring_grad_nu1[t3(i, j, k)] = tn - grad_abs_mean[i] * kron(j, k) / nf;
            }
        }
    }

    // Q_ijk = ⟨∇_k Å_ij, ν₁⟩ − ⟨∇_k A⁻_ij, ν₁⟩ − |H|⁻¹ h̊_ij ∇_k|H|.
    let mut q = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                q[t3(i, j, k)] = a_ring_grad_nu1[t3(k, i, j)]
                    - a_minus_grad_nu1[t3(k, i, j)]
                    - decomp.h_ring_at(i, j) * grad_abs_mean[k] / mean;
            }
        }
    }

    let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let mut perp_sym2 = 0.0;
    let mut perp_sym_ring2 = 0.0;
    let mut nu1_sym2 = 0.0;
    let mut q_pairing = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for a in 0..m {
                    let hat = a_minus_grad_hat[t4(a, i, j, k)];
                    let x = hat + decomp.h_at(j, k) * nu1_grad[i * m + a];
                    let y = hat + decomp.h_ring_at(j, k) * nu1_grad[i * m + a];
                    perp_sym2 += x * x;
                    perp_sym_ring2 += y * y;
                }
                let z = a_minus_grad_nu1[t3(i, j, k)] + h_grad[t3(i, j, k)];
                nu1_sym2 += z * z;
                let pair: f64 = (0..m).map(|a| am.get(a, i, j) * nu1_grad[k * m + a]).sum();
                q_pairing += q[t3(i, j, k)] * pair;
            }
        }
    }

    let norms = GradientNorms {
        grad_a2: grad.norm2(),
        grad_mean2: sq(&grad_mean),
        grad_abs_mean2: sq(&grad_abs_mean),
        nu1_grad2: sq(&nu1_grad),
        h_grad2: sq(&h_grad),
        a_minus_grad2: sq(&a_minus_grad),
        a_minus_grad_hat2: sq(&a_minus_grad_hat),
        a_minus_grad_nu1_2: sq(&a_minus_grad_nu1),
        a_ring_grad_nu1_2: sq(&a_ring_grad_nu1),
        perp_sym2,
        perp_sym_ring2,
        nu1_sym2,
        q_pairing,
    };
    Ok(GradientSplit {
        dims,
        grad_mean,
        grad_abs_mean,
        nu1_grad,
        h_grad,
        a_minus_grad,
        a_minus_grad_nu1,
        a_minus_grad_hat,
        a_ring_grad_nu1,
        q,
        norms,
    })
}

/// Residuals of the three orthogonal-split identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameResiduals {
    /// |∇⊥A|² − (Σ|∇̂⊥A⁻ + h∇⊥ν₁|² + Σ|⟨∇⊥A⁻,ν₁⟩ + ∇h|²)
    pub second_fundamental_form: f64,
    /// |∇⊥H|² − (|H|²|∇⊥ν₁|² + |∇|H||²)
    pub mean_curvature: f64,
    /// |∇⊥A⁻|² − (|∇̂⊥A⁻|² + |⟨∇⊥A⁻,ν₁⟩|²)
    pub a_minus: f64,
}

impl FrameResiduals {
    pub fn max_abs(&self) -> f64 {
        self.second_fundamental_form
            .abs()
            .max(self.mean_curvature.abs())
            .max(self.a_minus.abs())
    }
}

pub fn frame_identity_residuals(
    decomp: &PrincipalDecomposition,
    grad: &GradientSample,
) -> Result<FrameResiduals> {
    let s = split_gradient(decomp, grad)?;
    let g = &s.norms;
    let mean2 = decomp.norms().mean2;
    Ok(FrameResiduals {
        second_fundamental_form: g.grad_a2 - (g.perp_sym2 + g.nu1_sym2),
        mean_curvature: g.grad_mean2 - (mean2 * g.nu1_grad2 + g.grad_abs_mean2),
        a_minus: g.a_minus_grad2 - (g.a_minus_grad_hat2 + g.a_minus_grad_nu1_2),
    })
}
