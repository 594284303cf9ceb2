use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported tangent dimension and codimension.
pub const MAX_DIM: usize = 16;

/// Tangent dimension `n` and codimension `m` of an immersion point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    n: usize,
    m: usize,
}

impl Dims {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&n) || !(1..=MAX_DIM).contains(&m) {
            return Err(Error::InvalidDims { n, m });
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Entries of one n×n matrix.
    pub fn matrix_len(&self) -> usize {
        self.n * self.n
    }

    /// Entries of a full form (m matrices).
    pub fn form_len(&self) -> usize {
        self.m * self.n * self.n
    }
}

/// Second fundamental form at a point: `m` symmetric `n×n` matrices stored
/// row-major, slot-major (`data[(alpha * n + i) * n + j] = A^alpha_ij`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondFundamentalForm {
    dims: Dims,
    data: Vec<f64>,
}

impl SecondFundamentalForm {
    /// Validates length and exact symmetry of every slot.
    pub fn new(dims: Dims, data: Vec<f64>) -> Result<Self> {
        if data.len() != dims.form_len() {
            return Err(Error::ShapeMismatch {
                expected: dims.form_len(),
                got: data.len(),
            });
        }
        let n = dims.n;
        for a in 0..dims.m {
            for i in 0..n {
                for j in (i + 1)..n {
                    let x = data[(a * n + i) * n + j];
                    let y = data[(a * n + j) * n + i];
                    if x != y && !(x.is_nan() && y.is_nan()) {
                        return Err(Error::NotSymmetric { slot: a, i, j });
                    }
                }
            }
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Dims) -> Self {
        Self {
            dims,
            data: vec![0.0; dims.form_len()],
        }
    }

    /// Builds a form from `f(alpha, i, j)` evaluated on `i <= j` and mirrored.
    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let n = dims.n;
        let mut data = vec![0.0; dims.form_len()];
        for a in 0..dims.m {
            for i in 0..n {
                for j in i..n {
                    let v = f(a, i, j);
                    data[(a * n + i) * n + j] = v;
                    data[(a * n + j) * n + i] = v;
                }
            }
        }
        Self { dims, data }
    }

    /// Diagonal form: `diag[alpha][i]` on the diagonal of slot `alpha`.
    pub fn diagonal(dims: Dims, diag: &[Vec<f64>]) -> Result<Self> {
        if diag.len() != dims.m || diag.iter().any(|d| d.len() != dims.n) {
            return Err(Error::ShapeMismatch {
                expected: dims.m * dims.n,
                got: diag.iter().map(Vec::len).sum(),
            });
        }
        Ok(Self::from_fn(dims, |a, i, j| if i == j { diag[a][i] } else { 0.0 }))
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    #[inline]
    pub fn get(&self, alpha: usize, i: usize, j: usize) -> f64 {
        let n = self.dims.n;
        self.data[(alpha * n + i) * n + j]
    }

    /// Row-major entries of slot `alpha`.
    pub fn slot(&self, alpha: usize) -> &[f64] {
        let len = self.dims.matrix_len();
        &self.data[alpha * len..(alpha + 1) * len]
    }

    pub fn components(&self) -> &[f64] {
        &self.data
    }

    /// |A|² = Σ (A^α_ij)².
    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn trace(&self, alpha: usize) -> f64 {
        (0..self.dims.n).map(|i| self.get(alpha, i, i)).sum()
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        self.map_entries(|x| x * lambda)
    }

    /// Applies `f` entrywise; symmetry is preserved because `f` is a function.
    pub fn map_entries(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            dims: self.dims,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Sets `A^alpha_ij` and its mirror.
    pub fn with_entry(&self, alpha: usize, i: usize, j: usize, value: f64) -> Self {
        let n = self.dims.n;
        let mut data = self.data.clone();
        data[(alpha * n + i) * n + j] = value;
        data[(alpha * n + j) * n + i] = value;
        Self {
            dims: self.dims,
            data,
        }
    }

    /// Independent entries `(alpha, i, j)` with `i <= j`.
    pub fn upper_indices(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.dims.n;
        (0..self.dims.m).flat_map(move |a| (0..n).flat_map(move |i| (i..n).map(move |j| (a, i, j))))
    }

    pub fn mean_curvature(&self) -> MeanCurvature {
        mean_curvature(self)
    }
}

/// Mean curvature vector `H^α = tr A^α` and its norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanCurvature {
    vector: Vec<f64>,
    norm: f64,
}

impl MeanCurvature {
    pub fn vector(&self) -> &[f64] {
        &self.vector
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn norm2(&self) -> f64 {
        self.vector.iter().map(|x| x * x).sum()
    }
}

/// Componentwise trace of the form.
pub fn mean_curvature(a: &SecondFundamentalForm) -> MeanCurvature {
    let vector: Vec<f64> = (0..a.dims().m()).map(|alpha| a.trace(alpha)).collect();
    let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
    MeanCurvature { vector, norm }
}
