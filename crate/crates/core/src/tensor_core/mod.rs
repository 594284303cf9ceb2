//! Finite-dimensional tensor algebra of the second fundamental form at one
//! point: traces, norms, the principal-normal split and normal curvature.
//!
//! All norms are plain sums of squares over the raw index ranges, i.e. an
//! orthonormal tangent frame and an orthonormal normal frame are assumed.

mod decomposition;
mod form;
mod gradient;
mod normal;

pub use decomposition::{
    principal_decompose, principal_decompose_with_tol, PrincipalDecomposition, SplitNorms, DEFAULT_TOL_H,
};
pub use form::{mean_curvature, Dims, MeanCurvature, SecondFundamentalForm, MAX_DIM};
pub use gradient::{
    frame_identity_residuals, split_gradient, FrameResiduals, GradientNorms, GradientSample, GradientSplit,
    CODAZZI_TOL,
};
pub use normal::{commutator_norm2, normal_curvature, NormalCurvature};

/// Kronecker delta as a float.
#[inline]
pub(crate) fn kron(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// Everything derived from one form with `|H| > 0`, computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct FormAnalysis {
    pub form: SecondFundamentalForm,
    pub mean: MeanCurvature,
    pub decomp: PrincipalDecomposition,
    pub normal: NormalCurvature,
}

impl FormAnalysis {
    pub fn new(form: SecondFundamentalForm) -> crate::Result<Self> {
        let mean = mean_curvature(&form);
        let decomp = principal_decompose(&form)?;
        let normal = normal_curvature(&form, &decomp);
        Ok(Self {
            form,
            mean,
            decomp,
            normal,
        })
    }

    pub fn dims(&self) -> Dims {
        self.form.dims()
    }

    pub fn norms(&self) -> &SplitNorms {
        self.decomp.norms()
    }
}
