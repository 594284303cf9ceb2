//! Pinching constants and the pinching quantities
//! `f = c|H|² − |A|² − d` and `Q = |Å|² − (c − 1/n)|H|² − d K̄`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor_core::{Dims, MeanCurvature, SecondFundamentalForm, SplitNorms};

/// Exact rational constant.
pub type Rational = Ratio<i64>;

/// Which pinching coefficient `c_n` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CnRegime {
    /// `min{4/(3n), 1/(n−2)}`.
    General,
    /// `4/(3n)` for `n ≥ 8`, `3(n+1)/(2n(n+2))` for `n = 5, 6, 7`.
    CodimEstimate,
}

/// Pinching coefficient `c_n` as an exact fraction; requires `n ≥ 5`.
pub fn c_n(n: usize, regime: CnRegime) -> Result<Rational> {
    if n < 5 {
        return Err(Error::UnsupportedDimension(n));
    }
    let ni = n as i64;
    let four_thirds = Rational::new(4, 3 * ni);
    Ok(match regime {
        CnRegime::General => four_thirds.min(Rational::new(1, ni - 2)),
        CnRegime::CodimEstimate if n >= 8 => four_thirds,
        CnRegime::CodimEstimate => Rational::new(3 * (ni + 1), 2 * ni * (ni + 2)),
    })
}

pub fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Young-inequality weights `ρ, θ, ϑ` in the preservation constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreservationWeights {
    pub rho: f64,
    pub theta: f64,
    pub vartheta: f64,
}

impl Default for PreservationWeights {
    fn default() -> Self {
        Self {
            rho: 1.0,
            theta: 1.0,
            vartheta: 1.0,
        }
    }
}

/// `C₁…C₄`, the three candidate offsets and their maximum `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreservationConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub branches: [f64; 3],
    pub d: f64,
}

/// Constants that make `|A|² − c|H|² + d ≤ 0` preserved under bounded
/// background curvature `K₁, K₂` and gradient bound `L`.
pub fn preservation_constants(
    n: usize,
    m: usize,
    c: f64,
    k1: f64,
    k2: f64,
    l: f64,
    w: PreservationWeights,
) -> Result<PreservationConstants> {
    let nf = n as f64;
    let mf = m as f64;
    if !(c > 1.0 / nf) || !c.is_finite() {
        return Err(Error::InvalidConstants(format!("c = {c} must exceed 1/n = {}", 1.0 / nf)));
    }
    if [k1, k2, l].iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidConstants("K1, K2, L must be finite and nonnegative".into()));
    }
    if [w.rho, w.theta, w.vartheta].iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::InvalidConstants("rho, theta, vartheta must be positive".into()));
    }
    let ks = k1 + k2;
    if ks == 0.0 {
        if l > 0.0 {
            return Err(Error::InvalidConstants(
                "a flat background (K1 + K2 = 0) has L = 0".into(),
            ));
        }
        return Ok(PreservationConstants {
            c1: 0.0,
            c2: 0.0,
            c3: 0.0,
            c4: 0.0,
            branches: [0.0; 3],
            d: 0.0,
        });
    }
    let e = c - 1.0 / nf;
    let PreservationWeights { rho, theta, vartheta } = w;
    let common = 4.0 * nf * k1 + 2.0 * nf * k2 + 2.0 * (nf * c * k1 + k2) / e;
    let c1 = common
        + (rho * nf * (mf - 1.0) + nf * (mf - 2.0) + 16.0 / 3.0 * rho * (nf - 1.0) * (mf - 1.0)) * ks
        + theta;
    let c2 = common
        + (nf / rho + 16.0 * (nf - 1.0) / (3.0 * rho) + 8.0 / 3.0 * (nf - 1.0).sqrt() * (mf - 2.0)) * ks
        + nf * vartheta;
    let c3 = 2.0 * (nf * c * k1 + k2) / e;
    let c4 = l * l / theta + 4.0 * l * l / vartheta;
    let branches = [
        c1 * e / (2.0 * c),
        c2 * nf * e / 4.0,
        nf * e / 4.0 * (c3 + (c3 * c3 + 8.0 * c4 / (nf * e)).sqrt()),
    ];
    let d = branches.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(PreservationConstants {
        c1,
        c2,
        c3,
        c4,
        branches,
        d,
    })
}

/// Smallest admissible `d` for bounded background curvature.
pub fn d_lower_bound(
    n: usize,
    m: usize,
    c: f64,
    k1: f64,
    k2: f64,
    l: f64,
    w: PreservationWeights,
) -> Result<f64> {
    preservation_constants(n, m, c, k1, k2, l, w).map(|p| p.d)
}

/// `κ_n = 3/(n+2) − c`, required positive.
pub fn kappa_n(n: usize, c: f64) -> Result<f64> {
    let k = 3.0 / (n as f64 + 2.0) - c;
    if k > 0.0 {
        Ok(k)
    } else {
        Err(Error::NonpositiveKappa(k))
    }
}

/// Smallest `d` preserving `Q ≤ 0` in a space form with `K̄ < 0`: `2n − 2/c`.
pub fn space_form_min_d(n: usize, c: f64) -> f64 {
    2.0 * n as f64 - 2.0 / c
}

/// Coefficients of the `K̄`-terms in the space-form reaction bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceFormCoefficients {
    /// `s = (d/n)/(c − 1/n)`.
    pub scaled_d: f64,
    /// `s + d − 2n`, multiplies `K̄|h̊|²`.
    pub h_ring_coefficient: f64,
    /// `s − n`, multiplies `K̄|A⁻|²` and `dK̄²`.
    pub a_minus_coefficient: f64,
}

pub fn space_form_coefficients(n: usize, c: f64, d: f64) -> Result<SpaceFormCoefficients> {
    let nf = n as f64;
    if !(c > 1.0 / nf) {
        return Err(Error::InvalidConstants(format!("c = {c} must exceed 1/n")));
    }
    let s = d / nf / (c - 1.0 / nf);
    Ok(SpaceFormCoefficients {
        scaled_d: s,
        h_ring_coefficient: s + d - 2.0 * nf,
        a_minus_coefficient: s - nf,
    })
}

/// Background model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Background {
    Euclidean,
    Bounded { k1: f64, k2: f64, l: f64 },
    SpaceForm { kbar: f64 },
}

/// Whether `d` sits strictly above its lower bound or on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    Strict,
    /// Equality with the lower bound; the preservation argument wants `>`.
    AtLowerBound,
}

/// Validated `(c, d, background)` for a given dimension pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinchingConstants {
    dims: Dims,
    c: f64,
    d: f64,
    background: Background,
}

impl PinchingConstants {
    pub fn new(dims: Dims, c: f64, d: f64, background: Background) -> Result<Self> {
        let nf = dims.n() as f64;
        if !(c > 1.0 / nf) || !c.is_finite() {
            return Err(Error::InvalidConstants(format!("c = {c} must exceed 1/n = {}", 1.0 / nf)));
        }
        if !d.is_finite() {
            return Err(Error::InvalidConstants("d must be finite".into()));
        }
        let k = Self { dims, c, d, background };
        let lb = k.lower_bound()?;
        if d < lb {
            return Err(Error::InvalidConstants(format!("d = {d} is below the lower bound {lb}")));
        }
        Ok(k)
    }

    /// Flat ambient space with the given `c` and `d ≥ 0`.
    pub fn euclidean(dims: Dims, c: f64, d: f64) -> Result<Self> {
        Self::new(dims, c, d, Background::Euclidean)
    }

    pub fn space_form(dims: Dims, c: f64, d: f64, kbar: f64) -> Result<Self> {
        Self::new(dims, c, d, Background::SpaceForm { kbar })
    }

    /// Smallest admissible `d` for this background.
    pub fn lower_bound(&self) -> Result<f64> {
        let n = self.dims.n();
        Ok(match self.background {
            Background::Euclidean => 0.0,
            Background::Bounded { k1, k2, l } => {
                d_lower_bound(n, self.dims.m(), self.c, k1, k2, l, PreservationWeights::default())?
            }
            Background::SpaceForm { kbar } if kbar < 0.0 => space_form_min_d(n, self.c).max(0.0),
            Background::SpaceForm { .. } => 0.0,
        })
    }

    pub fn strictness(&self) -> Strictness {
        match self.lower_bound() {
            Ok(lb) if self.d > lb => Strictness::Strict,
            _ => Strictness::AtLowerBound,
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn background(&self) -> Background {
        self.background
    }

    /// Constant ambient curvature, if the background has one (`0` when flat).
    pub fn kbar(&self) -> Option<f64> {
        match self.background {
            Background::Euclidean => Some(0.0),
            Background::SpaceForm { kbar } => Some(kbar),
            Background::Bounded { .. } => None,
        }
    }

    /// `f = c|H|² − |A|² − d`.
    pub fn f(&self, a2: f64, mean2: f64) -> f64 {
        self.c * mean2 - a2 - self.d
    }

    /// `Q = |Å|² − (c − 1/n)|H|² − d K̄`.
    pub fn q(&self, a_ring2: f64, mean2: f64) -> Result<f64> {
        let kbar = self.kbar().ok_or_else(|| {
            Error::InvalidConstants("Q needs a constant-curvature background".into())
        })?;
        Ok(a_ring2 - (self.c - 1.0 / self.dims.n() as f64) * mean2 - self.d * kbar)
    }

    /// `((nc − 1)/n)|H|² − (|A⁻|² + |h̊|² + f + d)`; zero up to rounding.
    pub fn f_split_residual(&self, norms: &SplitNorms) -> f64 {
        let nf = self.dims.n() as f64;
        let f = self.f(norms.a2, norms.mean2);
        (nf * self.c - 1.0) / nf * norms.mean2 - (norms.a_minus2 + norms.h_ring2 + f + self.d)
    }
}

/// `f` evaluated on a form.
pub fn pinching_f(a: &SecondFundamentalForm, h: &MeanCurvature, k: &PinchingConstants) -> f64 {
    k.f(a.norm2(), h.norm2())
}

/// `Q` evaluated on a form; `|Å|² = |A|² − |H|²/n`.
pub fn pinching_q(a: &SecondFundamentalForm, h: &MeanCurvature, k: &PinchingConstants) -> Result<f64> {
    let n = a.dims().n() as f64;
    let mut a_ring2 = 0.0;
    for al in 0..a.dims().m() {
        for i in 0..a.dims().n() {
            for j in 0..a.dims().n() {
                let v = a.get(al, i, j) - if i == j { h.vector()[al] / n } else { 0.0 };
                a_ring2 += v * v;
            }
        }
    }
    k.q(a_ring2, h.norm2())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_n_values() {
        assert_eq!(c_n(8, CnRegime::General).unwrap(), Rational::new(1, 6));
        assert_eq!(c_n(5, CnRegime::General).unwrap(), Rational::new(4, 15));
        assert_eq!(c_n(5, CnRegime::CodimEstimate).unwrap(), Rational::new(9, 35));
        assert_eq!(c_n(9, CnRegime::General).unwrap(), Rational::new(1, 7));
        assert_eq!(c_n(9, CnRegime::CodimEstimate).unwrap(), Rational::new(4, 27));
        assert_eq!(c_n(4, CnRegime::General), Err(Error::UnsupportedDimension(4)));
    }

    #[test]
    fn kappa_values() {
        assert!((kappa_n(8, 1.0 / 6.0).unwrap() - 2.0 / 15.0).abs() < 1e-15);
        assert!((kappa_n(10, 0.125).unwrap() - 0.125).abs() < 1e-15);
        assert!(matches!(kappa_n(5, 3.0 / 7.0), Err(Error::NonpositiveKappa(_))));
    }
}
