use serde::{Deserialize, Serialize};

use super::FlowFamily;
use crate::error::{Error, Result};
use crate::reaction_terms::r1;
use crate::tensor_core::FormAnalysis;

/// Centred finite-difference step in time.
pub const FD_STEP: f64 = 1e-5;

/// Sample count of [`blowup_bound_check`].
pub const BARRIER_SAMPLES: usize = 1000;

/// Time derivatives of `|H|²` and `|A|²` along an exact solution against
/// the reaction terms of their evolution equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionResidual {
    pub t: f64,
    pub mean2_rate: f64,
    /// `2|h|²|H|² + 2nK̄|H|²`
    pub mean2_reaction: f64,
    pub a2_rate: f64,
    /// `2R₁ + 4K̄|H|² − 2nK̄|A|²`
    pub a2_reaction: f64,
    pub mean2_rel: f64,
    pub a2_rel: f64,
}

impl EvolutionResidual {
    pub fn max_rel(&self) -> f64 {
        self.mean2_rel.max(self.a2_rel)
    }
}

fn norms_at(family: &FlowFamily, t: f64) -> Result<(f64, f64, FormAnalysis)> {
    let x = FormAnalysis::new(family.form(&family.exact_params(t)?)?)?;
    let nm = x.norms();
    Ok((nm.mean2, nm.a2, x))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn evolution_residual(family: &FlowFamily, t: f64) -> Result<EvolutionResidual> {
    family.validate()?;
    let h = FD_STEP;
    let (hp, ap, _) = norms_at(family, t + h)?;
    let (hm, am, _) = norms_at(family, t - h)?;
    let (mean2, a2, x) = norms_at(family, t)?;
    let n = x.dims().n() as f64;
    let kbar = family.kbar();
    let mean2_rate = (hp - hm) / (2.0 * h);
    let a2_rate = (ap - am) / (2.0 * h);
    let mean2_reaction = 2.0 * x.norms().h2 * mean2 + 2.0 * n * kbar * mean2;
    let a2_reaction = 2.0 * r1(&x.form) + 4.0 * kbar * mean2 - 2.0 * n * kbar * a2;
    Ok(EvolutionResidual {
        t,
        mean2_rate,
        mean2_reaction,
        a2_rate,
        a2_reaction,
        mean2_rel: rel(mean2_rate, mean2_reaction),
        a2_rel: rel(a2_rate, a2_reaction),
    })
}

/// Comparison of `|H(t)|²` with one lower barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierVerdict {
    /// Time at which the barrier becomes infinite.
    pub t_max: f64,
    /// `min_t (|H|² − barrier)/barrier`.
    pub min_rel_margin: f64,
    /// `max_t |(|H|² − barrier)/barrier|`.
    pub max_rel_gap: f64,
    pub holds: bool,
}

impl BarrierVerdict {
    /// Barrier attained to relative `tol` at every sample.
    pub fn attained(&self, tol: f64) -> bool {
        self.max_rel_gap <= tol
    }
}

/// Lower barriers for `|H|²` of a homogeneous family.
///
/// `flat` integrates `v' = (2/n)v²`, giving `1/(1/|H₀|² − 2t/n)`. `corrected`
/// integrates `v' = (2/n)v² + 2nK̄v`, the comparison ODE that keeps the
/// ambient term; the two agree when `K̄ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierReport {
    pub samples: usize,
    pub kbar: f64,
    pub mean2_initial: f64,
    pub blowup_time: f64,
    pub flat: BarrierVerdict,
    pub corrected: BarrierVerdict,
}

fn corrected_barrier(t: f64, n: f64, kbar: f64, v0: f64) -> f64 {
    let a = 2.0 / n;
    let k = 2.0 * n * kbar;
    let w = if k == 0.0 {
        1.0 / v0 - a * t
    } else {
        (1.0 / v0 + a / k) * (-k * t).exp() - a / k
    };
    1.0 / w
}

fn corrected_t_max(n: f64, kbar: f64, v0: f64) -> f64 {
    let a = 2.0 / n;
    let k = 2.0 * n * kbar;
    if k == 0.0 {
        n / (2.0 * v0)
    } else {
        (k / (a * v0)).ln_1p() / k
    }
}

/// Samples `|H(t)|²` at [`BARRIER_SAMPLES`] times in
/// `[0, 0.999·min(T, barrier singular times))` and compares it with both barriers.
pub fn blowup_bound_check(family: &FlowFamily) -> Result<BarrierReport> {
    family.validate()?;
    let kbar = family.kbar();
    if kbar > 0.0 {
        return Err(Error::InvalidConstants("barriers need K̄ <= 0".into()));
    }
    let n = family.dims()?.n() as f64;
    let (v0, _, _) = norms_at(family, 0.0)?;
    let blowup = family.blowup_time();
    let flat_t_max = n / (2.0 * v0);
    let corr_t_max = corrected_t_max(n, kbar, v0);
    let horizon = 0.999 * blowup.min(flat_t_max).min(corr_t_max);
    let mut flat = (f64::INFINITY, 0.0f64);
    let mut corr = (f64::INFINITY, 0.0f64);
    for i in 0..BARRIER_SAMPLES {
        let t = horizon * i as f64 / BARRIER_SAMPLES as f64;
        let (v, _, _) = norms_at(family, t)?;
        let fb = 1.0 / (1.0 / v0 - 2.0 * t / n);
        let cb = corrected_barrier(t, n, kbar, v0);
        let (mf, mc) = ((v - fb) / fb, (v - cb) / cb);
        flat = (flat.0.min(mf), flat.1.max(mf.abs()));
        corr = (corr.0.min(mc), corr.1.max(mc.abs()));
    }
    let verdict = |(min, gap): (f64, f64), t_max| BarrierVerdict {
        t_max,
        min_rel_margin: min,
        max_rel_gap: gap,
        holds: min >= -1e-9,
    };
    Ok(BarrierReport {
        samples: BARRIER_SAMPLES,
        kbar,
        mean2_initial: v0,
        blowup_time: blowup,
        flat: verdict(flat, flat_t_max),
        corrected: verdict(corr, corr_t_max),
    })
}

fn d1(u: &[f64], i: usize, dx: f64) -> f64 {
    let n = u.len();
    (u[(i + 1) % n] - u[(i + n - 1) % n]) / (2.0 * dx)
}

fn d2(u: &[f64], i: usize, dx: f64) -> f64 {
    let n = u.len();
    (u[(i + 1) % n] - 2.0 * u[i] + u[(i + n - 1) % n]) / (dx * dx)
}

/// Max-norm residual of the quotient rule
/// `(∂t − Δ)(w/z) = (2/z)⟨∇(w/z), ∇z⟩ + W/z − (w/z²)Z`
/// on a periodic grid, where `w` and `z` take one forward Euler step of
/// `∂t u = Δu + source`. Both sides use centred second-order stencils.
pub fn quotient_identity_residual(
    w: &[f64],
    z: &[f64],
    big_w: &[f64],
    big_z: &[f64],
    dt: f64,
    dx: f64,
) -> Result<f64> {
    let len = w.len();
    for v in [z, big_w, big_z] {
        if v.len() != len {
            return Err(Error::ShapeMismatch { expected: len, got: v.len() });
        }
    }
    if len < 3 || !(dt > 0.0) || !(dx > 0.0) {
        return Err(Error::InvalidConstants("need at least 3 points, dt > 0 and dx > 0".into()));
    }
    if let Some(i) = z.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::NonpositiveZ(i));
    }
    let w1: Vec<f64> = (0..len).map(|i| w[i] + dt * (d2(w, i, dx) + big_w[i])).collect();
    let z1: Vec<f64> = (0..len).map(|i| z[i] + dt * (d2(z, i, dx) + big_z[i])).collect();
    if let Some(i) = z1.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::NonpositiveZ(i));
    }
    let q0: Vec<f64> = w.iter().zip(z).map(|(a, b)| a / b).collect();
    let mut worst = 0.0f64;
    for i in 0..len {
        let q1 = w1[i] / z1[i];
        let lhs = (q1 - q0[i]) / dt - d2(&q0, i, dx);
        let rhs = 2.0 / z[i] * d1(&q0, i, dx) * d1(z, i, dx) + big_w[i] / z[i] - w[i] * big_z[i] / (z[i] * z[i]);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Residual for `w = 2 + sin x`, `z = 3 + cos x`, `W = sin x`, `Z = cos x`
/// on `points` nodes over `[0, 2π)` with `dt = dx²/4`.
pub fn manufactured_quotient_residual(points: usize) -> Result<f64> {
    let dx = std::f64::consts::TAU / points as f64;
    let xs: Vec<f64> = (0..points).map(|i| i as f64 * dx).collect();
    let w: Vec<f64> = xs.iter().map(|x| 2.0 + x.sin()).collect();
    let z: Vec<f64> = xs.iter().map(|x| 3.0 + x.cos()).collect();
    let big_w: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
    let big_z: Vec<f64> = xs.iter().map(|x| x.cos()).collect();
    quotient_identity_residual(&w, &z, &big_w, &big_z, 0.25 * dx * dx, dx)
}
