//! Exact ODE-reduced mean curvature flow families.
//!
//! Each family is homogeneous: the second fundamental form is determined by
//! one or two radii, so all spatial derivatives vanish and the flow reduces
//! to radius ODEs with closed-form solutions. The cylinder, product and
//! hyperbolic families are test oracles chosen for this crate.

mod checks;
mod series;

pub use checks::{
    blowup_bound_check, evolution_residual, manufactured_quotient_residual, quotient_identity_residual,
    BarrierReport, BarrierVerdict, EvolutionResidual, BARRIER_SAMPLES, FD_STEP,
};
pub use series::{diagnostics, fmt17, read_csv, simulate, simulate_sweep, write_csv, TimeSeriesRecord, CSV_HEADER};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pinching::Background;
use crate::tensor_core::{Dims, SecondFundamentalForm};

/// Integration stops once a radius falls to this value.
pub const R_MIN: f64 = 1e-6;

/// A homogeneous solution family and its initial data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FlowFamily {
    /// Round `Sⁿ(r)` in `R^{n+m}`, umbilic in normal slot 0: `ṙ = −n/r`.
    Sphere { n: usize, m: usize, r0: f64 },
    /// `S^{n−1}(r) × R`: `ṙ = −(n−1)/r`.
    Cylinder { n: usize, m: usize, r0: f64 },
    /// `Sᵖ(a) × S^q(b)` with the factors in normal slots 0 and 1:
    /// `ȧ = −p/a`, `ḃ = −q/b`.
    Product { p: usize, q: usize, m: usize, a0: f64, b0: f64 },
    /// Geodesic sphere in the space form of curvature `K̄ = −κ² < 0`:
    /// principal curvature `κ coth(κr)`, `ṙ = −nκ coth(κr)`.
    Hyperbolic { n: usize, m: usize, r0: f64, kbar: f64 },
}

impl FlowFamily {
    pub fn validate(&self) -> Result<()> {
        self.dims()?;
        let bad = |msg: String| Err(Error::InvalidConstants(msg));
        match *self {
            FlowFamily::Sphere { r0, .. } | FlowFamily::Cylinder { r0, .. } if !(r0 > 0.0 && r0.is_finite()) => {
                bad(format!("radius {r0} must be positive"))
            }
            FlowFamily::Product { p, q, m, a0, b0 } => {
                if p == 0 || q == 0 || m < 2 {
                    bad(format!("product needs p, q >= 1 and m >= 2 (p={p}, q={q}, m={m})"))
                } else if !(a0 > 0.0 && b0 > 0.0 && a0.is_finite() && b0.is_finite()) {
                    bad(format!("radii a={a0}, b={b0} must be positive"))
                } else {
                    Ok(())
                }
            }
            FlowFamily::Hyperbolic { r0, kbar, .. } => {
                if !(kbar < 0.0 && kbar.is_finite()) {
                    bad(format!("hyperbolic family needs K̄ < 0, got {kbar}"))
                } else if !(r0 > 0.0 && r0.is_finite()) {
                    bad(format!("radius {r0} must be positive"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn dims(&self) -> Result<Dims> {
        match *self {
            FlowFamily::Sphere { n, m, .. } | FlowFamily::Cylinder { n, m, .. } | FlowFamily::Hyperbolic { n, m, .. } => {
                Dims::new(n, m)
            }
            FlowFamily::Product { p, q, m, .. } => Dims::new(p + q, m),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FlowFamily::Sphere { .. } => "sphere",
            FlowFamily::Cylinder { .. } => "cylinder",
            FlowFamily::Product { .. } => "product",
            FlowFamily::Hyperbolic { .. } => "hyperbolic",
        }
    }

    /// Ambient curvature (`0` when flat).
    pub fn kbar(&self) -> f64 {
        match *self {
            FlowFamily::Hyperbolic { kbar, .. } => kbar,
            _ => 0.0,
        }
    }

    pub fn background(&self) -> Background {
        match *self {
            FlowFamily::Hyperbolic { kbar, .. } => Background::SpaceForm { kbar },
            _ => Background::Euclidean,
        }
    }

    pub fn initial_params(&self) -> Vec<f64> {
        match *self {
            FlowFamily::Sphere { r0, .. } | FlowFamily::Cylinder { r0, .. } | FlowFamily::Hyperbolic { r0, .. } => {
                vec![r0]
            }
            FlowFamily::Product { a0, b0, .. } => vec![a0, b0],
        }
    }

    pub fn initial_state(&self) -> Result<FlowState> {
        self.validate()?;
        Ok(FlowState { family: *self, t: 0.0, params: self.initial_params() })
    }

    /// Exact extinction time.
    pub fn blowup_time(&self) -> f64 {
        match *self {
            FlowFamily::Sphere { n, r0, .. } => r0 * r0 / (2.0 * n as f64),
            FlowFamily::Cylinder { n, r0, .. } => r0 * r0 / (2.0 * (n as f64 - 1.0)),
            FlowFamily::Product { p, q, a0, b0, .. } => (a0 * a0 / (2.0 * p as f64)).min(b0 * b0 / (2.0 * q as f64)),
            FlowFamily::Hyperbolic { n, r0, kbar, .. } => {
                let k = (-kbar).sqrt();
                (k * r0).cosh().ln() / (n as f64 * -kbar)
            }
        }
    }

    /// Closed-form radii at time `t` (negative `t` runs backwards).
    pub fn exact_params(&self, t: f64) -> Result<Vec<f64>> {
        let blowup = self.blowup_time();
        if !(t < blowup) {
            return Err(Error::PastBlowup { t, blowup });
        }
        let shrink = |r0: f64, rate: f64| (r0 * r0 - 2.0 * rate * t).sqrt();
        Ok(match *self {
            FlowFamily::Sphere { n, r0, .. } => vec![shrink(r0, n as f64)],
            FlowFamily::Cylinder { n, r0, .. } => vec![shrink(r0, n as f64 - 1.0)],
            FlowFamily::Product { p, q, a0, b0, .. } => vec![shrink(a0, p as f64), shrink(b0, q as f64)],
            FlowFamily::Hyperbolic { n, r0, kbar, .. } => {
                let k = (-kbar).sqrt();
                let ch = (k * r0).cosh() * (n as f64 * kbar * t).exp();
                vec![ch.acosh() / k]
            }
        })
    }

    pub fn exact_state(&self, t: f64) -> Result<FlowState> {
        self.validate()?;
        Ok(FlowState { family: *self, t, params: self.exact_params(t)? })
    }

    /// Right-hand side of the radius ODEs.
    pub fn velocity(&self, params: &[f64]) -> Vec<f64> {
        match *self {
            FlowFamily::Sphere { n, .. } => vec![-(n as f64) / params[0]],
            FlowFamily::Cylinder { n, .. } => vec![-(n as f64 - 1.0) / params[0]],
            FlowFamily::Product { p, q, .. } => vec![-(p as f64) / params[0], -(q as f64) / params[1]],
            FlowFamily::Hyperbolic { n, kbar, .. } => {
                let k = (-kbar).sqrt();
                vec![-(n as f64) * k / (k * params[0]).tanh()]
            }
        }
    }

    /// Second fundamental form of the family at the given radii.
    pub fn form(&self, params: &[f64]) -> Result<SecondFundamentalForm> {
        let dims = self.dims()?;
        let n = dims.n();
        Ok(match *self {
            FlowFamily::Sphere { .. } => {
                let k = 1.0 / params[0];
                SecondFundamentalForm::from_fn(dims, |a, i, j| if a == 0 && i == j { k } else { 0.0 })
            }
            FlowFamily::Cylinder { .. } => {
                let k = 1.0 / params[0];
                SecondFundamentalForm::from_fn(dims, |a, i, j| if a == 0 && i == j && i + 1 < n { k } else { 0.0 })
            }
            FlowFamily::Product { p, .. } => {
                let (ka, kb) = (1.0 / params[0], 1.0 / params[1]);
                SecondFundamentalForm::from_fn(dims, |a, i, j| match (a, i == j) {
                    (0, true) if i < p => ka,
                    (1, true) if i >= p => kb,
                    _ => 0.0,
                })
            }
            FlowFamily::Hyperbolic { kbar, .. } => {
                let k = (-kbar).sqrt();
                let kappa = k / (k * params[0]).tanh();
                SecondFundamentalForm::from_fn(dims, |a, i, j| if a == 0 && i == j { kappa } else { 0.0 })
            }
        })
    }
}

/// Point on a family's trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub family: FlowFamily,
    pub t: f64,
    /// Current radii.
    pub params: Vec<f64>,
}

impl FlowState {
    pub fn form(&self) -> Result<SecondFundamentalForm> {
        self.family.form(&self.params)
    }

    /// One classical RK4 step of size `dt`, split into halved substeps while
    /// some radius is below `10·h·|ṙ|`. Fails with `PastBlowup` once a radius
    /// reaches [`R_MIN`].
    pub fn step_rk4(&self, dt: f64) -> Result<FlowState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidConstants(format!("dt = {dt} must be positive")));
        }
        let fam = self.family;
        let past = |t: f64| Error::PastBlowup { t, blowup: fam.blowup_time() };
        let mut t = self.t;
        let mut y = self.params.clone();
        let mut remaining = dt;
        while remaining > 0.0 {
            let mut h = remaining;
            let v = fam.velocity(&y);
            while y.iter().zip(&v).any(|(r, rd)| *r < 10.0 * h * rd.abs()) {
                h *= 0.5;
                if h < f64::EPSILON * dt {
                    return Err(past(t));
                }
            }
            if y.iter().any(|r| *r <= R_MIN) {
                return Err(past(t));
            }
            y = rk4(&fam, &y, h);
            if y.iter().any(|r| !(*r > R_MIN)) {
                return Err(past(t + h));
            }
            t += h;
            remaining -= h;
            if remaining < 1e-15 * dt {
                break;
            }
        }
        Ok(FlowState { family: fam, t: self.t + dt, params: y })
    }
}

fn rk4(fam: &FlowFamily, y: &[f64], h: f64) -> Vec<f64> {
    let axpy = |a: &[f64], s: f64, b: &[f64]| a.iter().zip(b).map(|(x, d)| x + s * d).collect::<Vec<_>>();
    let k1 = fam.velocity(y);
    let k2 = fam.velocity(&axpy(y, h / 2.0, &k1));
    let k3 = fam.velocity(&axpy(y, h / 2.0, &k2));
    let k4 = fam.velocity(&axpy(y, h, &k3));
    (0..y.len())
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Free-function form of [`FlowFamily::exact_state`].
pub fn exact_state(family: &FlowFamily, t: f64) -> Result<FlowState> {
    family.exact_state(t)
}

pub fn step_rk4(state: &FlowState, dt: f64) -> Result<FlowState> {
    state.step_rk4(dt)
}
