use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FlowFamily, FlowState};
use crate::error::{Error, Result};
use crate::pinching::{Background, PinchingConstants};
use crate::tensor_core::FormAnalysis;

pub const CSV_HEADER: [&str; 12] = [
    "t", "param1", "param2", "A2", "H2", "h2", "Aminus2", "f", "Q", "ratio_pinch", "ratio_codim", "ratio_cyl",
];

/// Scalar diagnostics at one time. Inapplicable fields are `NaN`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub param1: f64,
    pub param2: f64,
    /// `|A|²`
    pub a2: f64,
    /// `|H|²`
    pub mean2: f64,
    /// `|h|²`, the squared principal component.
    pub h2: f64,
    /// `|A⁻|²`
    pub a_minus2: f64,
    pub f: f64,
    /// Space-form pinching quantity.
    pub q: f64,
    /// `|A|²/|H|²`
    pub ratio_pinch: f64,
    /// `|A⁻|²/f`, `NaN` unless `f > 0`.
    pub ratio_codim: f64,
    /// `|A|² − |H|²/(n−1)`
    pub ratio_cyl: f64,
}

impl TimeSeriesRecord {
    pub fn values(&self) -> [f64; 12] {
        [
            self.t,
            self.param1,
            self.param2,
            self.a2,
            self.mean2,
            self.h2,
            self.a_minus2,
            self.f,
            self.q,
            self.ratio_pinch,
            self.ratio_codim,
            self.ratio_cyl,
        ]
    }

    pub fn from_values(v: &[f64]) -> Result<Self> {
        if v.len() < 12 {
            return Err(Error::ShapeMismatch { expected: 12, got: v.len() });
        }
        Ok(Self {
            t: v[0],
            param1: v[1],
            param2: v[2],
            a2: v[3],
            mean2: v[4],
            h2: v[5],
            a_minus2: v[6],
            f: v[7],
            q: v[8],
            ratio_pinch: v[9],
            ratio_codim: v[10],
            ratio_cyl: v[11],
        })
    }
}

/// Diagnostics of `state` under `k`, whose dimensions must match the family.
pub fn diagnostics(state: &FlowState, k: &PinchingConstants) -> Result<TimeSeriesRecord> {
    let form = state.form()?;
    if form.dims() != k.dims() {
        return Err(Error::InvalidConstants("constants were built for other dimensions".into()));
    }
    let n = form.dims().n() as f64;
    let x = FormAnalysis::new(form)?;
    let nm = x.norms();
    let f = k.f(nm.a2, nm.mean2);
    let q = match k.background() {
        Background::SpaceForm { .. } => k.q(nm.a_ring2, nm.mean2)?,
        _ => f64::NAN,
    };
    Ok(TimeSeriesRecord {
        t: state.t,
        param1: state.params[0],
        param2: state.params.get(1).copied().unwrap_or(f64::NAN),
        a2: nm.a2,
        mean2: nm.mean2,
        h2: nm.h2,
        a_minus2: nm.a_minus2,
        f,
        q,
        ratio_pinch: nm.a2 / nm.mean2,
        ratio_codim: if f > 0.0 { nm.a_minus2 / f } else { f64::NAN },
        ratio_cyl: nm.a2 - nm.mean2 / (n - 1.0),
    })
}

/// Integrates `family` with RK4 steps of size `dt` up to `t_end`, recording
/// every `every`-th step and the last one. Stops early, without error, once
/// the flow reaches its singular time.
pub fn simulate(
    family: &FlowFamily,
    k: &PinchingConstants,
    dt: f64,
    t_end: f64,
    every: usize,
) -> Result<Vec<TimeSeriesRecord>> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_end >= 0.0) || every == 0 {
        return Err(Error::InvalidConstants(format!(
            "need dt > 0, t_end >= 0 and every >= 1 (dt={dt}, t_end={t_end}, every={every})"
        )));
    }
    let steps = (t_end / dt).round() as usize;
    let mut state = family.initial_state()?;
    let mut out = vec![diagnostics(&state, k)?];
    for step in 1..=steps {
        state = match state.step_rk4(dt) {
            Ok(s) => FlowState { t: step as f64 * dt, ..s },
            Err(Error::PastBlowup { .. }) => break,
            Err(e) => return Err(e),
        };
        if step % every == 0 || step == steps {
            out.push(diagnostics(&state, k)?);
        }
    }
    Ok(out)
}

/// Runs [`simulate`] for several families in parallel.
pub fn simulate_sweep(
    runs: &[(FlowFamily, PinchingConstants)],
    dt: f64,
    t_end: f64,
    every: usize,
) -> Vec<Result<Vec<TimeSeriesRecord>>> {
    runs.par_iter().map(|(fam, k)| simulate(fam, k, dt, t_end, every)).collect()
}

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_csv<W: Write>(records: &[TimeSeriesRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(CSV_HEADER)?;
    for r in records {
        wr.write_record(r.values().iter().map(|x| fmt17(*x)))?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads a time series. Extra trailing columns are ignored.
pub fn read_csv<R: Read>(r: R) -> Result<Vec<TimeSeriesRecord>> {
    let mut rd = csv::Reader::from_reader(r);
    let header = rd.headers()?.clone();
    if header.len() < CSV_HEADER.len() || header.iter().zip(CSV_HEADER).any(|(a, b)| a.trim() != b) {
        return Err(Error::Parse(format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out = Vec::new();
    for (row, rec) in rd.records().enumerate() {
        let rec = rec?;
        let vals = rec
            .iter()
            .take(CSV_HEADER.len())
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("row {row}: `{s}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        out.push(TimeSeriesRecord::from_values(&vals)?);
    }
    Ok(out)
}
