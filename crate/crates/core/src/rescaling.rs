//! Parabolic rescaling of recorded diagnostics about a base record.
//!
//! With `r̂² = 1/f(base)` the metric becomes `g/r̂²`: squared curvature
//! quantities scale by `r̂²`, radii by `1/r̂`, time offsets by `1/r̂²`, and
//! the ambient curvature by `r̂²`. Ratios are dimensionless and unchanged.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{TimeSeriesRecord, CSV_HEADER};

/// One transformed record. `record.t` keeps the original time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledRecord {
    pub record: TimeSeriesRecord,
    /// `(t − t_base)/r̂²`
    pub tbar: f64,
    /// `r̂² f`
    pub fbar: f64,
    /// `r̂² K̄`
    pub kresc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledSeries {
    pub base_index: usize,
    /// `r̂ = f(base)^{−1/2}`
    pub r_hat: f64,
    pub t_base: f64,
    pub kbar: f64,
    /// `r̂² d`
    pub dbar: f64,
    pub records: Vec<RescaledRecord>,
}

/// Rescales `series` about record `base_index`. `kbar` and `d` are the
/// ambient curvature and pinching offset the series was recorded with.
pub fn rescale(series: &[TimeSeriesRecord], base_index: usize, kbar: f64, d: f64) -> Result<RescaledSeries> {
    let base = series.get(base_index).ok_or(Error::RowOutOfRange { row: base_index, len: series.len() })?;
    if !(base.f > 0.0) {
        return Err(Error::NotPinchedAtBase { row: base_index, f: base.f });
    }
    let fb = base.f;
    let s2 = 1.0 / fb;
    let r_hat = s2.sqrt();
    let records = series
        .iter()
        .map(|r| {
            let (a2, mean2, fbar) = (r.a2 / fb, r.mean2 / fb, r.f / fb);
            let a_minus2 = r.a_minus2 / fb;
            RescaledRecord {
                record: TimeSeriesRecord {
                    t: r.t,
                    param1: r.param1 / r_hat,
                    param2: r.param2 / r_hat,
                    a2,
                    mean2,
                    h2: r.h2 / fb,
                    a_minus2,
                    f: fbar,
                    q: r.q / fb,
                    ratio_pinch: a2 / mean2,
                    ratio_codim: if fbar > 0.0 { a_minus2 / fbar } else { f64::NAN },
                    ratio_cyl: r.ratio_cyl / fb,
                },
                tbar: (r.t - base.t) * fb,
                fbar,
                kresc: kbar / fb,
            }
        })
        .collect();
    Ok(RescaledSeries { base_index, r_hat, t_base: base.t, kbar, dbar: d / fb, records })
}

/// Record-wise comparison of a series with its rescaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub records: usize,
    /// `max |ratio_pinch − ratio_pinch_bar|/ratio_pinch`
    pub pinch_ratio_err: f64,
    /// Same for `ratio_codim` over records with `f > 0`.
    pub codim_ratio_err: f64,
    /// `|f̄(base) − 1|`
    pub base_fbar_err: f64,
    pub kresc: f64,
}

impl InvarianceReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.pinch_ratio_err <= tol && self.codim_ratio_err <= tol && self.base_fbar_err <= tol
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn invariance_report(series: &[TimeSeriesRecord], rescaled: &RescaledSeries) -> Result<InvarianceReport> {
    if series.len() != rescaled.records.len() {
        return Err(Error::ShapeMismatch { expected: series.len(), got: rescaled.records.len() });
    }
    let mut pinch = 0.0f64;
    let mut codim = 0.0f64;
    for (r, s) in series.iter().zip(&rescaled.records) {
        pinch = pinch.max(rel_err(r.a2 / r.mean2, s.record.ratio_pinch));
        if r.f > 0.0 {
            codim = codim.max(rel_err(r.a_minus2 / r.f, s.record.ratio_codim));
        }
    }
    Ok(InvarianceReport {
        records: series.len(),
        pinch_ratio_err: pinch,
        codim_ratio_err: codim,
        base_fbar_err: (rescaled.records[rescaled.base_index].fbar - 1.0).abs(),
        kresc: rescaled.records[rescaled.base_index].kresc,
    })
}

/// `(f(base), K̄_resc)` for each base, in the given order.
pub fn kresc_sequence(series: &[TimeSeriesRecord], bases: &[usize], kbar: f64) -> Result<Vec<(f64, f64)>> {
    bases
        .iter()
        .map(|&b| {
            let r = rescale(series, b, kbar, 0.0)?;
            Ok((series[b].f, r.records[b].kresc))
        })
        .collect()
}

/// First record index with `f ≥ target`.
pub fn first_row_with_f(series: &[TimeSeriesRecord], target: f64) -> Option<usize> {
    series.iter().position(|r| r.f >= target)
}

pub fn write_rescaled_csv<W: Write>(s: &RescaledSeries, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(CSV_HEADER.iter().chain(&["tbar", "fbar", "Kresc"]))?;
    for r in &s.records {
        let mut vals = r.record.values().to_vec();
        vals.extend([r.tbar, r.fbar, r.kresc]);
        wr.write_record(vals.iter().map(|x| crate::flow::fmt17(*x)))?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads a rescaled CSV back into records and the three extra columns.
pub fn read_rescaled_csv<R: Read>(r: R) -> Result<Vec<RescaledRecord>> {
    let mut rd = csv::Reader::from_reader(r);
    let header = rd.headers()?.clone();
    let want: Vec<&str> = CSV_HEADER.iter().copied().chain(["tbar", "fbar", "Kresc"]).collect();
    if header.iter().map(str::trim).ne(want.iter().copied()) {
        return Err(Error::Parse("unexpected header for a rescaled series".into()));
    }
    let mut out = Vec::new();
    for rec in rd.records() {
        let v = rec?
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        out.push(RescaledRecord { record: TimeSeriesRecord::from_values(&v)?, tbar: v[12], fbar: v[13], kresc: v[14] });
    }
    Ok(out)
}
