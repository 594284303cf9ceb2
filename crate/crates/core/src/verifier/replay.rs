//! Trial inputs, digests, counterexample files and shrinking.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::lemmas::{CampaignConstants, LemmaId};
use crate::bound::Sides;
use crate::error::{Error, Result};
use crate::tensor_core::{Dims, GradientSample};

/// Raw numbers consumed by one trial. Unused parts are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialInput {
    pub dims: Dims,
    /// Components of the form (or matrix family), slot-major.
    pub form: Vec<f64>,
    /// Components of the gradient sample.
    pub grad: Vec<f64>,
    /// Trace defect accompanying `grad`.
    pub w: Vec<f64>,
}

impl TrialInput {
    /// Lowercase hex SHA-256 of the dimensions and the little-endian bytes
    /// of every entry.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.dims.n() as u64).to_le_bytes());
        h.update((self.dims.m() as u64).to_le_bytes());
        for part in [&self.form, &self.grad, &self.w] {
            h.update((part.len() as u64).to_le_bytes());
            for x in part {
                h.update(x.to_le_bytes());
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn grad_fully_symmetric(&self) -> bool {
        if self.grad.is_empty() {
            return false;
        }
        GradientSample::new(self.dims, self.grad.clone()).is_ok_and(|g| g.codazzi_defect() == 0.0)
    }

    /// Independent entries: the upper triangle of each form slot, then the
    /// gradient entries up to its symmetry. `w` is derived from the gradient.
    pub fn free_entries(&self) -> Vec<f64> {
        let (n, m) = (self.dims.n(), self.dims.m());
        let mut out = Vec::new();
        if !self.form.is_empty() {
            for a in 0..m {
                for i in 0..n {
                    for j in i..n {
                        out.push(self.form[(a * n + i) * n + j]);
                    }
                }
            }
        }
        if !self.grad.is_empty() {
            let sym = self.grad_fully_symmetric();
            for (a, i, j, k) in grad_orbits(n, m, sym) {
                out.push(self.grad[((a * n + i) * n + j) * n + k]);
            }
        }
        out
    }

    /// Inverse of [`TrialInput::free_entries`], keeping the symmetry class of `self`.
    pub fn with_free_entries(&self, entries: &[f64]) -> Self {
        let (n, m) = (self.dims.n(), self.dims.m());
        let mut it = entries.iter().copied();
        let mut form = self.form.clone();
        if !form.is_empty() {
            for a in 0..m {
                for i in 0..n {
                    for j in i..n {
                        let v = it.next().expect("entry count");
                        form[(a * n + i) * n + j] = v;
                        form[(a * n + j) * n + i] = v;
                    }
                }
            }
        }
        let mut grad = self.grad.clone();
        let mut w = self.w.clone();
        if !grad.is_empty() {
            let sym = self.grad_fully_symmetric();
            for (a, i, j, k) in grad_orbits(n, m, sym) {
                let v = it.next().expect("entry count");
                let idx = |i: usize, j: usize, k: usize| ((a * n + i) * n + j) * n + k;
                if sym {
                    for (p, q, r) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                        grad[idx(p, q, r)] = v;
                    }
                } else {
                    grad[idx(i, j, k)] = v;
                    grad[idx(i, k, j)] = v;
                }
            }
            if !w.is_empty() {
                w = GradientSample::new(self.dims, grad.clone())
                    .map(|g| g.trace_defect())
                    .unwrap_or(w);
            }
        }
        Self { dims: self.dims, form, grad, w }
    }
}

fn grad_orbits(n: usize, m: usize, fully_symmetric: bool) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for a in 0..m {
        for i in 0..n {
            let j0 = if fully_symmetric { i } else { 0 };
            for j in j0..n {
                for k in j..n {
                    out.push((a, i, j, k));
                }
            }
        }
    }
    out
}

/// Greedy shrink: each entry is replaced by `0`, else by half its value,
/// as long as `still_fails` holds. Repeats until a full pass changes nothing
/// or `max_passes` is reached.
pub fn shrink(mut entries: Vec<f64>, still_fails: impl Fn(&[f64]) -> bool, max_passes: usize) -> Vec<f64> {
    for _ in 0..max_passes {
        let mut changed = false;
        for idx in 0..entries.len() {
            let v = entries[idx];
            if v == 0.0 {
                continue;
            }
            for candidate in [0.0, v / 2.0] {
                entries[idx] = candidate;
                if still_fails(&entries) {
                    changed = true;
                    break;
                }
                entries[idx] = v;
            }
        }
        if !changed {
            break;
        }
    }
    entries
}

fn encode(v: &[f64]) -> Vec<String> {
    v.iter().map(|x| format!("{x:.16e}")).collect()
}

fn decode(v: &[String]) -> Result<Vec<f64>> {
    v.iter()
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}"))))
        .collect()
}

/// Replayable record of a violating trial. Numbers are stored as decimal
/// strings with 17 significant digits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub lemma_id: String,
    pub dims: Dims,
    pub constants: CampaignConstants,
    pub seed: u64,
    pub trial: u64,
    pub shrunk: bool,
    pub form: Vec<String>,
    pub grad: Vec<String>,
    pub w: Vec<String>,
    pub lhs: String,
    pub rhs: String,
}

impl Counterexample {
    pub fn new(lemma: LemmaId, input: &TrialInput, constants: CampaignConstants, seed: u64, trial: u64, shrunk: bool, sides: Sides) -> Self {
        Self {
            lemma_id: lemma.as_str().to_string(),
            dims: input.dims,
            constants,
            seed,
            trial,
            shrunk,
            form: encode(&input.form),
            grad: encode(&input.grad),
            w: encode(&input.w),
            lhs: format!("{:.16e}", sides.lhs),
            rhs: format!("{:.16e}", sides.rhs),
        }
    }

    pub fn lemma(&self) -> Result<LemmaId> {
        LemmaId::parse(&self.lemma_id)
    }

    pub fn input(&self) -> Result<TrialInput> {
        Ok(TrialInput {
            dims: self.dims,
            form: decode(&self.form)?,
            grad: decode(&self.grad)?,
            w: decode(&self.w)?,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Re-evaluates the stored input.
    pub fn replay(&self) -> Result<Sides> {
        super::evaluate(self.lemma()?, &self.input()?, &self.constants)
    }
}
