//! Seeded randomized checking of the algebraic inequalities.
//!
//! Each trial draws its input from a ChaCha8 stream keyed by the campaign
//! seed with the trial index as stream id, so trials are independent of
//! scheduling. Trials run on the rayon pool; results are reduced in trial
//! order.

pub mod lemmas;
pub mod replay;
pub mod sampling;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use lemmas::{
    additional_epsilon, additional_pinching_cap, case_admits, form_sides, gradient_lemma_sides, gradient_sides,
    kato_eta, kato_sides, kato_traceless_sides, li_sides, select_case, CampaignConstants, GradientCase, InputKind,
    LemmaId, Suite,
};
pub use replay::{shrink, Counterexample, TrialInput};
pub use sampling::{Distribution, SamplerSpec};

use crate::bound::{Sides, DEFAULT_REL_TOL};
use crate::error::{Error, Result};
use crate::tensor_core::{principal_decompose, Dims, FormAnalysis, GradientSample, SecondFundamentalForm};

/// Outcome of one lemma over a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub lemma_id: String,
    pub trials: u64,
    pub violations: u64,
    pub worst_slack: f64,
    pub worst_input_digest: String,
    pub seed: u64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaOutcome {
    pub result: CheckResult,
    /// First violating trial, shrunk.
    pub counterexample: Option<Counterexample>,
}

/// Default form distribution for `lemma`.
pub fn default_distribution(lemma: LemmaId, n: usize, k: &CampaignConstants) -> Distribution {
    use LemmaId::*;
    match lemma {
        Li | Kato | KatoTraceless | PrincipalCommutator | MinusLi | MinusReactionUpper | SpaceFormReaction => {
            Distribution::Gaussian { sigma: 1.0 }
        }
        BoundaryReaction => Distribution::Boundary { c: k.c, d: k.d },
        SpaceFormBlowup => Distribution::Pinched { c: k.c, d: -k.space_form_d(n) * k.kbar },
        _ => Distribution::Pinched { c: k.c, d: k.d },
    }
}

/// Draws the input of trial `trial`.
pub fn sample_input(lemma: LemmaId, dims: Dims, dist: Distribution, seed: u64, trial: u64) -> Result<TrialInput> {
    let mut r = sampling::trial_rng(seed, trial);
    let empty = Vec::new;
    Ok(match lemma.input_kind() {
        InputKind::Matrices | InputKind::Form => {
            let form = sampling::sample_form(&mut r, dims, dist)?;
            TrialInput { dims, form: form.components().to_vec(), grad: empty(), w: empty() }
        }
        InputKind::DefectGradient => {
            let (t, w) = sampling::kato_gradient(&mut r, dims);
            TrialInput { dims, form: empty(), grad: t.components().to_vec(), w }
        }
        InputKind::FormAndGradient => {
            let form = sampling::sample_form(&mut r, dims, dist)?;
            let decomp = principal_decompose(&form)?;
            let grad = sampling::codazzi_gradient(&mut r, dims, decomp.nu1());
            TrialInput { dims, form: form.components().to_vec(), grad: grad.components().to_vec(), w: empty() }
        }
    })
}

/// Relative distance from the boundary `|A|² = c|H|² − d` accepted by the
/// boundary lemma.
pub const BOUNDARY_REL_TOL: f64 = 1e-9;

/// Both sides of `lemma` on `input`. Errors when the input or constants do
/// not meet the lemma's hypotheses.
pub fn evaluate(lemma: LemmaId, input: &TrialInput, k: &CampaignConstants) -> Result<Sides> {
    let dims = input.dims;
    match lemma.input_kind() {
        InputKind::Matrices => Ok(li_sides(&SecondFundamentalForm::new(dims, input.form.clone())?)),
        InputKind::DefectGradient => {
            let t = GradientSample::new(dims, input.grad.clone())?;
            match lemma {
                LemmaId::Kato => kato_sides(&t, &input.w, k.eta_for(dims.n())),
                _ => kato_traceless_sides(&t, &input.w),
            }
        }
        InputKind::Form => {
            let x = FormAnalysis::new(SecondFundamentalForm::new(dims, input.form.clone())?)?;
            if lemma == LemmaId::BoundaryReaction {
                let nm = x.norms();
                let scale = nm.a2 + k.c * nm.mean2 + k.d.abs();
                let res = crate::reaction_terms::boundary_residual(&x, k.c, k.d);
                if res.abs() > BOUNDARY_REL_TOL * scale.max(1.0) {
                    return Err(Error::InvalidSample(format!("form is off the pinching boundary by {res:e}")));
                }
            }
            form_sides(lemma, &x, k)
        }
        InputKind::FormAndGradient => {
            let case = select_case(lemma, dims.n(), k.c, k.delta)?;
            let form = SecondFundamentalForm::new(dims, input.form.clone())?;
            let grad = GradientSample::new(dims, input.grad.clone())?;
            gradient_lemma_sides(lemma, case, &form, &grad, k)
        }
    }
}

/// Configuration of a seeded campaign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Campaign {
    pub dims: Dims,
    pub seed: u64,
    pub trials: u64,
    pub constants: CampaignConstants,
    pub rel_tol: f64,
    /// Replaces the per-lemma default distribution when set.
    pub distribution: Option<Distribution>,
    /// Shrink passes applied to the first violating input.
    pub shrink_passes: usize,
}

impl Campaign {
    /// Default constants for `dims.n()`, tolerance `1e−9`.
    pub fn new(dims: Dims, seed: u64, trials: u64) -> Self {
        Self {
            dims,
            seed,
            trials,
            constants: CampaignConstants::defaults(dims.n()),
            rel_tol: DEFAULT_REL_TOL,
            distribution: None,
            shrink_passes: 64,
        }
    }

    pub fn with_constants(mut self, constants: CampaignConstants) -> Self {
        self.constants = constants;
        self
    }

    pub fn distribution_for(&self, lemma: LemmaId) -> Distribution {
        self.distribution
            .unwrap_or_else(|| default_distribution(lemma, self.dims.n(), &self.constants))
    }

    pub fn input(&self, lemma: LemmaId, trial: u64) -> Result<TrialInput> {
        sample_input(lemma, self.dims, self.distribution_for(lemma), self.seed, trial)
    }

    fn trial(&self, lemma: LemmaId, trial: u64) -> Result<Sides> {
        let input = self.input(lemma, trial)?;
        evaluate(lemma, &input, &self.constants).map_err(|e| match e {
            Error::InvalidConstants(_) | Error::InvalidDims { .. } => e,
            other => Error::InvalidSample(format!("{lemma}, trial {trial}: {other}")),
        })
    }

    pub fn run_lemma(&self, lemma: LemmaId) -> Result<LemmaOutcome> {
        if lemma.input_kind() == InputKind::FormAndGradient {
            select_case(lemma, self.dims.n(), self.constants.c, self.constants.delta)?;
        }
        let sides: Vec<Sides> = (0..self.trials)
            .into_par_iter()
            .map(|t| self.trial(lemma, t))
            .collect::<Result<_>>()?;

        let mut violations = 0u64;
        let mut first_violation = None;
        let mut worst: Option<(u64, f64)> = None;
        for (t, s) in sides.iter().enumerate() {
            let t = t as u64;
            let slack = if s.lhs.is_finite() && s.rhs.is_finite() { s.slack() } else { f64::NEG_INFINITY };
            if s.violates(self.rel_tol) {
                violations += 1;
                first_violation.get_or_insert(t);
            }
            if worst.is_none_or(|(_, w)| slack < w) {
                worst = Some((t, slack));
            }
        }
        let (worst_slack, worst_input_digest) = match worst {
            Some((t, slack)) => (slack, self.input(lemma, t)?.digest()),
            None => (f64::INFINITY, String::new()),
        };
        let counterexample = first_violation
            .map(|t| self.counterexample(lemma, t, sides[t as usize]))
            .transpose()?;
        Ok(LemmaOutcome {
            result: CheckResult {
                lemma_id: lemma.as_str().to_string(),
                trials: self.trials,
                violations,
                worst_slack,
                worst_input_digest,
                seed: self.seed,
            },
            counterexample,
        })
    }

    fn counterexample(&self, lemma: LemmaId, trial: u64, sides: Sides) -> Result<Counterexample> {
        let input = self.input(lemma, trial)?;
        let fails = |x: &TrialInput| evaluate(lemma, x, &self.constants).is_ok_and(|s| s.violates(self.rel_tol));
        let shrunk_entries = shrink(input.free_entries(), |e| fails(&input.with_free_entries(e)), self.shrink_passes);
        let shrunk = input.with_free_entries(&shrunk_entries);
        let (best, changed) = if shrunk != input && fails(&shrunk) { (shrunk, true) } else { (input, false) };
        let s = evaluate(lemma, &best, &self.constants).unwrap_or(sides);
        Ok(Counterexample::new(lemma, &best, self.constants, self.seed, trial, changed, s))
    }

    pub fn run(&self, lemmas: &[LemmaId]) -> Result<Vec<LemmaOutcome>> {
        lemmas.iter().map(|&l| self.run_lemma(l)).collect()
    }
}

/// Runs `lemmas` with the dimensions, seed and form distribution of `spec`.
pub fn run_campaign(
    spec: SamplerSpec,
    lemmas: &[LemmaId],
    trials: u64,
    rel_tol: f64,
    constants: CampaignConstants,
) -> Result<Vec<CheckResult>> {
    let campaign = Campaign {
        rel_tol,
        distribution: Some(spec.distribution),
        ..Campaign::new(spec.dims, spec.seed, trials).with_constants(constants)
    };
    Ok(campaign.run(lemmas)?.into_iter().map(|o| o.result).collect())
}

/// Li inequality over `trials` Gaussian families of `dims.m()` matrices.
pub fn check_li(dims: Dims, trials: u64, seed: u64) -> Result<CheckResult> {
    Ok(Campaign::new(dims, seed, trials).run_lemma(LemmaId::Li)?.result)
}

/// Both Kato-type inequalities with parameter `eta`.
pub fn check_kato(dims: Dims, trials: u64, seed: u64, eta: f64) -> Result<Vec<CheckResult>> {
    let mut k = CampaignConstants::defaults(dims.n());
    k.eta = Some(eta);
    let c = Campaign::new(dims, seed, trials).with_constants(k);
    Ok(c.run(&Suite::Kato.lemmas())?.into_iter().map(|o| o.result).collect())
}
