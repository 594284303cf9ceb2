//! Catalogue of checked inequalities and their two-sided evaluation.

use serde::{Deserialize, Serialize};

use crate::bound::Sides;
use crate::error::{Error, Result};
use crate::pinching::{space_form_min_d, PinchingConstants};
use crate::reaction_terms::{self, ReactionParts};
use crate::tensor_core::{commutator_norm2, split_gradient, FormAnalysis, GradientSample, GradientSplit, SecondFundamentalForm};

/// Every inequality the verifier can check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    /// `Σ(tr BᵅBᵝ)² + Σ|[Bᵅ, Bᵝ]|² ≤ (3/2)(Σ|Bᵅ|²)²`.
    Li,
    /// Kato-type bound for `|∇⊥A|²` with a trace defect `w`.
    Kato,
    /// `|∇⊥A|² − |∇⊥H|²/n ≥ ((n−1)/(2n+1))|∇⊥A|² − (2n/((n−1)(2n+1)))|w|²`.
    KatoTraceless,
    /// `Σ|h̊_ij A⁻_ij|² + Σ|R⊥_ij(ν₁)|² ≤ 2|h̊|²|A⁻|²`.
    PrincipalCommutator,
    /// `Σ|⟨A⁻_ij, A⁻_pq⟩|² + |R̂⊥|² ≤ (3/2)|A⁻|⁴`.
    MinusLi,
    /// Sum of the previous two.
    MinusReactionUpper,
    /// `(|A⁻|²/f)(cR₂ − R₁) ≥ (2/(nc−1))|A⁻|⁴ + (nc/(nc−1))|h̊|²|A⁻|²`.
    FReactionLowerWeighted,
    /// `cR₂ − R₁ ≥ (2/(nc−1)) f|A⁻|² + (nc/(nc−1)) f|h̊|²`.
    FReactionLower,
    /// Reaction terms of `|A⁻|²` against `(1 − δ)(|A⁻|²/f)(cR₂ − R₁)`.
    ReactionBalance,
    /// Upper bound for `2R₁ − 2cR₂` on `|A|² = c|H|² − d`.
    BoundaryReaction,
    /// `cR₂ − R₁ ≥ 0` for pinched forms.
    ReactionGapNonneg,
    /// Zeroth-order terms of `(∂t − Δ)Q` in a space form.
    SpaceFormReaction,
    /// Same terms bounded by `−(2/n)/(c − 1/n)·Q²` when `Q ≤ 0`.
    SpaceFormBlowup,
    /// `(3/(n+2))|H|²|∇⊥ν₁|² ≤ Σ|∇̂⊥A⁻ + h∇⊥ν₁|²`.
    TracePerp,
    /// `(2(n−1)/(n(n+2)))|∇|H||² ≤ |⟨∇⊥Å, ν₁⟩|²`.
    TraceAbsMean,
    /// `(2(n−1)/(n(n+2)))|H|²|∇⊥ν₁|² ≤ Σ|∇̂⊥A⁻ + h̊∇⊥ν₁|²`.
    TracePerpRing,
    /// Lower bound for `2|∇̂⊥A⁻|²`.
    BochnerMinus,
    /// Lower bound for `2(|A⁻|²/f)(|∇⊥A|² − c|∇⊥H|²)`.
    BochnerF,
    /// Upper bound for `4ΣQ_ijk⟨A⁻_ij, ∇⊥_k ν₁⟩`.
    QPairingUpper,
    /// `4ΣQ⟨A⁻, ∇⊥ν₁⟩ ≤ 2|∇⊥A⁻|² + 2(1 − δ)(|A⁻|²/f)(|∇⊥A|² − c|∇⊥H|²)`.
    GradientBalance,
}

/// Named groups of lemmas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Li,
    Kato,
    Reaction,
    Gradient,
    All,
}

impl Suite {
    pub fn lemmas(self) -> Vec<LemmaId> {
        use LemmaId::*;
        match self {
            Suite::Li => vec![Li],
            Suite::Kato => vec![Kato, KatoTraceless],
            Suite::Reaction => vec![
                PrincipalCommutator,
                MinusLi,
                MinusReactionUpper,
                FReactionLowerWeighted,
                FReactionLower,
                ReactionBalance,
                BoundaryReaction,
                ReactionGapNonneg,
                SpaceFormReaction,
                SpaceFormBlowup,
            ],
            Suite::Gradient => vec![
                TracePerp,
                TraceAbsMean,
                TracePerpRing,
                BochnerMinus,
                BochnerF,
                QPairingUpper,
                GradientBalance,
            ],
            Suite::All => [Suite::Li, Suite::Kato, Suite::Reaction, Suite::Gradient]
                .into_iter()
                .flat_map(Suite::lemmas)
                .collect(),
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "li" => Suite::Li,
            "kato" => Suite::Kato,
            "reaction" => Suite::Reaction,
            "gradient" => Suite::Gradient,
            "all" => Suite::All,
            other => return Err(Error::Parse(format!("unknown suite `{other}`"))),
        })
    }
}

impl LemmaId {
    pub const ALL: [LemmaId; 20] = [
        LemmaId::Li,
        LemmaId::Kato,
        LemmaId::KatoTraceless,
        LemmaId::PrincipalCommutator,
        LemmaId::MinusLi,
        LemmaId::MinusReactionUpper,
        LemmaId::FReactionLowerWeighted,
        LemmaId::FReactionLower,
        LemmaId::ReactionBalance,
        LemmaId::BoundaryReaction,
        LemmaId::ReactionGapNonneg,
        LemmaId::SpaceFormReaction,
        LemmaId::SpaceFormBlowup,
        LemmaId::TracePerp,
        LemmaId::TraceAbsMean,
        LemmaId::TracePerpRing,
        LemmaId::BochnerMinus,
        LemmaId::BochnerF,
        LemmaId::QPairingUpper,
        LemmaId::GradientBalance,
    ];

    pub fn as_str(self) -> &'static str {
        use LemmaId::*;
        match self {
            Li => "li",
            Kato => "kato",
            KatoTraceless => "kato_traceless",
            PrincipalCommutator => "principal_commutator",
            MinusLi => "minus_li",
            MinusReactionUpper => "minus_reaction_upper",
            FReactionLowerWeighted => "f_reaction_lower_weighted",
            FReactionLower => "f_reaction_lower",
            ReactionBalance => "reaction_balance",
            BoundaryReaction => "boundary_reaction",
            ReactionGapNonneg => "reaction_gap_nonneg",
            SpaceFormReaction => "space_form_reaction",
            SpaceFormBlowup => "space_form_blowup",
            TracePerp => "trace_perp",
            TraceAbsMean => "trace_abs_mean",
            TracePerpRing => "trace_perp_ring",
            BochnerMinus => "bochner_minus",
            BochnerF => "bochner_f",
            QPairingUpper => "q_pairing_upper",
            GradientBalance => "gradient_balance",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown lemma `{s}`")))
    }

    /// What a trial of this lemma consumes.
    pub fn input_kind(self) -> InputKind {
        use LemmaId::*;
        match self {
            Li => InputKind::Matrices,
            Kato | KatoTraceless => InputKind::DefectGradient,
            TracePerp | TraceAbsMean | TracePerpRing | BochnerMinus | BochnerF | QPairingUpper | GradientBalance => {
                InputKind::FormAndGradient
            }
            _ => InputKind::Form,
        }
    }

    /// Polynomial degree of both sides under the natural scaling
    /// (`A → λA, d → λ²d` for forms; `T → λT` for gradients with `A` fixed).
    pub fn homogeneity_degree(self) -> i32 {
        use LemmaId::*;
        match self {
            Li => 4,
            Kato | KatoTraceless | TracePerp | TraceAbsMean | TracePerpRing | BochnerMinus | BochnerF
            | QPairingUpper | GradientBalance => 2,
            _ => 4,
        }
    }
}

impl std::fmt::Display for LemmaId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    Matrices,
    DefectGradient,
    Form,
    FormAndGradient,
}

/// Constants shared by a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CampaignConstants {
    pub c: f64,
    pub d: f64,
    pub delta: f64,
    /// Space-form curvature for the space-form lemmas.
    pub kbar: f64,
    /// Kato parameter; `None` means `(n−1)/(n(n+2))`.
    pub eta: Option<f64>,
}

impl CampaignConstants {
    /// `c = 4/(3n)`, `δ = 1/(5n−8)` when `n ≥ 8`; otherwise
    /// `c = 3(n+1)/(2n(n+2)) − ε₀` with `ε₀ = (n−1)/(20n(n+2))` and
    /// `δ = min{1/2, 2n(n+2)ε₀/(3(n−1))}`. Always `d = 0`, `K̄ = −1`.
    pub fn defaults(n: usize) -> Self {
        let nf = n as f64;
        let (c, delta) = if n >= 8 {
            (4.0 / (3.0 * nf), 1.0 / (5.0 * nf - 8.0))
        } else {
            let eps0 = 0.1 * (nf - 1.0) / (2.0 * nf * (nf + 2.0));
            let c = additional_pinching_cap(n) - eps0;
            (c, 0.5f64.min(additional_epsilon(n, c)))
        };
        Self { c, d: 0.0, delta, kbar: -1.0, eta: None }
    }

    /// Offset used by the space-form lemmas: `max{d, 2n − 2/c, 0}`.
    pub fn space_form_d(&self, n: usize) -> f64 {
        self.d.max(space_form_min_d(n, self.c)).max(0.0)
    }

    pub fn eta_for(&self, n: usize) -> f64 {
        self.eta.unwrap_or_else(|| kato_eta(n))
    }
}

/// `η = (n−1)/(n(n+2))`.
pub fn kato_eta(n: usize) -> f64 {
    let nf = n as f64;
    (nf - 1.0) / (nf * (nf + 2.0))
}

/// `Σ(tr BᵅBᵝ)² + Σ|[Bᵅ, Bᵝ]|² ≤ (3/2)(Σ|Bᵅ|²)²` for the slots of `b`.
pub fn li_sides(b: &SecondFundamentalForm) -> Sides {
    let s = b.norm2();
    Sides::new(reaction_terms::gram_norm2(b) + commutator_norm2(b), 1.5 * s * s)
}

fn check_defect(grad: &GradientSample, w: &[f64]) -> Result<()> {
    let defect = grad.trace_defect();
    if defect.len() != w.len() {
        return Err(Error::ShapeMismatch { expected: defect.len(), got: w.len() });
    }
    let scale = 1f64.max(grad.components().iter().fold(0.0, |a: f64, x| a.max(x.abs())));
    let worst = defect.iter().zip(w).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    if worst > 1e-9 * scale {
        return Err(Error::InvalidSample(format!("w differs from the trace defect of the sample by {worst:e}")));
    }
    Ok(())
}

/// `|∇⊥A|² ≥ (3/(n+2) − η)|∇⊥H|² − (2/(n+2))((2/(n+2))η⁻¹ − n/(n−1))|w|²`,
/// where `w` must equal the sample's trace defect.
pub fn kato_sides(grad: &GradientSample, w: &[f64], eta: f64) -> Result<Sides> {
    if !(eta > 0.0) {
        return Err(Error::InvalidConstants(format!("eta = {eta} must be positive")));
    }
    check_defect(grad, w)?;
    let nf = grad.dims().n() as f64;
    let g2: f64 = grad.mean_curvature_gradient().iter().map(|x| x * x).sum();
    let w2: f64 = w.iter().map(|x| x * x).sum();
    let small = (3.0 / (nf + 2.0) - eta) * g2 - 2.0 / (nf + 2.0) * (2.0 / ((nf + 2.0) * eta) - nf / (nf - 1.0)) * w2;
    Ok(Sides::at_least(grad.norm2(), small))
}

/// `|∇⊥A|² − |∇⊥H|²/n ≥ ((n−1)/(2n+1))|∇⊥A|² − (2n/((n−1)(2n+1)))|w|²`.
pub fn kato_traceless_sides(grad: &GradientSample, w: &[f64]) -> Result<Sides> {
    check_defect(grad, w)?;
    let nf = grad.dims().n() as f64;
    let a2 = grad.norm2();
    let g2: f64 = grad.mean_curvature_gradient().iter().map(|x| x * x).sum();
    let w2: f64 = w.iter().map(|x| x * x).sum();
    Ok(Sides::at_least(
        a2 - g2 / nf,
        (nf - 1.0) / (2.0 * nf + 1.0) * a2 - 2.0 * nf / ((nf - 1.0) * (2.0 * nf + 1.0)) * w2,
    ))
}

/// Which of the two constant regimes a gradient lemma is checked in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientCase {
    /// `1/n < c ≤ 4/(3n)` (with `n ≥ 8`, `δ ≤ 1/(5n−8)` for the balance).
    Quartic,
    /// `1/n < c ≤ 3(n+1)/(2n(n+2)) − ε₀`.
    Additional,
}

/// `3(n+1)/(2n(n+2))`.
pub fn additional_pinching_cap(n: usize) -> f64 {
    let nf = n as f64;
    3.0 * (nf + 1.0) / (2.0 * nf * (nf + 2.0))
}

/// `ε = 2n(n+2)ε₀/(3(n−1))` with `ε₀ = 3(n+1)/(2n(n+2)) − c`.
pub fn additional_epsilon(n: usize, c: f64) -> f64 {
    let nf = n as f64;
    2.0 * nf * (nf + 2.0) * (additional_pinching_cap(n) - c) / (3.0 * (nf - 1.0))
}

/// Picks the regime for `lemma` given `(n, c, δ)`; `None` for lemmas
/// without regimes. Errors when no regime admits the constants.
pub fn select_case(lemma: LemmaId, n: usize, c: f64, delta: f64) -> Result<Option<GradientCase>> {
    use LemmaId::*;
    let nf = n as f64;
    if !(c > 1.0 / nf) {
        return Err(Error::InvalidConstants(format!("c = {c} must exceed 1/n")));
    }
    let quartic = c <= 4.0 / (3.0 * nf);
    let cap = additional_pinching_cap(n);
    let bad = || Error::InvalidConstants(format!("no regime of `{lemma}` admits n = {n}, c = {c}, delta = {delta}"));
    Ok(match lemma {
        BochnerMinus | BochnerF => Some(if quartic {
            GradientCase::Quartic
        } else if c <= cap {
            GradientCase::Additional
        } else {
            return Err(bad());
        }),
        QPairingUpper => Some(if quartic && n > 3 {
            GradientCase::Quartic
        } else if c < cap {
            GradientCase::Additional
        } else {
            return Err(bad());
        }),
        GradientBalance => {
            if !(delta > 0.0) {
                return Err(bad());
            }
            Some(if n >= 8 && quartic && delta <= 1.0 / (5.0 * nf - 8.0) {
                GradientCase::Quartic
            } else if c < cap && delta <= 0.5f64.min(additional_epsilon(n, c)) {
                GradientCase::Additional
            } else {
                return Err(bad());
            })
        }
        _ => None,
    })
}

/// Checks that `case` admits the constants.
pub fn case_admits(lemma: LemmaId, case: GradientCase, n: usize, c: f64, delta: f64) -> bool {
    let nf = n as f64;
    let cap = additional_pinching_cap(n);
    if !(c > 1.0 / nf) {
        return false;
    }
    match (lemma, case) {
        (LemmaId::BochnerMinus | LemmaId::BochnerF, GradientCase::Quartic) => c <= 4.0 / (3.0 * nf),
        (LemmaId::BochnerMinus | LemmaId::BochnerF, GradientCase::Additional) => c <= cap,
        (LemmaId::QPairingUpper, GradientCase::Quartic) => c <= 4.0 / (3.0 * nf) && n > 3,
        (LemmaId::QPairingUpper, GradientCase::Additional) => c < cap,
        (LemmaId::GradientBalance, GradientCase::Quartic) => {
            n >= 8 && c <= 4.0 / (3.0 * nf) && delta > 0.0 && delta <= 1.0 / (5.0 * nf - 8.0)
        }
        (LemmaId::GradientBalance, GradientCase::Additional) => {
            c < cap && delta > 0.0 && delta <= 0.5f64.min(additional_epsilon(n, c))
        }
        _ => false,
    }
}

/// Both sides of a gradient inequality. `split` must come from `x`.
pub fn gradient_sides(
    lemma: LemmaId,
    case: Option<GradientCase>,
    x: &FormAnalysis,
    split: &GradientSplit,
    c: f64,
    d: f64,
    delta: f64,
) -> Result<Sides> {
    use GradientCase::*;
    use LemmaId::*;
    let n = x.dims().n();
    let nf = n as f64;
    let nm = x.norms();
    let g = &split.norms;
    let nu = g.nu1_grad2;
    let (am, hr) = (nm.a_minus2, nm.h_ring2);
    let f = c * nm.mean2 - nm.a2 - d;
    let needs_f = !matches!(lemma, TracePerp | TraceAbsMean | TracePerpRing);
    if needs_f {
        if !(f > 0.0) {
            return Err(Error::NotPinched(f));
        }
        if d < 0.0 {
            return Err(Error::InvalidConstants("d must be nonnegative".into()));
        }
    }
    let need_case = || case.ok_or_else(|| Error::InvalidConstants(format!("`{lemma}` needs a regime")));
    let ring = g.a_ring_grad_nu1_2;
    let tau = 2.0 * (nf - 1.0) / (nf * (nf + 2.0));
    Ok(match lemma {
        TracePerp => Sides::at_least(g.perp_sym2, 3.0 / (nf + 2.0) * nm.mean2 * nu),
        TraceAbsMean => Sides::at_least(ring, tau * g.grad_abs_mean2),
        TracePerpRing => Sides::at_least(g.perp_sym_ring2, tau * nm.mean2 * nu),
        BochnerMinus => {
            let big = 2.0 * g.a_minus_grad_hat2;
            match need_case()? {
                Quartic => Sides::at_least(
                    big,
                    (4.0 * nf - 10.0) / (nf + 2.0) * hr * nu + 6.0 * (nf - 1.0) / (nf + 2.0) * (am + f + d) * nu,
                ),
                Additional => Sides::at_least(big, 2.0 * hr * nu + 4.0 * (am + f + d) * nu),
            }
        }
        BochnerF => {
            let big = 2.0 * am / f * (g.grad_a2 - c * g.grad_mean2);
            match need_case()? {
                Quartic => Sides::at_least(
                    big,
                    (5.0 * nf - 8.0) / (3.0 * (nf - 1.0)) * am / f * ring + (10.0 * nf - 16.0) / (nf + 2.0) * am * nu,
                ),
                Additional => Sides::at_least(big, 1.5 * am / f * ring + 6.0 * am * nu),
            }
        }
        QPairingUpper => {
            let lhs = 4.0 * g.q_pairing;
            let base = 2.0 * g.a_minus_grad_nu1_2 + 2.0 * am * nu;
            match need_case()? {
                Quartic => Sides::new(
                    lhs,
                    base + (5.0 * nf - 9.0) / (3.0 * (nf - 1.0)) * am / f * ring
                        + 3.0 * (nf - 1.0) / (nf - 3.0) * f * nu
                        + 2.0 * (nf + 2.0) / (nf + 3.0) * hr * nu,
                ),
                Additional => {
                    let eps = additional_epsilon(n, c);
                    Sides::new(lhs, base + (1.0 - eps) * 1.5 * am / f * ring + 4.0 * f * nu + 2.0 * hr * nu)
                }
            }
        }
        GradientBalance => {
            need_case()?;
            Sides::new(
                4.0 * g.q_pairing,
                2.0 * g.a_minus_grad2 + 2.0 * (1.0 - delta) * am / f * (g.grad_a2 - c * g.grad_mean2),
            )
        }
        other => return Err(Error::InvalidConstants(format!("`{other}` is not a gradient inequality"))),
    })
}

/// Both sides of a form-only inequality.
pub fn form_sides(lemma: LemmaId, x: &FormAnalysis, k: &CampaignConstants) -> Result<Sides> {
    use LemmaId::*;
    let dims = x.dims();
    let n = dims.n();
    let euclid = || PinchingConstants::euclidean(dims, k.c, k.d);
    let space = || PinchingConstants::space_form(dims, k.c, k.space_form_d(n), k.kbar);
    Ok(match lemma {
        PrincipalCommutator => ReactionParts::new(x).principal_commutator(),
        MinusLi => ReactionParts::new(x).minus_li(),
        MinusReactionUpper => ReactionParts::new(x).minus_reaction_upper(),
        FReactionLowerWeighted => reaction_terms::f_reaction_lower_weighted(x, &euclid()?)?,
        FReactionLower => reaction_terms::f_reaction_lower_bound(x, &euclid()?)?.sides(),
        ReactionBalance => reaction_terms::reaction_balance(x, &euclid()?, k.delta)?,
        BoundaryReaction => reaction_terms::boundary_reaction_bound(x, k.c, k.d)?.sides(),
        ReactionGapNonneg => {
            let kk = euclid()?;
            let p = ReactionParts::new(x);
            let f = kk.f(p.a2, p.mean2);
            if f < 0.0 {
                return Err(Error::NotPinched(f));
            }
            if !(k.c <= 4.0 / (3.0 * n as f64)) {
                return Err(Error::InvalidConstants(format!("c = {} exceeds 4/(3n)", k.c)));
            }
            Sides::at_least(p.gap(k.c), 0.0)
        }
        SpaceFormReaction => reaction_terms::space_form_reaction_bound(x, &space()?)?.report.sides(),
        SpaceFormBlowup => {
            let r = reaction_terms::space_form_reaction_bound(x, &space()?)?;
            r.blowup.ok_or_else(|| {
                Error::InvalidConstants(format!("blow-up comparison needs Q ≤ 0 and admissible constants (Q = {})", r.q))
            })?
        }
        other => return Err(Error::InvalidConstants(format!("`{other}` is not a form inequality"))),
    })
}

/// Both sides of a gradient inequality for a raw form and gradient sample.
pub fn gradient_lemma_sides(
    lemma: LemmaId,
    case: Option<GradientCase>,
    form: &SecondFundamentalForm,
    grad: &GradientSample,
    k: &CampaignConstants,
) -> Result<Sides> {
    let x = FormAnalysis::new(form.clone())?;
    let split = split_gradient(&x.decomp, grad)?;
    gradient_sides(lemma, case, &x, &split, k.c, k.d, k.delta)
}
