//! Zeroth-order (reaction) terms of the evolution equations and their bounds.
//!
//! With `R₁ = Σ(tr AᵅAᵝ)² + |R⊥|²` and `R₂ = Σ_ij ⟨A_ij, H⟩²`, the reaction
//! part of `(∂t − Δ)f` is `2(cR₂ − R₁)`. Background curvature terms are
//! dropped in flat space and evaluated exactly for a space form.

use serde::{Deserialize, Serialize};

use crate::bound::Sides;
use crate::error::{Error, Result};
use crate::pinching::{Background, PinchingConstants};
use crate::tensor_core::{FormAnalysis, MeanCurvature, SecondFundamentalForm};

/// `Σ_{αβ} (Σ_ij Aᵅ_ij Aᵝ_ij)²`.
pub fn gram_norm2(a: &SecondFundamentalForm) -> f64 {
    let m = a.dims().m();
    let mut total = 0.0;
    for al in 0..m {
        for be in al..m {
            let g: f64 = a.slot(al).iter().zip(a.slot(be)).map(|(x, y)| x * y).sum();
            total += if al == be { g * g } else { 2.0 * g * g };
        }
    }
    total
}

/// `R₁ = Σ(tr AᵅAᵝ)² + Σ_{ijαβ}(Σ_p Aᵅ_ip Aᵝ_jp − Aᵅ_jp Aᵝ_ip)²`.
pub fn r1(a: &SecondFundamentalForm) -> f64 {
    gram_norm2(a) + crate::tensor_core::commutator_norm2(a)
}

/// `R₂ = Σ_ij (Σ_α Hᵅ Aᵅ_ij)²`.
pub fn r2(a: &SecondFundamentalForm, h: &MeanCurvature) -> f64 {
    let d = a.dims();
    let n = d.n();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v: f64 = (0..d.m()).map(|al| h.vector()[al] * a.get(al, i, j)).sum();
            total += v * v;
        }
    }
    total
}

/// `c R₂ − R₁`.
pub fn reaction_gap(a: &SecondFundamentalForm, h: &MeanCurvature, c: f64) -> f64 {
    c * r2(a, h) - r1(a)
}

/// Every reaction quantity of one form, split along the principal normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReactionParts {
    pub r1: f64,
    pub r2: f64,
    /// `|R⊥|²` over all index quadruples.
    pub normal2: f64,
    /// `Σ|⟨A⁻_ij, A⁻_pq⟩|²`.
    pub gram_minus: f64,
    /// `|R̂⊥|²`.
    pub hat2: f64,
    /// `Σ_ij |R⊥_ij(ν₁)|²`.
    pub principal2: f64,
    /// `Σ_ij |h̊_ij A⁻_ij|² = |Σ_ij h̊_ij A⁻_ij|²`.
    pub cross2: f64,
    pub a2: f64,
    pub mean2: f64,
    pub h2: f64,
    pub a_minus2: f64,
    pub h_ring2: f64,
    pub a_ring2: f64,
}

impl ReactionParts {
    pub fn new(x: &FormAnalysis) -> Self {
        let d = x.dims();
        let (n, m) = (d.n(), d.m());
        let am = x.decomp.a_minus();
        let mut cross2 = 0.0;
        for al in 0..m {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += x.decomp.h_ring_at(i, j) * am.get(al, i, j);
                }
            }
            cross2 += s * s;
        }
        let nm = x.norms();
        Self {
            r1: gram_norm2(&x.form) + x.normal.full_norm2(),
            r2: r2(&x.form, &x.mean),
            normal2: x.normal.full_norm2(),
            gram_minus: gram_norm2(am),
            hat2: x.normal.hat_part_norm2(),
            principal2: x.normal.principal_norm2(),
            cross2,
            a2: nm.a2,
            mean2: nm.mean2,
            h2: nm.h2,
            a_minus2: nm.a_minus2,
            h_ring2: nm.h_ring2,
            a_ring2: nm.a_ring2,
        }
    }

    pub fn gap(&self, c: f64) -> f64 {
        c * self.r2 - self.r1
    }

    /// `Σ|h̊_ij A⁻_ij|² + Σ|R⊥_ij(ν₁)|² ≤ 2|h̊|²|A⁻|²`.
    pub fn principal_commutator(&self) -> Sides {
        Sides::new(self.cross2 + self.principal2, 2.0 * self.h_ring2 * self.a_minus2)
    }

    /// `Σ|⟨A⁻_ij, A⁻_pq⟩|² + |R̂⊥|² ≤ (3/2)|A⁻|⁴`.
    pub fn minus_li(&self) -> Sides {
        Sides::new(self.gram_minus + self.hat2, 1.5 * self.a_minus2 * self.a_minus2)
    }

    /// Reaction terms of `(∂t − Δ)|A⁻|²` against `(3/2)|A⁻|⁴ + 2|h̊|²|A⁻|²`.
    pub fn minus_reaction_upper(&self) -> Sides {
        Sides::new(
            self.minus_reaction(),
            1.5 * self.a_minus2 * self.a_minus2 + 2.0 * self.h_ring2 * self.a_minus2,
        )
    }

    /// `Σ|⟨A⁻,A⁻⟩|² + |R̂⊥|² + Σ|R⊥(ν₁)|²`.
    pub fn minus_reaction(&self) -> f64 {
        self.gram_minus + self.hat2 + self.principal2
    }
}

fn nc_minus_one(n: usize, c: f64) -> f64 {
    n as f64 * c - 1.0
}

fn require_flat_pinched(x: &FormAnalysis, k: &PinchingConstants, parts: &ReactionParts) -> Result<f64> {
    if k.dims() != x.dims() {
        return Err(Error::InvalidConstants("constants were built for other dimensions".into()));
    }
    let n = x.dims().n() as f64;
    if !(k.c() > 1.0 / n && k.c() <= 4.0 / (3.0 * n)) {
        return Err(Error::InvalidConstants(format!("c = {} outside (1/n, 4/(3n)]", k.c())));
    }
    let f = k.f(parts.a2, parts.mean2);
    if f > 0.0 {
        Ok(f)
    } else {
        Err(Error::NotPinched(f))
    }
}

/// `(|A⁻|²/f)(cR₂ − R₁) ≥ (2/(nc−1))|A⁻|⁴ + (nc/(nc−1))|h̊|²|A⁻|²`.
pub fn f_reaction_lower_weighted(x: &FormAnalysis, k: &PinchingConstants) -> Result<Sides> {
    let p = ReactionParts::new(x);
    let f = require_flat_pinched(x, k, &p)?;
    let e = nc_minus_one(x.dims().n(), k.c());
    let small = 2.0 / e * p.a_minus2 * p.a_minus2 + (e + 1.0) / e * p.h_ring2 * p.a_minus2;
    Ok(Sides::at_least(p.a_minus2 / f * p.gap(k.c()), small))
}

/// Result of a reaction bound evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactionReport {
    pub r1: f64,
    pub r2: f64,
    pub reaction_gap: f64,
    pub lhs_bound: f64,
    pub rhs_bound: f64,
    pub slack: f64,
    pub context: String,
}

impl ReactionReport {
    fn new(p: &ReactionParts, c: f64, s: Sides, context: &str) -> Self {
        Self {
            r1: p.r1,
            r2: p.r2,
            reaction_gap: p.gap(c),
            lhs_bound: s.lhs,
            rhs_bound: s.rhs,
            slack: s.slack(),
            context: context.to_string(),
        }
    }

    pub fn sides(&self) -> Sides {
        Sides::new(self.lhs_bound, self.rhs_bound)
    }
}

/// `cR₂ − R₁ ≥ (2/(nc−1)) f|A⁻|² + (nc/(nc−1)) f|h̊|²` in flat space.
/// Requires `f > 0`, `1/n < c ≤ 4/(3n)` and `d ≥ 0`.
pub fn f_reaction_lower_bound(x: &FormAnalysis, k: &PinchingConstants) -> Result<ReactionReport> {
    let p = ReactionParts::new(x);
    let f = require_flat_pinched(x, k, &p)?;
    if k.d() < 0.0 {
        return Err(Error::InvalidConstants("d must be nonnegative".into()));
    }
    let e = nc_minus_one(x.dims().n(), k.c());
    let lower = 2.0 / e * f * p.a_minus2 + (e + 1.0) / e * f * p.h_ring2;
    Ok(ReactionReport::new(&p, k.c(), Sides::new(lower, p.gap(k.c())), "flat"))
}

/// `minus_reaction ≤ (1 − δ)(|A⁻|²/f)(cR₂ − R₁)` for `0 < δ ≤ 1/2`.
pub fn reaction_balance(x: &FormAnalysis, k: &PinchingConstants, delta: f64) -> Result<Sides> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::InvalidConstants(format!("delta = {delta} outside (0, 1/2]")));
    }
    let p = ReactionParts::new(x);
    let f = require_flat_pinched(x, k, &p)?;
    Ok(Sides::new(p.minus_reaction(), (1.0 - delta) * p.a_minus2 / f * p.gap(k.c())))
}

/// Upper bound for `2R₁ − 2cR₂` valid on the boundary `|A|² = c|H|² − d`:
/// `(6 − 2/(ne))|h̊|²|A⁻|² + (3 − 2/(ne))|A⁻|⁴ − (2cd/e)|h̊|² − (4d/(ne))|A⁻|² − 2d²/(ne)`
/// with `e = c − 1/n`. Off the boundary the returned sides are meaningless;
/// callers check `boundary_residual`.
pub fn boundary_reaction_bound(x: &FormAnalysis, c: f64, d: f64) -> Result<ReactionReport> {
    let n = x.dims().n() as f64;
    let e = c - 1.0 / n;
    if !(e > 0.0) {
        return Err(Error::InvalidConstants(format!("c = {c} must exceed 1/n")));
    }
    let p = ReactionParts::new(x);
    let g = 2.0 / (n * e);
    let (hr, am) = (p.h_ring2, p.a_minus2);
    let rhs = (6.0 - g) * hr * am + (3.0 - g) * am * am - 2.0 * c * d / e * hr - 2.0 * g * d * am - g * d * d;
    let lhs = 2.0 * p.r1 - 2.0 * c * p.r2;
    Ok(ReactionReport::new(&p, c, Sides::new(lhs, rhs), "boundary"))
}

/// `|A|² − c|H|² + d`, zero on the pinching boundary.
pub fn boundary_residual(x: &FormAnalysis, c: f64, d: f64) -> f64 {
    let nm = x.norms();
    nm.a2 - c * nm.mean2 + d
}

/// Reaction estimate in a space form of curvature `K̄`, plus the blow-up
/// comparison when its hypotheses hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFormReactionReport {
    pub report: ReactionReport,
    pub q: f64,
    /// `lhs ≤ −(2/n)/(c − 1/n)·Q²`, present when `Q ≤ 0`,
    /// `c ≤ min{4/(3n), 3/(n+2)}`, `d ≥ 2n − 2/c` and `K̄ ≤ 0`.
    pub blowup: Option<Sides>,
}

/// Zeroth-order terms of `(∂t − Δ)Q` in a space form:
/// `lhs = 2R₁ − 2cR₂ − 2nK̄|Å|² − 2nK̄(c − 1/n)|H|²` against its upper bound
/// in terms of `|h̊|², |A⁻|², K̄` and `Q`.
pub fn space_form_reaction_bound(x: &FormAnalysis, k: &PinchingConstants) -> Result<SpaceFormReactionReport> {
    let kbar = match k.background() {
        Background::SpaceForm { kbar } => kbar,
        Background::Euclidean => 0.0,
        Background::Bounded { .. } => {
            return Err(Error::InvalidConstants("a constant-curvature background is required".into()))
        }
    };
    if k.dims() != x.dims() {
        return Err(Error::InvalidConstants("constants were built for other dimensions".into()));
    }
    let p = ReactionParts::new(x);
    Ok(space_form_terms(&p, x.dims().n(), k.c(), k.d(), kbar))
}

fn space_form_terms(p: &ReactionParts, n: usize, c: f64, d: f64, kbar: f64) -> SpaceFormReactionReport {
    let nf = n as f64;
    let e = c - 1.0 / nf;
    let g = 2.0 / nf / e;
    let s = d / nf / e;
    let q = p.a_ring2 - e * p.mean2 - d * kbar;
    let (hr, am) = (p.h_ring2, p.a_minus2);
    let lhs = 2.0 * p.r1 - 2.0 * c * p.r2 - 2.0 * nf * kbar * p.a_ring2 - 2.0 * nf * kbar * e * p.mean2;
    let rhs = (6.0 - g) * hr * am
        + (3.0 - g) * am * am
        + 2.0 * (s + d - 2.0 * nf) * kbar * hr
        + 4.0 * (s - nf) * kbar * am
        + 2.0 * (nf - s) * d * kbar * kbar
        + 2.0 * (1.0 + 1.0 / nf / e) * hr * q
        + g * q * (2.0 * am - q)
        + 2.0 * (nf - 2.0 * s) * kbar * q;
    let admissible = q <= 0.0
        && c <= (4.0 / (3.0 * nf)).min(3.0 / (nf + 2.0))
        && d >= 2.0 * nf - 2.0 / c
        && kbar <= 0.0;
    let blowup = admissible.then(|| Sides::new(lhs, -g * q * q));
    SpaceFormReactionReport {
        report: ReactionReport::new(p, c, Sides::new(lhs, rhs), "space_form"),
        q,
        blowup,
    }
}

/// Space-form report for `A = 0`, where the principal normal is undefined.
pub fn space_form_reaction_at_zero(n: usize, c: f64, d: f64, kbar: f64) -> SpaceFormReactionReport {
    let zero = ReactionParts {
        r1: 0.0,
        r2: 0.0,
        normal2: 0.0,
        gram_minus: 0.0,
        hat2: 0.0,
        principal2: 0.0,
        cross2: 0.0,
        a2: 0.0,
        mean2: 0.0,
        h2: 0.0,
        a_minus2: 0.0,
        h_ring2: 0.0,
        a_ring2: 0.0,
    };
    space_form_terms(&zero, n, c, d, kbar)
}
