mod common;

use common::{dims, product, random_form, rel_close, rng, sphere};
use pinchflow::pinching::PinchingConstants;
use pinchflow::reaction_terms::{
    boundary_reaction_bound, boundary_residual, f_reaction_lower_bound, f_reaction_lower_weighted,
    gram_norm2, r1, r2, reaction_balance, reaction_gap, space_form_reaction_at_zero,
    space_form_reaction_bound, ReactionParts,
};
use pinchflow::tensor_core::{FormAnalysis, SecondFundamentalForm};
use pinchflow::Error;

fn cylinder(n: usize) -> SecondFundamentalForm {
    SecondFundamentalForm::from_fn(dims(n, 2), |a, i, j| if a == 0 && i == j && i + 1 < n { 1.0 } else { 0.0 })
}

#[test]
fn sphere_reaction_values() {
    let a = sphere(8, 2, 2.0);
    let h = a.mean_curvature();
    assert!(rel_close(r1(&a), 4.0, 1e-14));
    assert!(rel_close(r2(&a, &h), 32.0, 1e-14));
    assert!(rel_close(reaction_gap(&a, &h, 1.0 / 6.0), 4.0 / 3.0, 1e-14));
}

#[test]
fn cylinder_reaction_values() {
    let a = cylinder(8);
    let h = a.mean_curvature();
    assert!(rel_close(r1(&a), 49.0, 1e-14));
    assert!(rel_close(r2(&a, &h), 343.0, 1e-14));
    assert!(rel_close(reaction_gap(&a, &h, 1.0 / 6.0), 49.0 / 6.0, 1e-14));
}

#[test]
fn product_reaction_values() {
    let a = product(7, 1, 1.0, 4.0);
    let h = a.mean_curvature();
    assert!(rel_close(gram_norm2(&a), 49.0 + 1.0 / 256.0, 1e-14));
    assert!(rel_close(r1(&a), 49.0 + 1.0 / 256.0, 1e-14));
    assert!(rel_close(r2(&a, &h), 343.0 + 1.0 / 256.0, 1e-14));
}

#[test]
fn parts_agree_with_direct_sums() {
    let mut r = rng(3);
    for (n, m) in [(5, 1), (6, 3), (8, 4)] {
        for _ in 0..30 {
            let a = random_form(&mut r, dims(n, m));
            let h = a.mean_curvature();
            let x = FormAnalysis::new(a.clone()).unwrap();
            let p = ReactionParts::new(&x);
            assert!(rel_close(p.r1, r1(&a), 1e-12));
            assert!(rel_close(p.r2, r2(&a, &h), 1e-12));
            assert!(rel_close(p.r2, p.mean2 * p.h2, 1e-12));
            assert!(!p.principal_commutator().violates(1e-12));
            assert!(!p.minus_li().violates(1e-12));
            assert!(!p.minus_reaction_upper().violates(1e-12));
        }
    }
}

#[test]
fn hypersurface_has_no_normal_curvature() {
    let mut r = rng(5);
    let x = FormAnalysis::new(random_form(&mut r, dims(6, 1))).unwrap();
    let p = ReactionParts::new(&x);
    assert!(p.normal2.abs() < 1e-20);
    assert!(p.a_minus2.abs() < 1e-20);
    assert!(rel_close(p.r1, p.a2 * p.a2, 1e-12));
}

#[test]
fn flat_lower_bound_on_sphere() {
    let a = sphere(8, 2, 2.0);
    let x = FormAnalysis::new(a).unwrap();
    let k = PinchingConstants::euclidean(dims(8, 2), 1.0 / 6.0, 0.0).unwrap();
    let rep = f_reaction_lower_bound(&x, &k).unwrap();
    assert!(rel_close(rep.reaction_gap, 4.0 / 3.0, 1e-14));
    assert!(rep.lhs_bound.abs() < 1e-14);
    assert!(!rep.sides().violates(1e-12));
    let w = f_reaction_lower_weighted(&x, &k).unwrap();
    assert!(!w.violates(1e-12));
}

#[test]
fn flat_bounds_reject_unpinched_forms() {
    let x = FormAnalysis::new(cylinder(8)).unwrap();
    // f = 49c − 7 < 0 for c < 1/7.
    let k = PinchingConstants::euclidean(dims(8, 2), 0.14, 0.0).unwrap();
    assert!(matches!(f_reaction_lower_bound(&x, &k), Err(Error::NotPinched(_))));
    let k = PinchingConstants::euclidean(dims(8, 2), 0.2, 0.0).unwrap();
    assert!(matches!(f_reaction_lower_bound(&x, &k), Err(Error::InvalidConstants(_))));
    let k = PinchingConstants::euclidean(dims(8, 3), 1.0 / 6.0, 0.0).unwrap();
    assert!(f_reaction_lower_bound(&x, &k).is_err());
}

#[test]
fn balance_requires_delta_range() {
    let x = FormAnalysis::new(sphere(8, 2, 2.0)).unwrap();
    let k = PinchingConstants::euclidean(dims(8, 2), 1.0 / 6.0, 0.0).unwrap();
    assert!(reaction_balance(&x, &k, 0.0).is_err());
    assert!(reaction_balance(&x, &k, 0.6).is_err());
    assert!(!reaction_balance(&x, &k, 0.25).unwrap().violates(1e-12));
}

#[test]
fn boundary_bound_on_boundary_sphere() {
    // |A|² = 8/r², |H|² = 64/r²; c|H|² − |A|² = 8/(3r²) = d puts S⁸(r) on the boundary.
    let a = sphere(8, 2, 1.0);
    let x = FormAnalysis::new(a).unwrap();
    let d = 8.0 / 3.0;
    assert!(boundary_residual(&x, 1.0 / 6.0, d).abs() < 1e-13);
    let rep = boundary_reaction_bound(&x, 1.0 / 6.0, d).unwrap();
    // R₁ = |A|⁴ = 64, R₂ = |H|²|A|² = 512; both sides equal −128/3.
    assert!(rel_close(rep.lhs_bound, 128.0 - 2.0 * 512.0 / 6.0, 1e-13));
    let g = 2.0 / (8.0 / 24.0);
    assert!(rel_close(rep.rhs_bound, -g * d * d, 1e-13));
    assert!(!rep.sides().violates(1e-12));
    assert!(boundary_reaction_bound(&x, 0.125, d).is_err());
}

#[test]
fn space_form_at_zero_is_equality() {
    let rep = space_form_reaction_at_zero(8, 1.0 / 6.0, 4.0, -1.0);
    assert!(rel_close(rep.q, 4.0, 1e-14));
    assert_eq!(rep.report.lhs_bound, 0.0);
    assert!(rep.report.rhs_bound.abs() < 1e-12);
    assert!(rep.blowup.is_none());
}

#[test]
fn space_form_blowup_on_pinched_sphere() {
    let d = dims(8, 2);
    let k = PinchingConstants::space_form(d, 1.0 / 6.0, 4.0, -1.0).unwrap();
    let x = FormAnalysis::new(sphere(8, 2, 0.2)).unwrap();
    let rep = space_form_reaction_bound(&x, &k).unwrap();
    assert!(rep.q < 0.0);
    let b = rep.blowup.expect("hypotheses hold");
    assert!(!b.violates(1e-12));
    assert!(!rep.report.sides().violates(1e-12));
}

#[test]
fn space_form_bound_on_random_forms() {
    let mut r = rng(21);
    let d = dims(8, 3);
    for kbar in [-1.0, 0.0, 0.5] {
        let k = PinchingConstants::space_form(d, 1.0 / 6.0, 4.0, kbar).unwrap();
        for _ in 0..200 {
            let x = FormAnalysis::new(random_form(&mut r, d)).unwrap();
            let rep = space_form_reaction_bound(&x, &k).unwrap();
            let scale = 1.0 + x.norms().a2.powi(2) + x.norms().mean2.powi(2);
            assert!(rep.report.lhs_bound <= rep.report.rhs_bound + 1e-10 * scale);
        }
    }
}
