mod common;

use common::{dims, rel_close};
use pinchflow::flow::*;
use pinchflow::pinching::PinchingConstants;
use pinchflow::Error;

const SPHERE: FlowFamily = FlowFamily::Sphere { n: 8, m: 2, r0: 2.0 };
const CYLINDER: FlowFamily = FlowFamily::Cylinder { n: 8, m: 2, r0: 1.0 };
const PRODUCT: FlowFamily = FlowFamily::Product { p: 7, q: 1, m: 2, a0: 1.0, b0: 4.0 };
const HYPERBOLIC: FlowFamily = FlowFamily::Hyperbolic { n: 8, m: 2, r0: 1.0, kbar: -1.0 };

fn flat(c: f64, d: f64) -> PinchingConstants {
    PinchingConstants::euclidean(dims(8, 2), c, d).unwrap()
}

#[test]
fn exact_state_examples() {
    let s = SPHERE.exact_state(0.2).unwrap();
    assert!(rel_close(s.params[0], 0.8f64.sqrt(), 1e-15));
    assert_eq!(PRODUCT.exact_state(0.0).unwrap().params, vec![1.0, 4.0]);
    let h = HYPERBOLIC.exact_state(0.05).unwrap();
    assert!(rel_close(h.params[0].cosh(), 1f64.cosh() * (-0.4f64).exp(), 1e-14));
    assert!(matches!(SPHERE.exact_state(0.25), Err(Error::PastBlowup { .. })));
    assert!(rel_close(SPHERE.blowup_time(), 0.25, 1e-15));
    assert!(rel_close(PRODUCT.blowup_time(), 1.0 / 14.0, 1e-15));
    assert!(rel_close(HYPERBOLIC.blowup_time(), 1f64.cosh().ln() / 8.0, 1e-15));
}

#[test]
fn invalid_families_are_rejected() {
    assert!(FlowFamily::Product { p: 7, q: 1, m: 1, a0: 1.0, b0: 4.0 }.validate().is_err());
    assert!(FlowFamily::Sphere { n: 8, m: 2, r0: -1.0 }.validate().is_err());
    assert!(FlowFamily::Hyperbolic { n: 8, m: 2, r0: 1.0, kbar: 0.5 }.validate().is_err());
}

#[test]
fn rk4_single_step_matches_exact() {
    let s = SPHERE.initial_state().unwrap().step_rk4(1e-4).unwrap();
    let e = SPHERE.exact_state(1e-4).unwrap();
    assert!((s.params[0] - e.params[0]).abs() < 1e-12);
}

#[test]
fn rk4_step_across_blowup_fails() {
    let s = SPHERE.initial_state().unwrap();
    assert!(matches!(s.step_rk4(0.3), Err(Error::PastBlowup { .. })));
}

#[test]
fn rk4_global_error_product() {
    let mut s = PRODUCT.initial_state().unwrap();
    for _ in 0..500 {
        s = s.step_rk4(1e-4).unwrap();
    }
    let e = PRODUCT.exact_state(0.05).unwrap();
    for (a, b) in s.params.iter().zip(&e.params) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn rk4_tracks_every_family_over_half_lifespan() {
    for fam in [SPHERE, CYLINDER, PRODUCT, HYPERBOLIC] {
        let half = 0.5 * fam.blowup_time();
        let steps = (half / 1e-4).floor() as usize;
        let mut s = fam.initial_state().unwrap();
        for _ in 0..steps {
            s = s.step_rk4(1e-4).unwrap();
        }
        let e = fam.exact_state(s.t).unwrap();
        for (a, b) in s.params.iter().zip(&e.params) {
            assert!(rel_close(*a, *b, 1e-9), "{}: {a} vs {b}", fam.name());
        }
    }
}

#[test]
fn sphere_diagnostics() {
    let r = diagnostics(&SPHERE.initial_state().unwrap(), &flat(1.0 / 6.0, 0.0)).unwrap();
    assert!(rel_close(r.ratio_pinch, 0.125, 1e-15));
    assert!(rel_close(r.f, 2.0 / 3.0, 1e-14));
    assert_eq!(r.ratio_codim, 0.0);
    assert!(r.q.is_nan());
    assert!(r.param2.is_nan());
}

#[test]
fn cylinder_diagnostics_are_exact() {
    let r = diagnostics(&CYLINDER.initial_state().unwrap(), &flat(1.0 / 6.0, 0.0)).unwrap();
    assert_eq!(r.ratio_cyl, 0.0);
    assert_eq!(r.ratio_pinch, 1.0 / 7.0);
}

#[test]
fn product_diagnostics() {
    let r = diagnostics(&PRODUCT.initial_state().unwrap(), &flat(1.0 / 6.0, 0.0)).unwrap();
    assert!(rel_close(r.a2, 7.0625, 1e-14));
    assert!(rel_close(r.mean2, 49.0625, 1e-14));
    assert!(rel_close(r.h2, 6.991162420382166, 1e-12));
    assert!(rel_close(r.a_minus2, 0.07133757961783439, 1e-12));
    assert!(rel_close(r.f, 1.1145833333333321, 1e-12));
    assert!(rel_close(r.ratio_codim, 0.06400380975058045, 1e-12));
    assert!(rel_close(r.ratio_pinch, 0.14394904458598726, 1e-14));
}

#[test]
fn diagnostics_rejects_mismatched_dims() {
    let k = PinchingConstants::euclidean(dims(8, 3), 1.0 / 6.0, 0.0).unwrap();
    assert!(diagnostics(&SPHERE.initial_state().unwrap(), &k).is_err());
}

#[test]
fn hyperbolic_q_value() {
    let fam = FlowFamily::Hyperbolic { n: 8, m: 2, r0: 0.5, kbar: -1.0 };
    let k = PinchingConstants::space_form(dims(8, 2), 1.0 / 6.0, 4.0, -1.0).unwrap();
    let r = diagnostics(&fam.initial_state().unwrap(), &k).unwrap();
    assert!(rel_close(r.q, -8.487185004883116, 1e-12));
    assert!(rel_close(r.mean2, 299.69244011719485, 1e-12));
}

#[test]
fn evolution_residuals_small_on_all_families() {
    for fam in [SPHERE, CYLINDER, PRODUCT, HYPERBOLIC] {
        for i in 0..20 {
            let t = 0.75 * fam.blowup_time() * i as f64 / 20.0;
            let r = evolution_residual(&fam, t).unwrap();
            assert!(r.max_rel() < 1e-6, "{} at t = {t}: {r:?}", fam.name());
        }
    }
}

#[test]
fn sphere_mean_curvature_rate_value() {
    let r = evolution_residual(&SPHERE, 0.0).unwrap();
    assert!(rel_close(r.mean2_reaction, 64.0, 1e-14));
    assert!(rel_close(r.mean2_rate, 64.0, 1e-8));
}

#[test]
fn hyperbolic_rate_closed_form() {
    let r = evolution_residual(&HYPERBOLIC, 0.0).unwrap();
    // d|H|²/dt = 2n³ coth²r / sinh²r at r = 1.
    let (c, s) = (1f64 / 1f64.tanh(), 1f64.sinh());
    let closed = 2.0 * 512.0 * c * c / (s * s);
    // Centred differences with h = 1e-5 carry a truncation error near 4e-8 here.
    assert!(rel_close(r.mean2_rate, closed, 1e-6), "{r:?} vs {closed}");
    assert!(rel_close(r.mean2_reaction, closed, 1e-12));
}

#[test]
fn barrier_sphere_attained() {
    let b = blowup_bound_check(&SPHERE).unwrap();
    assert_eq!(b.samples, 1000);
    assert!(b.flat.holds && b.flat.attained(1e-12));
    assert!(rel_close(b.flat.t_max, 0.25, 1e-15));
}

#[test]
fn barrier_product_holds_strictly() {
    let b = blowup_bound_check(&PRODUCT).unwrap();
    assert!(b.flat.holds);
    assert!(!b.flat.attained(1e-6));
}

#[test]
fn hyperbolic_barrier_needs_ambient_term() {
    let b = blowup_bound_check(&HYPERBOLIC).unwrap();
    // The barrier without the ambient term lies above the solution.
    assert!(!b.flat.holds);
    assert!(b.corrected.holds && b.corrected.attained(1e-9));
    assert!(rel_close(b.corrected.t_max, HYPERBOLIC.blowup_time(), 1e-12));
}

#[test]
fn quotient_identity_trivial_cases() {
    let n = 64;
    let dx = std::f64::consts::TAU / n as f64;
    let xs: Vec<f64> = (0..n).map(|i| i as f64 * dx).collect();
    let w: Vec<f64> = xs.iter().map(|x| 2.0 + x.sin()).collect();
    let src: Vec<f64> = xs.iter().map(|x| x.cos()).collect();
    let r = quotient_identity_residual(&w, &w, &src, &src, 1e-4, dx).unwrap();
    assert!(r < 1e-9);
    let z = vec![2.0; n];
    let zero = vec![0.0; n];
    let r = quotient_identity_residual(&w, &z, &src, &zero, 1e-4, dx).unwrap();
    assert!(r < 1e-9);
    let mut bad = z.clone();
    bad[5] = 0.0;
    assert!(matches!(quotient_identity_residual(&w, &bad, &src, &zero, 1e-4, dx), Err(Error::NonpositiveZ(5))));
}

#[test]
fn quotient_identity_second_order() {
    let r: Vec<f64> = [256, 512, 1024].iter().map(|&n| manufactured_quotient_residual(n).unwrap()).collect();
    for w in r.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}, residuals {r:?}");
    }
}

#[test]
fn simulate_stops_at_blowup_without_error() {
    let rows = simulate(&SPHERE, &flat(1.0 / 6.0, 0.0), 1e-3, 1.0, 10).unwrap();
    let last = rows.last().unwrap();
    assert!(last.t < 0.25);
    assert!(rows.len() > 10);
}

#[test]
fn sphere_ratio_is_constant() {
    let rows = simulate(&SPHERE, &flat(1.0 / 6.0, 0.0), 1e-4, 0.2, 50).unwrap();
    for r in &rows {
        assert!((r.ratio_pinch - 0.125).abs() < 1e-12);
        assert!(r.f > 0.0);
    }
}

#[test]
fn csv_round_trip() {
    let rows = simulate(&PRODUCT, &flat(1.0 / 6.0, 0.0), 1e-4, 0.01, 10).unwrap();
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("t,param1,param2,A2,H2,h2,Aminus2,f,Q,ratio_pinch,ratio_codim,ratio_cyl\n"));
    assert!(text.contains("NaN"));
    let back = read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.len(), rows.len());
    for (a, b) in rows.iter().zip(&back) {
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
        }
    }
}

#[test]
fn sweep_matches_serial() {
    let runs = vec![(SPHERE, flat(1.0 / 6.0, 0.0)), (PRODUCT, flat(1.0 / 6.0, 0.0))];
    let par = simulate_sweep(&runs, 1e-3, 0.05, 5);
    for ((fam, k), got) in runs.iter().zip(par) {
        let bits = |rows: Vec<TimeSeriesRecord>| -> Vec<u64> {
            rows.iter().flat_map(|r| r.values().map(f64::to_bits)).collect()
        };
        assert_eq!(bits(got.unwrap()), bits(simulate(fam, k, 1e-3, 0.05, 5).unwrap()));
    }
}

#[test]
fn codim_ratio_drop_on_product() {
    let rows = simulate(&PRODUCT, &flat(1.0 / 6.0, 0.0), 1e-4, 0.0714, 1).unwrap();
    let f0 = rows[0].f;
    let (k, r) = rows.iter().enumerate().find(|(_, r)| r.f >= 100.0 * f0).unwrap();
    let factor = rows[0].ratio_codim / r.ratio_codim;
    assert_eq!(k, 707);
    assert!((factor / 101.5387 - 1.0).abs() < 0.05, "factor {factor}");
}

#[test]
fn hyperbolic_q_stays_negative_and_decreases() {
    let fam = FlowFamily::Hyperbolic { n: 8, m: 2, r0: 0.5, kbar: -1.0 };
    let k = PinchingConstants::space_form(dims(8, 2), 1.0 / 6.0, 4.0, -1.0).unwrap();
    let rows = simulate(&fam, &k, 1e-5, 1.0, 1).unwrap();
    assert!(rows.len() > 100);
    for w in rows.windows(2) {
        assert!(w[1].q < w[0].q && w[1].q < 0.0);
    }
}
