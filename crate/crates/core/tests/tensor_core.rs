mod common;

use common::*;
use pinchflow::tensor_core::*;
use pinchflow::Error;
use rand::Rng;
use rand_distr::StandardNormal;

#[test]
fn dims_bounds_are_enforced() {
    assert!(Dims::new(2, 1).is_ok());
    assert!(Dims::new(16, 16).is_ok());
    assert_eq!(Dims::new(1, 1), Err(Error::InvalidDims { n: 1, m: 1 }));
    assert_eq!(Dims::new(17, 2), Err(Error::InvalidDims { n: 17, m: 2 }));
    assert_eq!(Dims::new(4, 0), Err(Error::InvalidDims { n: 4, m: 0 }));
}

#[test]
fn construction_rejects_asymmetric_slots() {
    let d = dims(2, 1);
    assert!(matches!(
        SecondFundamentalForm::new(d, vec![1.0, 2.0, 3.0, 4.0]),
        Err(Error::NotSymmetric { slot: 0, i: 0, j: 1 })
    ));
    assert!(matches!(
        SecondFundamentalForm::new(d, vec![1.0, 2.0, 2.0]),
        Err(Error::ShapeMismatch { .. })
    ));
    assert!(SecondFundamentalForm::new(d, vec![1.0, 2.0, 2.0, 4.0]).is_ok());
}

#[test]
fn mean_curvature_of_sphere_zero_and_product() {
    let h = mean_curvature(&sphere(8, 2, 2.0));
    assert_eq!(h.vector(), &[4.0, 0.0]);
    assert_eq!(h.norm(), 4.0);

    let z = mean_curvature(&SecondFundamentalForm::zeros(dims(5, 3)));
    assert_eq!(z.vector(), &[0.0, 0.0, 0.0]);
    assert_eq!(z.norm(), 0.0);

    let p = mean_curvature(&product(7, 1, 1.0, 4.0));
    assert_eq!(p.vector(), &[7.0, 0.25]);
}

#[test]
fn codimension_one_data_has_no_orthogonal_part() {
    let mut r = rng(11);
    let d = dims(5, 2);
    let a = SecondFundamentalForm::from_fn(d, |s, i, j| {
        if s == 0 {
            r.sample::<f64, _>(StandardNormal) + if i == j { 1.0 } else { 0.0 }
        } else {
            0.0
        }
    });
    let dec = principal_decompose(&a).unwrap();
    assert!(dec.norms().a_minus2 < 1e-28);
}

#[test]
fn sphere_is_umbilic() {
    let dec = principal_decompose(&sphere(8, 2, 2.0)).unwrap();
    let nr = dec.norms();
    assert!((nr.h2 - 2.0).abs() < 1e-14);
    assert_eq!(nr.a_minus2, 0.0);
    assert!(nr.a_ring2.abs() < 1e-14);
    assert!(nr.h_ring2.abs() < 1e-14);
}

#[test]
fn product_split_matches_closed_form() {
    // Closed form with x = 1/a², y = 1/b²:
    // |h|² = (p³x² + q³y²)/(p²x + q²y) and |A⁻|² = pq(p+q)xy/(p²x + q²y).
    let (p, q, x, y) = (7.0, 1.0, 1.0, 1.0 / 16.0);
    let den = p * p * x + q * q * y;
    let h2 = (p * p * p * x * x + q * q * q * y * y) / den;
    let am2 = p * q * (p + q) * x * y / den;
    let dec = principal_decompose(&product(7, 1, 1.0, 4.0)).unwrap();
    let nr = dec.norms();
    assert!((nr.a2 - 7.0625).abs() < 1e-14);
    assert!((nr.mean2 - 49.0625).abs() < 1e-13);
    assert!((nr.h2 - h2).abs() < 1e-13, "{} vs {}", nr.h2, h2);
    assert!((nr.a_minus2 - am2).abs() < 1e-14, "{} vs {}", nr.a_minus2, am2);
    assert!((nr.h2 - 6.99117).abs() < 1e-5);
    assert!((nr.a_minus2 - 0.07133).abs() < 1e-5);
}

#[test]
fn degenerate_mean_curvature_is_rejected() {
    let mut a = SecondFundamentalForm::zeros(dims(3, 2));
    a = a.with_entry(0, 0, 0, 1.0).with_entry(0, 1, 1, -1.0);
    assert!(matches!(principal_decompose(&a), Err(Error::DegenerateMeanCurvature { .. })));
    assert!(matches!(
        principal_decompose(&SecondFundamentalForm::zeros(dims(3, 2))),
        Err(Error::DegenerateMeanCurvature { .. })
    ));
}

#[test]
fn split_identities_hold_on_random_forms() {
    let mut r = rng(2024);
    for n in 2..=8 {
        for m in 1..=4 {
            let d = dims(n, m);
            for _ in 0..10_000 {
                let a = random_form(&mut r, d);
                let dec = principal_decompose(&a).unwrap();
                let nr = dec.norms();
                assert!(dec.reconstruction_error(&a) <= 1e-12);
                assert!((nr.a2 - nr.h2 - nr.a_minus2).abs() <= 1e-10);
                assert!((nr.a_ring2 - nr.a2 + nr.mean2 / n as f64).abs() <= 1e-10);
                assert!((nr.a_ring2 - nr.h_ring2 - nr.a_minus2).abs() <= 1e-10);
                assert!(dec.a_minus_trace().iter().all(|t| t.abs() <= 1e-12));
                assert!(dec.a_minus_normal_leak() <= 1e-12);
                let nu2: f64 = dec.nu1().iter().map(|x| x * x).sum();
                assert!((nu2 - 1.0).abs() <= 1e-14);
            }
        }
    }
}

#[test]
fn single_slot_and_product_have_flat_normal_bundle() {
    let mut r = rng(5);
    let d = dims(4, 3);
    let a = SecondFundamentalForm::from_fn(d, |s, _, _| if s == 1 { r.sample(StandardNormal) } else { 0.0 });
    let a = a.with_entry(1, 0, 0, 5.0);
    let dec = principal_decompose(&a).unwrap();
    assert_eq!(normal_curvature(&a, &dec).full_norm2(), 0.0);

    let p = product(7, 1, 1.0, 4.0);
    let dec = principal_decompose(&p).unwrap();
    let rn = normal_curvature(&p, &dec);
    assert_eq!(rn.full_norm2(), 0.0);
    assert_eq!(commutator_norm2(&p), 0.0);
}

#[test]
fn normal_curvature_matches_quadruple_loop() {
    let mut r = rng(77);
    let d = dims(3, 3);
    for _ in 0..50 {
        let a = random_form(&mut r, d);
        let dec = principal_decompose(&a).unwrap();
        let rn = normal_curvature(&a, &dec);
        let mut brute = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for al in 0..3 {
                    for be in 0..3 {
                        let mut v = 0.0;
                        for p in 0..3 {
                            v += a.get(al, i, p) * a.get(be, j, p);
                            v -= a.get(be, i, p) * a.get(al, j, p);
                        }
                        assert!((rn.get(i, j, al, be) - v).abs() < 1e-13);
                        brute += v * v;
                    }
                }
            }
        }
        assert!((rn.full_norm2() - brute).abs() < 1e-11 * brute.max(1.0));
        assert!((commutator_norm2(&a) - brute).abs() < 1e-11 * brute.max(1.0));
    }
}

#[test]
fn normal_curvature_split_and_principal_identity() {
    let mut r = rng(99);
    for (n, m) in [(2, 2), (3, 3), (5, 4), (8, 3), (6, 5)] {
        for _ in 0..500 {
            let a = random_form(&mut r, dims(n, m));
            let dec = principal_decompose(&a).unwrap();
            let rn = normal_curvature(&a, &dec);
            assert!(rn.split_residual().abs() <= 1e-10, "{}", rn.split_residual());
            assert!(rn.principal_identity_residual(&dec).abs() <= 1e-10);
        }
    }
}

#[test]
fn zero_gradient_has_zero_residuals() {
    let a = product(7, 1, 1.0, 4.0);
    let dec = principal_decompose(&a).unwrap();
    let res = frame_identity_residuals(&dec, &GradientSample::zeros(a.dims())).unwrap();
    assert_eq!(res.max_abs(), 0.0);
}

#[test]
fn gradient_along_principal_normal_only() {
    // T = E(g ν₁): ∇H is parallel to ν₁, so ∇ν₁ = 0.
    let mut r = rng(3);
    let d = dims(5, 3);
    let a = random_form(&mut r, d);
    let dec = principal_decompose(&a).unwrap();
    let nu = dec.nu1().to_vec();
    let mut g = vec![0.0; 5 * 3];
    for i in 0..5 {
        let gi: f64 = r.sample(StandardNormal);
        for al in 0..3 {
            g[i * 3 + al] = gi * nu[al];
        }
    }
    let t = GradientSample::trace_tensor(d, &g, &vec![0.0; 15]).unwrap();
    let s = split_gradient(&dec, &t).unwrap();
    assert!(s.norms.nu1_grad2 < 1e-28);
    let res = frame_identity_residuals(&dec, &t).unwrap();
    assert!(res.mean_curvature.abs() < 1e-12);
    assert!(res.max_abs() < 1e-10);
}

#[test]
fn random_codazzi_samples_satisfy_frame_identities() {
    let mut r = rng(4);
    for (n, m) in [(4, 2), (3, 3), (8, 3), (6, 4)] {
        for _ in 0..200 {
            let d = dims(n, m);
            let a = random_form(&mut r, d);
            let t = random_symmetric_grad(&mut r, d);
            assert_eq!(t.codazzi_defect(), 0.0);
            let dec = principal_decompose(&a).unwrap();
            let res = frame_identity_residuals(&dec, &t).unwrap();
            assert!(res.max_abs() < 1e-10, "{res:?}");
        }
    }
}

#[test]
fn split_pieces_satisfy_trace_and_symmetry_identities() {
    let mut r = rng(8);
    let d = dims(4, 3);
    let (n, m) = (4, 3);
    let a = random_form(&mut r, d);
    let t = random_symmetric_grad(&mut r, d);
    let dec = principal_decompose(&a).unwrap();
    let s = split_gradient(&dec, &t).unwrap();
    let mean = dec.mean_norm();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // ∇h + ⟨∇A⁻, ν₁⟩ is fully symmetric.
                let x = |i: usize, j: usize, k: usize| {
                    s.h_grad[(i * n + j) * n + k] + s.a_minus_grad_nu1[(i * n + j) * n + k]
                };
                assert!((x(i, j, k) - x(j, i, k)).abs() < 1e-12);
                assert!((x(i, j, k) - x(k, j, i)).abs() < 1e-12);
                for al in 0..m {
                    let y = |i: usize, j: usize, k: usize| {
                        s.a_minus_grad_hat[((al * n + i) * n + j) * n + k]
                            + dec.h_at(j, k) * s.nu1_grad[i * m + al]
                    };
                    assert!((y(i, j, k) - y(j, i, k)).abs() < 1e-12);
                }
            }
        }
        // Tracing over (j, k) reproduces ∇|H| and |H|∇ν₁.
        let tr_scalar: f64 = (0..n).map(|k| s.h_grad[(i * n + k) * n + k] + s.a_minus_grad_nu1[(i * n + k) * n + k]).sum();
        assert!((tr_scalar - s.grad_abs_mean[i]).abs() < 1e-12);
        for al in 0..m {
            let tr: f64 = (0..n)
                .map(|k| s.a_minus_grad_hat[((al * n + i) * n + k) * n + k] + dec.h_at(k, k) * s.nu1_grad[i * m + al])
                .sum();
            assert!((tr - mean * s.nu1_grad[i * m + al]).abs() < 1e-12);
        }
    }
}

#[test]
fn codazzi_violation_is_rejected() {
    let d = dims(3, 2);
    let a = sphere(3, 2, 1.0);
    let dec = principal_decompose(&a).unwrap();
    let t = GradientSample::from_fn(d, |al, i, j, k| if (al, i, j, k) == (0, 0, 1, 1) { 1.0 } else { 0.0 });
    assert!(matches!(frame_identity_residuals(&dec, &t), Err(Error::InvalidSample(_))));
}

#[test]
fn trace_tensor_has_prescribed_traces() {
    let mut r = rng(21);
    let d = dims(5, 2);
    let g: Vec<f64> = (0..10).map(|_| r.sample(StandardNormal)).collect();
    let w: Vec<f64> = (0..10).map(|_| r.sample(StandardNormal)).collect();
    let e = GradientSample::trace_tensor(d, &g, &w).unwrap();
    let gh = e.mean_curvature_gradient();
    let wd = e.trace_defect();
    for i in 0..10 {
        assert!((gh[i] - g[i]).abs() < 1e-13);
        assert!((wd[i] - w[i]).abs() < 1e-13);
    }
    // Pure-gradient part: |E|² = 3/(n+2) |∇H|².
    let e0 = GradientSample::trace_tensor(d, &g, &vec![0.0; 10]).unwrap();
    let g2: f64 = g.iter().map(|x| x * x).sum();
    assert!((e0.norm2() - 3.0 / 7.0 * g2).abs() < 1e-12);
}
