use hodgemetric_core::fd::{self, Stencil};
use hodgemetric_core::fixtures::{self, CoefficientScales};
use hodgemetric_core::hodge_geometry::hodge_metric_at;
use hodgemetric_core::linalg::{self, c, CMat, CVec};
use hodgemetric_core::period_domain::*;
use hodgemetric_core::prepotential::period_vector;
use hodgemetric_core::{Prepotential, C64};

fn random_sample(n: usize, seed: u64) -> Prepotential {
    fixtures::random_normalized_prepotential(n, CoefficientScales::default(), &mut fixtures::rng(seed))
}

#[test]
fn projection_is_symmetric_and_closed_form_agrees() {
    for n in 1..=3 {
        for seed in 0..10 {
            let u = random_sample(n, seed);
            let t = fixtures::random_point(n, 0.2, &mut fixtures::rng(1000 + seed));
            let s = siegel_from_period(&period_vector(&u, &t, 1).unwrap()).unwrap();
            assert!(s.symmetry_residual() < 1e-10, "{}", s.symmetry_residual());
            assert!(s.d2_d3_residual < 1e-10);
            assert!(s.inverse_identity_residual < 1e-10);
            assert!(s.closed_form_residual() < 1e-10, "n={n} seed={seed} {:e}", s.closed_form_residual());
            assert!(s.plus_sign_residual > 1e-6);
            assert_eq!(s.convention_sign, -1.0);
        }
    }
}

#[test]
fn projection_on_random_symmetric_inputs() {
    let mut rng = fixtures::rng(5);
    for n in 1..=3 {
        for _ in 0..20 {
            let z = CVec::from_fn(n, |_, _| fixtures::complex_normal(&mut rng) * 0.2);
            let alpha = CVec::from_fn(n, |_, _| fixtures::complex_normal(&mut rng) * 0.2);
            let m = CMat::from_fn(n, n, |_, _| fixtures::complex_normal(&mut rng) * 0.2);
            let a_mat = (&m + m.transpose()) * c(0.5, 0.0) + CMat::identity(n, n) * c(0.0, 1.0);
            let Ok(s) = siegel_project(&z, c(0.1, -1.0), &alpha, &a_mat) else { continue };
            assert!(s.symmetry_residual() < 1e-10);
            assert!(s.d2_d3_residual < 1e-10);
            assert!(s.inverse_identity_residual < 1e-10);
        }
    }
}

#[test]
fn xi_zero_branch() {
    let n = 2;
    let a_mat = CMat::from_row_slice(2, 2, &[c(0.1, 1.0), c(0.2, 0.0), c(0.2, 0.0), c(0.0, 0.8)]);
    let s = siegel_project(&CVec::zeros(n), c(0.0, -1.0), &CVec::zeros(n), &a_mat).unwrap();
    assert_eq!(s.b, CMat::identity(n, n));
    for r in 0..n {
        for q in 0..n {
            assert_eq!(s.z_closed_form[(r + 1, q + 1)], a_mat[(r, q)].conj());
        }
    }
}

#[test]
fn derivatives_of_siegel_blocks_at_origin() {
    // ∂D₁ = 0, ∂(D₃)_r/∂t_k = √2 i δ_rk (α − Āz ≈ √2 i t), ∂(D₄)_rs/∂t̄_k = ū_rsk
    let n = 2;
    let u = random_sample(n, 3);
    let zfn = |w: &[C64]| Ok(siegel_from_period(&period_vector(&u, w, 1)?)?.z);
    let origin = [c(0.0, 0.0); 2];
    let s = Stencil::default();
    let p = period_vector(&u, &origin, 3).unwrap();
    let third = |r: usize, q: usize, k: usize| -> C64 {
        // u_rsk from the Ω components ∂_k(∇u/√2)_r·√2 at the origin
        p.deriv(&[q, k]).unwrap()[n + 2 + r] * std::f64::consts::SQRT_2
    };
    for k in 0..n {
        let dh = fd::d_holo(&zfn, &origin, k, &s).unwrap();
        let da = fd::d_anti(&zfn, &origin, k, &s).unwrap();
        assert!(dh[(0, 0)].norm() < 1e-8 && da[(0, 0)].norm() < 1e-8);
        for r in 0..n {
            let expected = if r == k { c(0.0, std::f64::consts::SQRT_2) } else { c(0.0, 0.0) };
            assert!((dh[(r + 1, 0)] - expected).norm() < 1e-8, "{}", dh[(r + 1, 0)]);
            for q in 0..n {
                assert!((da[(r + 1, q + 1)] - third(r, q, k).conj()).norm() < 1e-8);
            }
        }
    }
}

#[test]
fn pullback_is_twice_the_hodge_metric() {
    let mut samples = vec![Prepotential::normalized_quadratic(2)];
    samples.extend((0..6).map(|s| random_sample(2, 60 + s)));
    let rep = constant_multiple_test(&samples, &Stencil::default()).unwrap();
    println!("{rep:?}");
    assert!(rep.max_deviation < 1e-6);
    assert!(rep.lambda_spread < 1e-6);
    assert!((rep.lambdas[0] - 2.0).abs() < 1e-6);
    let h = hodge_metric_at(&samples[1], &[c(0.0, 0.0); 2]).unwrap();
    let pb = siegel_metric_pullback(&samples[1], &[c(0.0, 0.0); 2], &Stencil::default()).unwrap();
    assert!(linalg::max_abs(&(pb.mat - h * c(2.0, 0.0))) < 1e-6);
}

#[test]
fn hodge_riemann_on_slice_points_and_violations() {
    for n in 1..=3 {
        for seed in 0..5 {
            let u = random_sample(n, 200 + seed);
            let t = fixtures::random_point(n, 0.1, &mut fixtures::rng(seed));
            let f = filtration_from_period(&period_vector(&u, &t, 1).unwrap()).unwrap();
            assert_eq!(f.dims(), (1, n + 1, 2 * n + 1));
            let rep = check_hodge_riemann(&f).unwrap();
            assert!(rep.pass, "{rep:?}");
            let scaled = check_hodge_riemann(&f.with_scaled_f3(c(-2.0, 0.7))).unwrap();
            assert!(scaled.pass);
            assert!(!check_hodge_riemann(&f.conjugate()).unwrap().pass);
            assert!(!check_hodge_riemann(&f.with_conjugated_f2_vector(1)).unwrap().pass);
        }
    }
}

#[test]
fn origin_filtration_pattern() {
    let n = 2;
    let f = filtration_from_period(&period_vector(&Prepotential::normalized_quadratic(n), &[c(0.0, 0.0); 2], 1).unwrap()).unwrap();
    let mut e = CVec::zeros(2 * n + 2);
    e[0] = c(1.0, 0.0);
    e[n + 1] = c(0.0, -1.0);
    assert!((&f.f3[0] - e).norm() < 1e-15);
    assert!(f.is_nested());
    let w = weil_operator(&f).unwrap();
    assert!(linalg::max_abs(&w.matrix.map(|x| c(0.0, x.im))) < 1e-12);
}
