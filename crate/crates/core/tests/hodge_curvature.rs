use hodgemetric_core::fd::Stencil;
use hodgemetric_core::fixtures::{self, CoefficientScales};
use hodgemetric_core::hodge_geometry::*;
use hodgemetric_core::linalg::c;
use hodgemetric_core::prepotential::{period_vector, PeriodJet};
use hodgemetric_core::wp_geometry::normal_gauge;
use hodgemetric_core::{Prepotential, C64};

fn instance(n: usize, seed: u64) -> (Prepotential, Vec<C64>) {
    let mut rng = fixtures::rng(seed);
    let u = fixtures::random_normalized_prepotential(n, CoefficientScales::default(), &mut rng);
    let z = fixtures::random_point(n, 0.1, &mut rng);
    (u, z)
}

#[test]
fn analytic_curvature_matches_finite_differences() {
    for n in 1..=3 {
        for seed in 0..3 {
            let (u, z) = instance(n, 100 + seed);
            let (ng, hc) = hodge_curvature_at(&u, &z).unwrap();
            let fd = hodge_curvature_fd(&u, &z, &Stencil::default()).unwrap().transform(&ng.linear);
            let diff = hc.tensor.max_abs_diff(&fd);
            assert!(diff < 1e-6, "n={n} seed={seed} diff={diff:e} scale={}", hc.tensor.max_abs());
        }
    }
}

#[test]
fn split_sums_to_curvature_and_b_is_nonnegative() {
    for n in 1..=3 {
        let (u, z) = instance(n, 7 + n as u64);
        let (_, hc) = hodge_curvature_at(&u, &z).unwrap();
        let scale = hc.tensor.max_abs();
        assert!(hc.tensor.max_abs_diff(&hc.split.sum()) <= 1e-10 * scale);
        assert!(hc.tensor.symmetry_residual() <= 1e-10 * scale);
        let mut rng = fixtures::rng(3);
        for _ in 0..200 {
            let a = fixtures::random_unit_vector(n, &mut rng);
            let s = a.as_slice();
            assert!(hc.split.b.contract(s, s, s, s).re >= -1e-12 * scale);
        }
    }
}

#[test]
fn derivative_of_hodge_metric_identity() {
    for n in 1..=3 {
        let (u, z) = instance(n, 40 + n as u64);
        let r = dh_identity_check(&u, &z, &Stencil::default()).unwrap();
        assert!(r < 1e-7, "n={n} residual {r:e}");
    }
    let r = dh_identity_check(&Prepotential::normalized_quadratic(2), &[c(0.1, 0.0), c(0.0, 0.05)], &Stencil::default()).unwrap();
    assert!(r < 1e-9);
}

#[test]
fn optimality_family_decreases_to_inverse_c1() {
    let ts: Vec<f64> = (0..=10).map(|k| optimality_extremal_t() * k as f64 / 10.0).collect();
    let ratios = optimality_probe(&ts).unwrap();
    println!("{ratios:?}");
    for w in ratios.windows(2) {
        assert!(w[1] < w[0]);
    }
    let last = *ratios.last().unwrap();
    assert!((0.2 - 1e-10..0.2 + 1e-8).contains(&last), "{last}");
}

#[test]
fn bounds_hold_on_random_instances() {
    for n in 1..=3 {
        for seed in 0..3 {
            let (u, z) = instance(n, 500 + seed);
            let (_, hc) = hodge_curvature_at(&u, &z).unwrap();
            let rep = verify_bounds(&hc, 64, &mut fixtures::rng(seed)).unwrap();
            println!("{n} {:.4} {:.4} {:.4} {:.4}", rep.hol_sectional_margin, rep.bisectional_min, rep.ricci_margin, rep.sectional_bound_cp);
            assert!(rep.passed(), "{rep:?}");
            let sec = sectional_bound_check(&hc, 1000, &mut fixtures::rng(seed)).unwrap();
            println!("  {:.4} {:.4}", sec.max_sectional_ratio, sec.max_lemma_ratio);
            assert!(sec.passed(), "{sec:?}");
        }
    }
}

#[test]
fn verdicts_do_not_depend_on_gauge() {
    let (u, z) = instance(2, 77);
    let p = period_vector(&u, &z, 4).unwrap();
    let a = hodge_curvature_analytic(&normal_gauge(&p).unwrap().period).unwrap();
    let scaled = PeriodJet::new(p.base_point.clone(), p.omega.iter().map(|j| j.scale(c(0.3, 1.1))).collect()).unwrap();
    let b = hodge_curvature_analytic(&normal_gauge(&scaled).unwrap().period).unwrap();
    let ra = verify_bounds(&a, 64, &mut fixtures::rng(1)).unwrap();
    let rb = verify_bounds(&b, 64, &mut fixtures::rng(1)).unwrap();
    assert_eq!(ra.passed(), rb.passed());
    assert!((ra.min_holomorphic_ratio - rb.min_holomorphic_ratio).abs() < 1e-8);
}
