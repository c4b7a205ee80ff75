use hodgemetric_core::fixtures::{self, CoefficientScales};
use hodgemetric_core::hodge_geometry::hodge_metric_at;
use hodgemetric_core::linalg::{self, c, CMat};
use hodgemetric_core::prepotential::{check_horizontality, period_vector};
use hodgemetric_core::wp_geometry::*;
use hodgemetric_core::Prepotential;
use proptest::prelude::*;

fn sample(n: usize, seed: u64) -> (Prepotential, Vec<hodgemetric_core::C64>) {
    let mut rng = fixtures::rng(seed);
    let u = fixtures::random_normalized_prepotential(n, CoefficientScales::default(), &mut rng);
    let z = fixtures::random_point(n, 0.15, &mut rng);
    (u, z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn periods_are_horizontal(n in 1usize..=3, seed in 0u64..10_000) {
        let (u, z) = sample(n, seed);
        let p = period_vector(&u, &z, 3).unwrap();
        prop_assert!(check_horizontality(&p, 1e-12));
    }

    #[test]
    fn metric_from_pairing_equals_hessian_of_potential(n in 1usize..=3, seed in 0u64..10_000) {
        let (u, z) = sample(n, seed);
        let p = period_vector(&u, &z, 3).unwrap();
        let g = wp_metric(&p).unwrap();
        let k = kahler_potential(&p).unwrap();
        let g2 = wp_metric_from_potential(&k, &z).unwrap();
        prop_assert!(linalg::max_abs(&(&g.mat - &g2.mat)) <= 1e-10 * linalg::max_abs(&g.mat));
    }

    #[test]
    fn hodge_metric_is_positive_and_dominates(n in 1usize..=3, seed in 0u64..10_000) {
        let (u, z) = sample(n, seed);
        let p = period_vector(&u, &z, 3).unwrap();
        let g = wp_metric(&p).unwrap();
        let h = hodge_metric_at(&u, &z).unwrap();
        prop_assert!(linalg::is_positive_definite(&h));
        let ev = linalg::relative_eigenvalues(&h, &g.mat).unwrap();
        prop_assert!(ev[0] >= 2.0 - 1e-10);
    }

    #[test]
    fn curvature_trace_reproduces_ricci(n in 1usize..=3, seed in 0u64..10_000) {
        let (u, z) = sample(n, seed);
        let p = period_vector(&u, &z, 3).unwrap();
        let g = wp_metric(&p).unwrap();
        let f = yukawa(&p).unwrap();
        let k = kahler_potential(&p).unwrap();
        let r = wp_curvature(&g, &f, &k).unwrap();
        let ric = wp_ricci(&g, &f, &k).unwrap();
        prop_assert!(linalg::max_abs(&(r.ricci(&g.mat).unwrap() - &ric.mat)) <= 1e-10 * (1.0 + linalg::max_abs(&ric.mat)));
    }
}

#[test]
fn origin_values_in_bg_coordinates() {
    for n in 1..=3 {
        let (u, _) = sample(n, 99);
        let origin = vec![c(0.0, 0.0); n];
        let p = period_vector(&u, &origin, 3).unwrap();
        let omega = p.value();
        let pairing = p.q.pair(&omega, &omega.map(|x| x.conj())) * c(0.0, 1.0);
        assert!((pairing.norm() - 2.0).abs() < 1e-12);
        let g = wp_metric(&p).unwrap();
        assert!(linalg::max_abs(&(&g.mat - CMat::identity(n, n) * c(0.5, 0.0))) < 1e-12);
        let f = yukawa(&p).unwrap();
        let third = |i: usize, j: usize, k: usize| {
            let mut e = vec![0u32; n];
            e[i] += 1;
            e[j] += 1;
            e[k] += 1;
            let idx = hodgemetric_core::MultiIndex::new(e);
            u.terms().iter().filter(|(m, _)| *m == idx).map(|(m, cf)| *cf * m.factorial()).sum::<hodgemetric_core::C64>()
        };
        let h = hodge_metric_at(&u, &origin).unwrap();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    assert!((f.get(i, j, k) + third(i, j, k) * 0.5).norm() < 1e-12);
                }
                let mut expected = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
                for a in 0..n {
                    for b in 0..n {
                        expected += third(i, a, b) * third(j, a, b).conj() * 0.25;
                    }
                }
                assert!((h[(i, j)] - expected).norm() < 1e-12);
            }
        }
    }
}
