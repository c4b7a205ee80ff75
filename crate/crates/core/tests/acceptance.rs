//! One line per acceptance criterion; the test fails if any line is FAIL.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use hodgemetric_core::asymptotics::{
    growth_bound_check, hypothesis_check, sample_ray, schwarz_bound_check, DegenerationFamily,
};
use hodgemetric_core::fd::Stencil;
use hodgemetric_core::fixtures::{self, CoefficientScales};
use hodgemetric_core::hodge_geometry::{
    hodge_curvature_analytic, hodge_curvature_fd, hodge_metric_at, poincare_calibration, sectional_bound_check,
    verify_bounds, HodgeCurvature,
};
use hodgemetric_core::linalg::{self, c, CMat};
use hodgemetric_core::period_domain::{
    check_hodge_riemann, constant_multiple_test, filtration_from_period, siegel_from_period,
};
use hodgemetric_core::prepotential::period_vector;
use hodgemetric_core::wp_geometry::{normal_gauge, wp_metric, yukawa, NormalGauge};
use hodgemetric_core::{c_n, MultiIndex, Prepotential, C64};

const INSTANCES_PER_N: u64 = 50;
const CONIFOLD_KAPPA: f64 = 0.02;

struct Line {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn line(name: &'static str, pass: bool, detail: String) -> Line {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    Line { name, pass, detail }
}

struct Instance {
    n: usize,
    u: Prepotential,
    z: Vec<C64>,
    ng: NormalGauge,
    hc: HodgeCurvature,
}

fn instances() -> Vec<Instance> {
    let specs: Vec<(usize, u64)> = (1..=3).flat_map(|n| (0..INSTANCES_PER_N).map(move |s| (n, s))).collect();
    specs
        .par_iter()
        .map(|&(n, s)| {
            let mut rng = fixtures::rng(10_000 * n as u64 + s);
            let u = fixtures::random_normalized_prepotential(n, CoefficientScales::default(), &mut rng);
            let z = fixtures::random_point(n, 0.1, &mut rng);
            let ng = normal_gauge(&period_vector(&u, &z, 4).unwrap()).unwrap();
            let hc = hodge_curvature_analytic(&ng.period).unwrap();
            Instance { n, u, z, ng, hc }
        })
        .collect()
}

fn third_derivative(u: &Prepotential, n: usize, vars: [usize; 3]) -> C64 {
    let idx = MultiIndex::from_vars(n, &vars);
    u.terms().iter().filter(|(m, _)| *m == idx).map(|(m, cf)| *cf * m.factorial()).sum()
}

fn origin_exactness() -> Line {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 1..=3 {
        for s in 0..10 {
            let u = fixtures::random_normalized_prepotential(n, CoefficientScales::default(), &mut fixtures::rng(s));
            let origin = vec![c(0.0, 0.0); n];
            let p = period_vector(&u, &origin, 4).unwrap();
            let omega = p.value();
            let pairing = p.q.pair(&omega, &omega.map(|x| x.conj())) * c(0.0, 1.0);
            worst = worst.max((pairing.norm() - 2.0).abs());
            let g = wp_metric(&p).unwrap();
            worst = worst.max(linalg::max_abs(&(&g.mat - CMat::identity(n, n) * c(0.5, 0.0))));
            let f = yukawa(&p).unwrap();
            let h = hodge_metric_at(&u, &origin).unwrap();
            let hn = hodge_curvature_analytic(&normal_gauge(&p).unwrap().period).unwrap().h.mat;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        worst = worst.max((f.get(i, j, k) + third_derivative(&u, n, [i, j, k]) * 0.5).norm());
                    }
                    let mut uu = c(0.0, 0.0);
                    for a in 0..n {
                        for b in 0..n {
                            uu += third_derivative(&u, n, [i, a, b]) * third_derivative(&u, n, [j, a, b]).conj();
                        }
                    }
                    let delta = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((h[(i, j)] - (uu * 0.25 + delta)).norm());
                    // normal coordinates are √2 times the BG ones
                    worst = worst.max((hn[(i, j)] - (uu * 0.5 + 2.0 * delta)).norm());
                }
            }
        }
    }
    let elapsed = start.elapsed();
    line(
        "origin exactness",
        worst <= 1e-12 && elapsed < Duration::from_secs(1),
        format!("max error {worst:.2e} (tol 1e-12), {:.3} s (limit 1 s)", elapsed.as_secs_f64()),
    )
}

fn curvature_oracle(set: &[Instance], elapsed_setup: Duration) -> Line {
    let start = Instant::now();
    let stencil = Stencil::default();
    let tol_fd = 1e-6f64.max(stencil.step * stencil.step);
    let rows: Vec<(f64, f64)> = set
        .par_iter()
        .map(|inst| {
            let scale = inst.hc.tensor.max_abs().max(1.0);
            let ab = inst.hc.tensor.max_abs_diff(&inst.hc.split.sum()) / scale;
            let fd = hodge_curvature_fd(&inst.u, &inst.z, &stencil).unwrap().transform(&inst.ng.linear);
            (ab, inst.hc.tensor.max_abs_diff(&fd) / scale)
        })
        .collect();
    let ab = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let fd = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let elapsed = start.elapsed() + elapsed_setup;
    line(
        "curvature oracle equivalence",
        ab <= 1e-10 && fd <= tol_fd && elapsed < Duration::from_secs(120),
        format!(
            "{} instances, closed form vs A+B {ab:.2e} (tol 1e-10), vs finite differences {fd:.2e} (tol {tol_fd:.0e}), {:.2} s (limit 120 s)",
            set.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn curvature_bounds(set: &[Instance]) -> Line {
    let reports: Vec<_> = set
        .par_iter()
        .enumerate()
        .map(|(k, inst)| verify_bounds(&inst.hc, 64, &mut fixtures::rng(k as u64)).unwrap())
        .collect();
    let directions: usize = reports.iter().map(|r| r.directions_tested).sum();
    let pairs: usize = reports.iter().map(|r| r.pairs_tested).sum();
    let failures = reports.iter().filter(|r| !r.passed()).count();
    let hol = reports.iter().map(|r| r.hol_sectional_margin).fold(f64::INFINITY, f64::min);
    let bis = reports.iter().map(|r| r.bisectional_min).fold(f64::INFINITY, f64::min);
    let ric = reports.iter().map(|r| r.ricci_margin).fold(f64::INFINITY, f64::min);
    let constants = c_n(1) == 5.0 && c_n(4) == 10.0;
    line(
        "holomorphic sectional, bisectional and Ricci bounds",
        failures == 0 && directions >= 10_000 && constants,
        format!(
            "{failures} failing instances, {directions} directions and {pairs} pairs tested, worst margins: c(n)·ratio − 1 = {hol:.4}, bisectional {bis:.4}, Ricci {ric:.4}; c(1) = {}, c(4) = {}",
            c_n(1),
            c_n(4)
        ),
    )
}

fn sectional_bound(set: &[Instance]) -> Line {
    let reports: Vec<_> = set
        .par_iter()
        .enumerate()
        .map(|(k, inst)| sectional_bound_check(&inst.hc, 1000, &mut fixtures::rng(7_000 + k as u64)).unwrap())
        .collect();
    let min_pairs = reports.iter().map(|r| r.pairs).min().unwrap_or(0);
    let violations: usize = reports.iter().map(|r| r.violations).sum();
    let lemma: usize = reports.iter().map(|r| r.lemma_violations).sum();
    let worst = reports.iter().map(|r| r.max_sectional_ratio).fold(0.0, f64::max);
    let worst_lemma = reports.iter().map(|r| r.max_lemma_ratio).fold(0.0, f64::max);
    line(
        "riemannian sectional curvature bound",
        violations == 0 && lemma == 0 && min_pairs >= 1000,
        format!(
            "{violations} violations of (3+C_p), {lemma} of (6+C_p), at least {min_pairs} pairs per instance; worst |R|/bound {worst:.4}, lemma {worst_lemma:.4}"
        ),
    )
}

fn constant_multiple() -> Line {
    let mut samples = vec![Prepotential::normalized_quadratic(2)];
    for n in 1..=3 {
        for s in 0..8 {
            samples.push(fixtures::random_normalized_prepotential(n, CoefficientScales::default(), &mut fixtures::rng(300 + s)));
        }
    }
    let rep = constant_multiple_test(&samples, &Stencil::default()).unwrap();
    let mean = rep.lambdas.iter().sum::<f64>() / rep.lambdas.len() as f64;
    let rel_spread = rep.lambda_spread / mean;
    line(
        "siegel pullback is a constant multiple of the Hodge metric",
        samples.len() >= 20 && rep.max_deviation < 1e-6 && rel_spread < 1e-6,
        format!(
            "{} samples, constant {mean:.10}, max deviation from scalar {:.2e}, relative spread {rel_spread:.2e} (tol 1e-6)",
            samples.len(),
            rep.max_deviation
        ),
    )
}

fn siegel_structure(set: &[Instance]) -> Line {
    let mut sym = 0.0f64;
    let mut d23 = 0.0f64;
    let mut inv = 0.0f64;
    let mut signs = Vec::new();
    for inst in set {
        let s = siegel_from_period(&period_vector(&inst.u, &inst.z, 1).unwrap()).unwrap();
        sym = sym.max(s.symmetry_residual());
        d23 = d23.max(s.d2_d3_residual);
        inv = inv.max(s.inverse_identity_residual);
        signs.push(s.convention_sign);
    }
    let constant_sign = signs.windows(2).all(|w| w[0] == w[1]);
    line(
        "siegel structure",
        sym < 1e-10 && d23 < 1e-10 && inv < 1e-10 && constant_sign,
        format!(
            "{} points, symmetry {sym:.2e}, D2−D3 {d23:.2e}, inverse identity {inv:.2e}, Im Z sign {} on all points: {constant_sign}",
            set.len(),
            signs[0]
        ),
    )
}

fn hodge_riemann(set: &[Instance]) -> Line {
    let mut worst = 0.0f64;
    let mut min_pos = f64::INFINITY;
    let mut all_pass = true;
    let mut conj_flagged = true;
    let mut swap_flagged = true;
    for inst in set {
        let f = filtration_from_period(&period_vector(&inst.u, &inst.z, 1).unwrap()).unwrap();
        let rep = check_hodge_riemann(&f).unwrap();
        worst = worst.max(rep.q_f3_f1).max(rep.q_f2_f2);
        min_pos = min_pos.min(rep.positivity.iter().copied().fold(f64::INFINITY, f64::min));
        all_pass &= rep.pass;
        conj_flagged &= !check_hodge_riemann(&f.conjugate()).unwrap().pass;
        swap_flagged &= !check_hodge_riemann(&f.with_conjugated_f2_vector(1)).unwrap().pass;
    }
    line(
        "hodge-riemann relations",
        worst < 1e-10 && all_pass && conj_flagged && swap_flagged,
        format!(
            "{} points, bilinear residual {worst:.2e} (tol 1e-10), smallest positivity eigenvalue {min_pos:.3}, conjugate flag flagged: {conj_flagged}, conjugated F2 vector flagged: {swap_flagged}",
            set.len()
        ),
    )
}

fn degeneration_probe() -> Line {
    let start = Instant::now();
    let family = DegenerationFamily::conifold(CONIFOLD_KAPPA).unwrap();
    let profile = sample_ray(&family, 0.7).unwrap();
    let complete = profile.rows.len() == family.samples;
    let hyp = hypothesis_check(&profile, 0.05).unwrap();
    let growth = growth_bound_check(&profile);
    let schwarz = schwarz_bound_check(&profile, 1e-3);
    let elapsed = start.elapsed();
    line(
        "degeneration probe",
        complete && hyp.pass && growth.bounded && growth.tail_decreasing && schwarz.pass && elapsed < Duration::from_secs(30),
        format!(
            "conifold κ = {CONIFOLD_KAPPA}, {} radii in [{:.0e}, {}], slope {:.4} (tol 0.05), C1 {:.3e}, tail decreasing {}, max Schwarz ratio {:.4} (tol 1+1e-3), {:.2} s (limit 30 s)",
            profile.rows.len(),
            family.r_min,
            family.r_max,
            hyp.slope,
            growth.c1,
            growth.tail_decreasing,
            schwarz.max_ratio,
            elapsed.as_secs_f64()
        ),
    )
}

fn poincare() -> Line {
    let v = poincare_calibration(&Stencil::default()).unwrap();
    line("poincare calibration", (v - 2.0).abs() <= 1e-8, format!("R(0) = {v:.12} (expected 2 ± 1e-8)"))
}

#[test]
fn acceptance() {
    let mut lines = vec![origin_exactness()];
    let start = Instant::now();
    let set = instances();
    assert!(set.iter().all(|i| i.n >= 1));
    lines.push(curvature_oracle(&set, start.elapsed()));
    lines.push(curvature_bounds(&set));
    lines.push(sectional_bound(&set));
    lines.push(constant_multiple());
    lines.push(siegel_structure(&set));
    lines.push(hodge_riemann(&set));
    lines.push(degeneration_probe());
    lines.push(poincare());
    let failed: Vec<String> = lines.iter().filter(|l| !l.pass).map(|l| format!("{}: {}", l.name, l.detail)).collect();
    println!("{} of {} criteria pass", lines.len() - failed.len(), lines.len());
    assert!(failed.is_empty(), "failing criteria: {failed:#?}");
}
