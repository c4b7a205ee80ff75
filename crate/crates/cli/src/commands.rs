//! Dispatch of configured commands and assembly of the report.

use rayon::prelude::*;
use serde::Serialize;

use hodgemetric_core::asymptotics::{
    growth_bound_check, hypothesis_check, sample_ray, schwarz_bound_check, DegenerationFamily,
};
use hodgemetric_core::fd::Stencil;
use hodgemetric_core::fixtures::{self, CoefficientScales, RNG_ALGORITHM};
use hodgemetric_core::hodge_geometry::{
    hodge_curvature_at, hodge_curvature_fd, poincare_calibration, sectional_bound_check, verify_bounds,
};
use hodgemetric_core::linalg;
use hodgemetric_core::period_domain::{
    check_hodge_riemann, constant_multiple_test, filtration_from_period, siegel_from_period,
};
use hodgemetric_core::prepotential::period_vector;
use hodgemetric_core::{Prepotential, C64};

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::report::{cmat, cvec, cx, CommandReport, Complex, Matrix, ProfileRecord, Report, RngInfo, Table};

const STREAMS: &str = "ChaCha8Rng::seed_from_u64(seed + (tag << 32) + index), tag 0 for random points, \
                       1 for verify-bounds directions, 2 for sectional pairs, 3 for constant-multiple samples";

fn stream(seed: u64, tag: u64, index: usize) -> u64 {
    seed.wrapping_add(tag << 32).wrapping_add(index as u64)
}

/// Outcome at one base point.
#[derive(Serialize)]
struct PointOutcome<T: Serialize> {
    index: usize,
    point: Vec<Complex>,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    result: Option<T>,
}

fn per_point<T, F>(points: &[Vec<C64>], f: F) -> (bool, serde_json::Value)
where
    T: Serialize + Send,
    F: Fn(usize, &[C64]) -> hodgemetric_core::Result<(bool, T)> + Sync,
{
    let outcomes: Vec<PointOutcome<T>> = points
        .par_iter()
        .enumerate()
        .map(|(index, z)| {
            let point = cvec(z);
            match f(index, z) {
                Ok((pass, result)) => PointOutcome { index, point, pass, error: None, result: Some(result) },
                Err(e) => PointOutcome { index, point, pass: false, error: Some(e.to_string()), result: None },
            }
        })
        .collect();
    let pass = outcomes.iter().all(|o| o.pass);
    (pass, serde_json::json!({ "points": outcomes }))
}

#[derive(Serialize)]
struct Component {
    index: [usize; 4],
    value: Complex,
}

#[derive(Serialize)]
struct CurvatureResult {
    /// Hodge metric in normal coordinates at the point.
    hodge_metric: Matrix,
    neg_ricci_eigenvalues: Vec<f64>,
    c_p: f64,
    tensor_scale: f64,
    symmetry_residual: f64,
    split_residual: f64,
    fd_residual: f64,
    components: Vec<Component>,
}

fn curvature(cfg: &RunConfig, u: &Prepotential, points: &[Vec<C64>]) -> (bool, serde_json::Value) {
    let stencil = Stencil { step: cfg.fd_step, richardson: true };
    let tol = &cfg.tolerances;
    per_point(points, |_, z| {
        let (ng, hc) = hodge_curvature_at(u, z)?;
        let scale = hc.tensor.max_abs().max(1.0);
        let split_residual = hc.tensor.max_abs_diff(&hc.split.sum()) / scale;
        let fd = hodge_curvature_fd(u, z, &stencil)?.transform(&ng.linear);
        let fd_residual = hc.tensor.max_abs_diff(&fd) / scale;
        let neg_ricci_eigenvalues = hc.neg_ricci_eigenvalues()?;
        let n = hc.n();
        let mut components = Vec::with_capacity(n.pow(4));
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        components.push(Component { index: [i, j, k, l], value: cx(hc.tensor.get(i, j, k, l)) });
                    }
                }
            }
        }
        let pass = split_residual <= tol.curvature && fd_residual <= tol.curvature_fd;
        Ok((
            pass,
            CurvatureResult {
                hodge_metric: cmat(&hc.h.mat),
                c_p: neg_ricci_eigenvalues[n - 1],
                neg_ricci_eigenvalues,
                tensor_scale: scale,
                symmetry_residual: hc.tensor.symmetry_residual(),
                split_residual,
                fd_residual,
                components,
            },
        ))
    })
}

#[derive(Serialize)]
struct BoundsResult {
    c_n: f64,
    min_holomorphic_ratio: f64,
    holomorphic_margin: f64,
    extremal_direction: Vec<Complex>,
    bisectional_min: f64,
    ricci_margin: f64,
    ricci_trace_min: f64,
    c_p: f64,
    directions_tested: usize,
    pairs_tested: usize,
    sectional_pairs: usize,
    max_sectional_ratio: f64,
    max_lemma_ratio: f64,
    holomorphic_pass: bool,
    bisectional_pass: bool,
    ricci_pass: bool,
    sectional_pass: bool,
}

fn bounds(cfg: &RunConfig, u: &Prepotential, points: &[Vec<C64>], seed: u64) -> (bool, serde_json::Value) {
    let tol = cfg.tolerances.bounds;
    per_point(points, |index, z| {
        let (_, hc) = hodge_curvature_at(u, z)?;
        let b = verify_bounds(&hc, cfg.sweep.directions, &mut fixtures::rng(stream(seed, 1, index)))?;
        let s = sectional_bound_check(&hc, cfg.sweep.pairs, &mut fixtures::rng(stream(seed, 2, index)))?;
        let holomorphic_pass = b.hol_sectional_margin >= -tol;
        let bisectional_pass = b.bisectional_min >= -tol;
        let ricci_pass = b.ricci_margin >= -tol && b.ricci_trace_min >= -tol;
        let sectional_pass = s.max_sectional_ratio <= 1.0 + tol && s.max_lemma_ratio <= 1.0 + tol;
        Ok((
            holomorphic_pass && bisectional_pass && ricci_pass && sectional_pass,
            BoundsResult {
                c_n: b.c_n,
                min_holomorphic_ratio: b.min_holomorphic_ratio,
                holomorphic_margin: b.hol_sectional_margin,
                extremal_direction: cvec(&b.extremal_direction),
                bisectional_min: b.bisectional_min,
                ricci_margin: b.ricci_margin,
                ricci_trace_min: b.ricci_trace_min,
                c_p: s.c_p,
                directions_tested: b.directions_tested,
                pairs_tested: b.pairs_tested,
                sectional_pairs: s.pairs,
                max_sectional_ratio: s.max_sectional_ratio,
                max_lemma_ratio: s.max_lemma_ratio,
                holomorphic_pass,
                bisectional_pass,
                ricci_pass,
                sectional_pass,
            },
        ))
    })
}

#[derive(Serialize)]
struct SiegelResult {
    z: Matrix,
    convention_sign: f64,
    imaginary_part_eigenvalues: Vec<f64>,
    symmetry_residual: f64,
    d2_d3_residual: f64,
    inverse_identity_residual: f64,
    closed_form_residual: f64,
    plus_sign_residual: f64,
}

fn siegel(cfg: &RunConfig, u: &Prepotential, points: &[Vec<C64>]) -> (bool, serde_json::Value) {
    let tol = cfg.tolerances.siegel;
    per_point(points, |_, z| {
        let s = siegel_from_period(&period_vector(u, z, 1)?)?;
        let eig = linalg::hermitian_eigenvalues(&s.imaginary_part());
        let r = SiegelResult {
            z: cmat(&s.z),
            convention_sign: s.convention_sign,
            imaginary_part_eigenvalues: eig.clone(),
            symmetry_residual: s.symmetry_residual(),
            d2_d3_residual: s.d2_d3_residual,
            inverse_identity_residual: s.inverse_identity_residual,
            closed_form_residual: s.closed_form_residual(),
            plus_sign_residual: s.plus_sign_residual,
        };
        let pass = r.symmetry_residual <= tol
            && r.d2_d3_residual <= tol
            && r.inverse_identity_residual <= tol
            && r.closed_form_residual <= tol
            && eig.iter().all(|&e| e > 0.0);
        Ok((pass, r))
    })
}

#[derive(Serialize)]
struct HodgeRiemannResult {
    q_f3_f1: f64,
    q_f2_f2: f64,
    positivity: [f64; 4],
    weil_form_min: f64,
    weil_square_residual: f64,
    nested: bool,
    conjugate_flagged: bool,
    conjugated_f2_vector_flagged: bool,
}

fn hodge_riemann(cfg: &RunConfig, u: &Prepotential, points: &[Vec<C64>]) -> (bool, serde_json::Value) {
    let tol = cfg.tolerances.hodge_riemann;
    let flagged = |r: hodgemetric_core::Result<_>| !matches!(r, Ok(hodgemetric_core::period_domain::HodgeRiemannReport { pass: true, .. }));
    per_point(points, |_, z| {
        let f = filtration_from_period(&period_vector(u, z, 1)?)?;
        let rep = check_hodge_riemann(&f)?;
        let r = HodgeRiemannResult {
            q_f3_f1: rep.q_f3_f1,
            q_f2_f2: rep.q_f2_f2,
            positivity: rep.positivity,
            weil_form_min: rep.weil_form_min,
            weil_square_residual: rep.weil_square_residual,
            nested: rep.nested,
            conjugate_flagged: flagged(check_hodge_riemann(&f.conjugate())),
            conjugated_f2_vector_flagged: flagged(check_hodge_riemann(&f.with_conjugated_f2_vector(1))),
        };
        let pass = rep.pass
            && r.q_f3_f1 <= tol
            && r.q_f2_f2 <= tol
            && r.weil_square_residual <= tol
            && r.conjugate_flagged
            && r.conjugated_f2_vector_flagged;
        Ok((pass, r))
    })
}

#[derive(Serialize)]
struct ConstantMultipleResult {
    samples: usize,
    lambdas: Vec<f64>,
    mean_lambda: f64,
    max_deviation: f64,
    relative_spread: f64,
}

fn constant_multiple(cfg: &RunConfig, u: &Prepotential, seed: Option<u64>) -> hodgemetric_core::Result<(bool, ConstantMultipleResult)> {
    let mut samples = Vec::new();
    if cfg.constant_multiple.include_config {
        samples.push(u.clone());
    }
    if let Some(seed) = seed {
        for k in 0..cfg.constant_multiple.random_samples {
            let mut rng = fixtures::rng(stream(seed, 3, k));
            samples.push(fixtures::random_normalized_prepotential(cfg.n, CoefficientScales::default(), &mut rng));
        }
    }
    let rep = constant_multiple_test(&samples, &Stencil { step: cfg.fd_step, richardson: true })?;
    let mean_lambda = rep.lambdas.iter().sum::<f64>() / rep.lambdas.len() as f64;
    let relative_spread = rep.lambda_spread / mean_lambda.abs();
    let tol = cfg.tolerances.constant_multiple;
    Ok((
        rep.max_deviation < tol && relative_spread < tol,
        ConstantMultipleResult {
            samples: samples.len(),
            lambdas: rep.lambdas,
            mean_lambda,
            max_deviation: rep.max_deviation,
            relative_spread,
        },
    ))
}

#[derive(Serialize)]
struct DegenerationResult {
    angle: f64,
    radii_requested: usize,
    radii_sampled: usize,
    slope: f64,
    slope_pass: bool,
    c1: f64,
    tail_ratio_max: f64,
    tail_decreasing: bool,
    schwarz_max_ratio: f64,
    schwarz_argmax_r: f64,
    schwarz_pass: bool,
    profile_csv: String,
}

fn degeneration(cfg: &RunConfig, u: &Prepotential) -> hodgemetric_core::Result<(bool, DegenerationResult, Table)> {
    let d = &cfg.degeneration;
    let family = DegenerationFamily::new("config", u.clone())?.with_grid(d.r_min, d.r_max, d.samples)?;
    let profile = sample_ray(&family, d.angle)?;
    let hyp = hypothesis_check(&profile, cfg.tolerances.slope)?;
    let growth = growth_bound_check(&profile);
    let schwarz = schwarz_bound_check(&profile, cfg.tolerances.schwarz);
    let complete = profile.rows.len() == d.samples;
    let r = DegenerationResult {
        angle: d.angle,
        radii_requested: d.samples,
        radii_sampled: profile.rows.len(),
        slope: hyp.slope,
        slope_pass: hyp.pass,
        c1: growth.c1,
        tail_ratio_max: growth.tail_ratio_max,
        tail_decreasing: growth.tail_decreasing,
        schwarz_max_ratio: schwarz.max_ratio,
        schwarz_argmax_r: schwarz.argmax_r,
        schwarz_pass: schwarz.pass,
        profile_csv: cfg.output.profile_csv.clone(),
    };
    let pass = complete && hyp.pass && growth.bounded && growth.tail_decreasing && schwarz.pass;
    let table = Table { file: cfg.output.profile_csv.clone(), rows: profile.rows.iter().map(ProfileRecord::from).collect() };
    Ok((pass, r, table))
}

fn base_points(cfg: &RunConfig) -> Vec<Vec<C64>> {
    let mut pts = cfg.explicit_points();
    if let (Some(r), Some(seed)) = (&cfg.random_points, cfg.seed) {
        let mut rng = fixtures::rng(stream(seed, 0, 0));
        for _ in 0..r.count {
            pts.push(fixtures::random_point(cfg.n, r.radius, &mut rng));
        }
    }
    pts
}

fn to_value<T: Serialize>(t: &T) -> serde_json::Value {
    serde_json::to_value(t).expect("result serializes")
}

/// Runs every configured command; check failures are recorded in the report, not returned as errors.
pub fn run(cfg: &RunConfig) -> Result<(Report, Vec<Table>), CliError> {
    cfg.validate()?;
    let u = cfg.prepotential()?;
    let points = base_points(cfg);
    let seed = cfg.seed;
    let mut tables = Vec::new();
    let mut commands = Vec::new();
    for cmd in cfg.command_order() {
        log::info!("running {cmd}");
        let report = match cmd {
            Command::Curvature => {
                let (pass, result) = curvature(cfg, &u, &points);
                CommandReport { command: cmd, pass, error: None, result }
            }
            Command::VerifyBounds => {
                let seed = seed.expect("validated: seed present");
                let (pass, result) = bounds(cfg, &u, &points, seed);
                CommandReport { command: cmd, pass, error: None, result }
            }
            Command::ProjectSiegel => {
                let (pass, result) = siegel(cfg, &u, &points);
                CommandReport { command: cmd, pass, error: None, result }
            }
            Command::HodgeRiemann => {
                let (pass, result) = hodge_riemann(cfg, &u, &points);
                CommandReport { command: cmd, pass, error: None, result }
            }
            Command::ConstantMultiple => match constant_multiple(cfg, &u, seed) {
                Ok((pass, r)) => CommandReport { command: cmd, pass, error: None, result: to_value(&r) },
                Err(e) => CommandReport::failed(cmd, e.to_string()),
            },
            Command::DegenerationProbe => match degeneration(cfg, &u) {
                Ok((pass, r, table)) => {
                    tables.push(table);
                    CommandReport { command: cmd, pass, error: None, result: to_value(&r) }
                }
                Err(e) => CommandReport::failed(cmd, e.to_string()),
            },
            Command::CalibratePoincare => {
                match poincare_calibration(&Stencil { step: cfg.fd_step, richardson: true }) {
                    Ok(v) => CommandReport {
                        command: cmd,
                        pass: (v - 2.0).abs() <= cfg.tolerances.poincare,
                        error: None,
                        result: serde_json::json!({ "curvature_at_origin": v, "expected": 2.0, "classical_gaussian_curvature": -4.0 }),
                    },
                    Err(e) => CommandReport::failed(cmd, e.to_string()),
                }
            }
        };
        log::info!("{cmd}: {}", if report.pass { "pass" } else { "FAIL" });
        commands.push(report);
    }
    let report = Report {
        tool: "hodgemetric",
        version: env!("CARGO_PKG_VERSION"),
        rng: RngInfo { algorithm: RNG_ALGORITHM, seed, streams: STREAMS },
        config: cfg.clone(),
        pass: commands.iter().all(|c| c.pass),
        commands,
    };
    Ok((report, tables))
}
