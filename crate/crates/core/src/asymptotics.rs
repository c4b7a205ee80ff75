//! Behaviour of the Weil-Petersson density `λ = g₁₁̄` along rays into a puncture.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hodge_geometry::hodge_metric_at;
use crate::jets::C64;
use crate::linalg::{self, c};
use crate::prepotential::{period_vector, Prepotential};
use crate::wp_geometry::{kahler_potential, wp_metric, yukawa};

/// Exponent `4 c(1)` of the growth bound.
pub const GROWTH_EXPONENT: f64 = 20.0;

/// A one-modulus family of prepotentials with a puncture at `z = 0`.
#[derive(Clone, Debug)]
pub struct DegenerationFamily {
    pub name: String,
    pub u: Prepotential,
    pub r_min: f64,
    pub r_max: f64,
    pub samples: usize,
}

impl DegenerationFamily {
    pub fn new(name: &str, u: Prepotential) -> Result<Self> {
        if u.n() != 1 {
            return Err(Error::Dimension(format!("degeneration families have one modulus, got {}", u.n())));
        }
        Ok(DegenerationFamily { name: name.to_string(), u, r_min: 1e-6, r_max: 0.5, samples: 40 })
    }

    /// `u = −i + (i/2)z² − iκ z² log z`
    pub fn conifold(kappa: f64) -> Result<Self> {
        let u = Prepotential::normalized_quadratic(1).with_log_term(2, 1, c(0.0, -kappa))?;
        Self::new("conifold", u)
    }

    /// `u = −i + (i/2)z² + b z³/6 − iκ z² log z`
    pub fn cubic_log(b: f64, kappa: f64) -> Result<Self> {
        let u = Prepotential::normalized_quadratic(1)
            .with_derivative_term(&[0, 0, 0], c(b, 0.0))
            .with_log_term(2, 1, c(0.0, -kappa))?;
        Self::new("cubic-log", u)
    }

    /// `u = −i + (i/2)z²`, no degeneration.
    pub fn quadratic() -> Result<Self> {
        Self::new("quadratic", Prepotential::normalized_quadratic(1))
    }

    pub fn with_grid(mut self, r_min: f64, r_max: f64, samples: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && samples >= 2) {
            return Err(Error::InsufficientSamples(format!("bad radius grid [{r_min}, {r_max}] x {samples}")));
        }
        self.r_min = r_min;
        self.r_max = r_max;
        self.samples = samples;
        Ok(self)
    }

    /// Geometric grid, ascending.
    pub fn radii(&self) -> Vec<f64> {
        let (a, b) = (self.r_min.ln(), self.r_max.ln());
        let k = self.samples - 1;
        (0..self.samples).map(|i| (a + (b - a) * i as f64 / k as f64).exp()).collect()
    }

    /// Errors unless `g₁₁̄ > 0` at every grid radius on the given ray.
    pub fn validate(&self, angle: f64) -> Result<()> {
        for r in self.radii() {
            density(&self.u, C64::from_polar(r, angle))?;
        }
        Ok(())
    }
}

fn density(u: &Prepotential, z: C64) -> Result<(f64, f64)> {
    let p = period_vector(u, &[z], 1)?;
    let lambda = wp_metric(&p)?.mat[(0, 0)].re;
    let h = hodge_metric_at(u, &[z])?[(0, 0)].re;
    Ok((lambda, h))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayRow {
    pub r: f64,
    pub lambda: f64,
    pub h11: f64,
}

impl RayRow {
    pub fn log_inv_r(&self) -> f64 {
        (1.0 / self.r).ln()
    }

    /// `λ / (log 1/r)^{20}`
    pub fn ratio_growth(&self) -> f64 {
        self.lambda / self.log_inv_r().powf(GROWTH_EXPONENT)
    }

    /// `h₁₁̄ (r log 1/r)² / c(1)`
    pub fn ratio_schwarz(&self) -> f64 {
        let s = self.r * self.log_inv_r();
        self.h11 * s * s / crate::c_n(1)
    }
}

/// Samples along one ray, sorted by increasing radius.
#[derive(Clone, Debug)]
pub struct RayProfile {
    pub angle: f64,
    pub rows: Vec<RayRow>,
}

impl RayProfile {
    pub fn from_values(angle: f64, radii: &[f64], lambda: &[f64], h11: &[f64]) -> Result<Self> {
        if radii.len() != lambda.len() || radii.len() != h11.len() {
            return Err(Error::Dimension("profile columns differ in length".into()));
        }
        let mut rows: Vec<RayRow> = radii
            .iter()
            .zip(lambda)
            .zip(h11)
            .map(|((&r, &l), &h)| RayRow { r, lambda: l, h11: h })
            .collect();
        rows.sort_by(|a, b| a.r.total_cmp(&b.r));
        Ok(RayProfile { angle, rows })
    }

    /// Least-squares slope of `log λ` against `log(1/r)` over the `k` smallest radii.
    pub fn fitted_slope(&self, k: usize) -> Result<f64> {
        if self.rows.len() < k || k < 2 {
            return Err(Error::InsufficientSamples(format!("need {k} radii, have {}", self.rows.len())));
        }
        let pts: Vec<(f64, f64)> = self.rows[..k].iter().map(|r| (r.log_inv_r(), r.lambda.ln())).collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k as f64;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        Ok(sxy / sxx)
    }
}

/// `λ` and `h₁₁̄` at every grid radius; stops at the first radius where positivity fails.
pub fn sample_ray(f: &DegenerationFamily, angle: f64) -> Result<RayProfile> {
    let radii = f.radii();
    let values: Vec<Result<(f64, f64)>> = radii
        .par_iter()
        .map(|&r| density(&f.u, C64::from_polar(r, angle)))
        .collect();
    let mut rows = Vec::with_capacity(radii.len());
    for (&r, v) in radii.iter().zip(values) {
        match v {
            Ok((lambda, h11)) if lambda > 0.0 && h11 > 0.0 => rows.push(RayRow { r, lambda, h11 }),
            Ok(_) | Err(Error::NotNormal) => {
                log::warn!("{}: metric not positive at r = {r:e}, profile truncated", f.name);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    if rows.is_empty() {
        return Err(Error::InsufficientSamples(format!("{}: no admissible radii", f.name)));
    }
    Ok(RayProfile { angle, rows })
}

/// Number of smallest radii used for the slope fit.
pub const SLOPE_WINDOW: usize = 10;

#[derive(Clone, Debug)]
pub struct HypothesisReport {
    pub slope: f64,
    pub pass: bool,
}

/// `lim log λ / log(1/r) = 0`, tested as a small fitted slope over the smallest radii.
pub fn hypothesis_check(p: &RayProfile, tol: f64) -> Result<HypothesisReport> {
    if p.rows.len() < SLOPE_WINDOW {
        return Err(Error::InsufficientSamples(format!("need {SLOPE_WINDOW} radii, have {}", p.rows.len())));
    }
    let decades = (p.rows.last().expect("nonempty").r / p.rows[0].r).log10();
    if decades < 3.0 {
        return Err(Error::InsufficientSamples(format!("radii span {decades:.2} decades, need 3")));
    }
    let slope = p.fitted_slope(SLOPE_WINDOW)?;
    Ok(HypothesisReport { slope, pass: slope.abs() < tol })
}

#[derive(Clone, Debug)]
pub struct GrowthReport {
    /// `sup λ / (log 1/r)^{20}` over the profile, the smallest admissible `C₁`.
    pub c1: f64,
    pub tail_ratio_max: f64,
    /// The ratio does not increase as `r` decreases over the smallest radii.
    pub tail_decreasing: bool,
    pub bounded: bool,
}

pub fn growth_bound_check(p: &RayProfile) -> GrowthReport {
    let ratios: Vec<f64> = p.rows.iter().filter(|r| r.r < 1.0).map(RayRow::ratio_growth).collect();
    let c1 = ratios.iter().copied().fold(0.0, f64::max);
    let tail = &ratios[..SLOPE_WINDOW.min(ratios.len())];
    // rows are ascending in r, so the ratio should grow along the slice
    let tail_decreasing = tail.windows(2).all(|w| w[0] <= w[1]);
    GrowthReport {
        c1,
        tail_ratio_max: tail.iter().copied().fold(0.0, f64::max),
        tail_decreasing,
        bounded: c1.is_finite(),
    }
}

#[derive(Clone, Debug)]
pub struct SchwarzReport {
    pub max_ratio: f64,
    pub argmax_r: f64,
    pub pass: bool,
}

/// `h₁₁̄ ≤ c(1) / (r log 1/r)²` at every sampled radius.
pub fn schwarz_bound_check(p: &RayProfile, tol: f64) -> SchwarzReport {
    let (argmax_r, max_ratio) = p
        .rows
        .iter()
        .map(|r| (r.r, r.ratio_schwarz()))
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    SchwarzReport { max_ratio, argmax_r, pass: max_ratio <= 1.0 + tol }
}

/// Both sides of `λ⁻¹ e^{2K} F₁₁ξ F̄₁₁η g^{ξη̄} ≤ e^{2K} F₁αξ F̄₁βη g^{αβ̄} g^{ξη̄}` at `z`.
pub fn diagonal_lemma_check(u: &Prepotential, z: &[C64]) -> Result<(f64, f64)> {
    let p = period_vector(u, z, 3)?;
    let g = wp_metric(&p)?;
    let f = yukawa(&p)?;
    let e2k = kahler_potential(&p)?.e2k();
    let up = linalg::raise(&g.mat, "Weil-Petersson metric")?;
    let n = z.len();
    let lambda = g.mat[(0, 0)].re;
    let mut lhs = c(0.0, 0.0);
    let mut rhs = c(0.0, 0.0);
    for xi in 0..n {
        for eta in 0..n {
            lhs += f.get(0, 0, xi) * f.get(0, 0, eta).conj() * up[(xi, eta)];
            for a in 0..n {
                for b in 0..n {
                    rhs += f.get(0, a, xi) * f.get(0, b, eta).conj() * up[(a, b)] * up[(xi, eta)];
                }
            }
        }
    }
    Ok((lhs.re * e2k / lambda, rhs.re * e2k))
}
