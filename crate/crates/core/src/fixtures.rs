//! Seeded random instances shared by tests, the acceptance suite and the CLI.
//!
//! All randomness flows from [`rng`], a ChaCha8 stream seeded with a `u64`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::jets::C64;
use crate::linalg::{c, CVec};
use crate::prepotential::Prepotential;

/// Name recorded in reports so runs can be reproduced elsewhere.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unit vector in `Cⁿ`.
pub fn random_unit_vector<R: Rng>(n: usize, rng: &mut R) -> CVec {
    loop {
        let v = CVec::from_fn(n, |_, _| complex_normal(rng));
        let nrm = v.norm();
        if nrm > 1e-8 {
            return v / c(nrm, 0.0);
        }
    }
}

/// Scales of the random Taylor coefficients above the normal-form quadratic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientScales {
    pub cubic: f64,
    pub quartic: f64,
    pub quintic: f64,
}

impl Default for CoefficientScales {
    fn default() -> Self {
        CoefficientScales { cubic: 0.8, quartic: 0.5, quintic: 0.3 }
    }
}

fn sorted_multisets(n: usize, degree: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(n, v, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, 0, degree, &mut Vec::new(), &mut out);
    out
}

/// `u = −i + (i/2)Σ(zⁱ)² + random cubic + quartic + quintic` (normal form at 0).
pub fn random_normalized_prepotential<R: Rng>(n: usize, scales: CoefficientScales, rng: &mut R) -> Prepotential {
    let mut u = Prepotential::normalized_quadratic(n);
    for (degree, scale) in [(3, scales.cubic), (4, scales.quartic), (5, scales.quintic)] {
        if scale == 0.0 {
            continue;
        }
        for vars in sorted_multisets(n, degree) {
            u = u.with_derivative_term(&vars, complex_normal(rng) * scale);
        }
    }
    u
}

/// Uniform point in the polydisc of the given radius.
pub fn random_point<R: Rng>(n: usize, radius: f64, rng: &mut R) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let t = rng.random::<f64>() * std::f64::consts::TAU;
            C64::from_polar(r, t)
        })
        .collect()
}
