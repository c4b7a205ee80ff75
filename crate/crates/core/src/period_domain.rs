//! Hodge filtrations on `C^{2n+2}`, the Hodge–Riemann relations, and the
//! projection of a horizontal slice into the Siegel space `Sp(n+1,R)/U(n+1)`.
//!
//! Vectors use the block layout `(x₀, x₁…xₙ, y₀, y₁…yₙ)` with
//! `Q(x, y) = xᵗ [[0, I], [−I, 0]] y`.

use crate::error::{Error, Result};
use crate::fd::{self, Stencil};
use crate::jets::{Jet, C64};
use crate::linalg::{self, c, CMat, CVec};
use crate::prepotential::{period_vector, PeriodJet, Prepotential, SymplecticForm};
use crate::hodge_geometry::hodge_metric_at;
use crate::wp_geometry::HermitianTensor;

/// Relative threshold for rank decisions on filtration bases.
const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct HodgeFiltration {
    pub f3: Vec<CVec>,
    pub f2: Vec<CVec>,
    pub f1: Vec<CVec>,
    pub q: SymplecticForm,
}

impl HodgeFiltration {
    pub fn n(&self) -> usize {
        self.q.dim() / 2 - 1
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.f3.len(), self.f2.len(), self.f1.len())
    }

    /// Whether `F³ ⊂ F² ⊂ F¹` by rank comparison.
    pub fn is_nested(&self) -> bool {
        let r = |v: &[CVec]| linalg::rank(&linalg::columns_to_matrix(v), RANK_TOL);
        let join = |a: &[CVec], b: &[CVec]| -> Vec<CVec> { a.iter().chain(b).cloned().collect() };
        r(&join(&self.f2, &self.f3)) == r(&self.f2) && r(&join(&self.f1, &self.f2)) == r(&self.f1)
    }

    /// Multiplies every basis vector of `F³` by `s`; the filtration is unchanged as a flag.
    pub fn with_scaled_f3(&self, s: C64) -> HodgeFiltration {
        let mut out = self.clone();
        for v in out.f3.iter_mut() {
            *v *= s;
        }
        out
    }

    /// Complex conjugate flag `F̄³ ⊂ F̄² ⊂ F̄¹`, which violates the positivity relation.
    pub fn conjugate(&self) -> HodgeFiltration {
        let conj = |v: &[CVec]| v.iter().map(|x| x.map(|y| y.conj())).collect();
        HodgeFiltration { f3: conj(&self.f3), f2: conj(&self.f2), f1: conj(&self.f1), q: self.q.clone() }
    }

    /// Replaces the `index`-th basis vector of `F²` by its conjugate.
    pub fn with_conjugated_f2_vector(&self, index: usize) -> HodgeFiltration {
        let mut out = self.clone();
        out.f2[index] = out.f2[index].map(|y| y.conj());
        out
    }
}

/// `F³ = ⟨Ω⟩`, `F² = ⟨Ω, ∂ᵢΩ⟩`, `F¹ = (F³)^{⊥Q}` at the base point.
pub fn filtration_from_period(p: &PeriodJet) -> Result<HodgeFiltration> {
    let n = p.n();
    let omega = p.value();
    let mut f2 = vec![omega.clone()];
    for i in 0..n {
        f2.push(p.deriv(&[i])?);
    }
    let r = linalg::rank(&linalg::columns_to_matrix(&f2), RANK_TOL);
    if r != n + 1 {
        return Err(Error::RankDeficient(format!("Ω and its first derivatives span dimension {r}, need {}", n + 1)));
    }
    let t = omega.transpose() * p.q.matrix();
    let row = CMat::from_fn(1, t.ncols(), |_, k| t[k]);
    let f1 = linalg::null_space(&row, RANK_TOL);
    if f1.len() != 2 * n + 1 {
        return Err(Error::RankDeficient(format!("Q-complement of F³ has dimension {}", f1.len())));
    }
    Ok(HodgeFiltration { f3: vec![omega], f2, f1, q: p.q.clone() })
}

/// The Hodge decomposition `H^{3,0} ⊕ H^{2,1} ⊕ H^{1,2} ⊕ H^{0,3}` and the operator acting as `i^{p−q}`.
#[derive(Clone, Debug)]
pub struct WeilOperator {
    /// Bases of `H^{3,0}`, `H^{2,1}`, `H^{1,2}`, `H^{0,3}` in that order.
    pub pieces: [Vec<CVec>; 4],
    pub matrix: CMat,
}

/// `i^{p−q}` for the four pieces in storage order.
const WEIGHTS: [C64; 4] = [C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0)];

/// `H^{3,0} = F³`, `H^{2,1} = F² ∩ (F̄³)^{⊥Q}`, and their conjugates.
pub fn weil_operator(f: &HodgeFiltration) -> Result<WeilOperator> {
    let n = f.n();
    let f3bar: Vec<CVec> = f.f3.iter().map(|v| v.map(|x| x.conj())).collect();
    let rows = CMat::from_fn(f3bar.len(), f.f2.len(), |r, k| f.q.pair(&f.f2[k], &f3bar[r]));
    let coeffs = linalg::null_space(&rows, RANK_TOL);
    let basis = linalg::columns_to_matrix(&f.f2);
    let h21: Vec<CVec> = coeffs.iter().map(|cf| &basis * cf).collect();
    if h21.len() != n {
        return Err(Error::RankDeficient(format!("H^(2,1) has dimension {}, expected {n}", h21.len())));
    }
    let conj = |v: &[CVec]| -> Vec<CVec> { v.iter().map(|x| x.map(|y| y.conj())).collect() };
    let pieces = [f.f3.clone(), h21.clone(), conj(&h21), conj(&f.f3)];
    let all: Vec<CVec> = pieces.iter().flatten().cloned().collect();
    let p = linalg::columns_to_matrix(&all);
    let pinv = p.clone().try_inverse().ok_or(Error::RankDeficient("Hodge pieces do not span H".into()))?;
    let mut diag = Vec::with_capacity(all.len());
    for (piece, w) in pieces.iter().zip(WEIGHTS) {
        diag.extend(std::iter::repeat_n(w, piece.len()));
    }
    let d = CMat::from_diagonal(&CVec::from_vec(diag));
    Ok(WeilOperator { pieces, matrix: &p * d * pinv })
}

#[derive(Clone, Debug)]
pub struct HodgeRiemannReport {
    /// `max |Q(F³, F¹)|`, relative to the basis norms.
    pub q_f3_f1: f64,
    /// `max |Q(F², F²)|`, relative to the basis norms.
    pub q_f2_f2: f64,
    /// Smallest eigenvalue of `i^{p−q} Q(ψ, ψ̄)` on each piece, relative to the basis Gram matrix.
    pub positivity: [f64; 4],
    /// Smallest eigenvalue of `Q(Cψ, ψ̄)` over all of `H`.
    pub weil_form_min: f64,
    /// `‖C² + I‖`
    pub weil_square_residual: f64,
    pub nested: bool,
    pub pass: bool,
}

pub const HODGE_RIEMANN_TOL: f64 = 1e-10;

fn max_relative_pairing(q: &SymplecticForm, a: &[CVec], b: &[CVec]) -> f64 {
    let mut r = 0.0f64;
    for x in a {
        for y in b {
            r = r.max(q.pair(x, y).norm() / (x.norm() * y.norm()).max(1e-300));
        }
    }
    r
}

fn positivity_on(q: &SymplecticForm, basis: &[CVec], weight: C64) -> Result<f64> {
    let k = basis.len();
    let form = CMat::from_fn(k, k, |a, b| q.pair(&basis[a], &basis[b].map(|x| x.conj())) * weight);
    let gram = CMat::from_fn(k, k, |a, b| basis[b].dotc(&basis[a]));
    // form[(a, b)] pairs ψ_a with ψ̄_b, so it is the matrix of ψ ↦ Σ xₐ x̄_b form_ab
    Ok(linalg::relative_eigenvalues(&form, &gram)?[0])
}

/// Residuals of `Q(F³,F¹) = 0`, `Q(F²,F²) = 0` and the positivity of `i^{p−q} Q(ψ, ψ̄)`.
pub fn check_hodge_riemann(f: &HodgeFiltration) -> Result<HodgeRiemannReport> {
    let q_f3_f1 = max_relative_pairing(&f.q, &f.f3, &f.f1);
    let q_f2_f2 = max_relative_pairing(&f.q, &f.f2, &f.f2);
    let nested = f.is_nested();
    let (positivity, weil_form_min, weil_square_residual) = match weil_operator(f) {
        Ok(w) => {
            let mut pos = [0.0; 4];
            for (slot, (piece, wt)) in w.pieces.iter().zip(WEIGHTS).enumerate() {
                pos[slot] = positivity_on(&f.q, piece, wt)?;
            }
            let dim = f.q.dim();
            // x ↦ Q(Cx, x̄) = xᵗ Cᵗ Q x̄
            let form = w.matrix.transpose() * f.q.matrix();
            let herm_res = linalg::hermitian_residual(&form);
            let weil_min = linalg::hermitian_eigenvalues(&form)[0] - herm_res;
            let sq = &w.matrix * &w.matrix + CMat::identity(dim, dim);
            (pos, weil_min, linalg::max_abs(&sq))
        }
        Err(Error::RankDeficient(_)) => ([f64::NAN; 4], f64::NAN, f64::NAN),
        Err(e) => return Err(e),
    };
    let pass = q_f3_f1 < HODGE_RIEMANN_TOL
        && q_f2_f2 < HODGE_RIEMANN_TOL
        && nested
        && positivity.iter().all(|&x| x > HODGE_RIEMANN_TOL)
        && weil_form_min > HODGE_RIEMANN_TOL
        && weil_square_residual < 1e-8;
    Ok(HodgeRiemannReport { q_f3_f1, q_f2_f2, positivity, weil_form_min, weil_square_residual, nested, pass })
}

/// A point of the Siegel space together with the intermediates of the projection.
#[derive(Clone, Debug)]
pub struct SiegelPoint {
    /// `Z = M⁻¹ N` for the projected plane written as rows `(M | N)`.
    pub z: CMat,
    /// `Z` from the closed-form blocks `D₁ = a − zᵗ(α − Āz) − μ(zᵗξ)²`,
    /// `D₂ = D₃ = (a − ā)μξ + B(ᾱ − Āz̄)`, `D₄ = Ā − μξξᵗ`.
    pub z_closed_form: CMat,
    /// `+1` if `Im Z ≻ 0`, `−1` if `Im Z ≺ 0`.
    pub convention_sign: f64,
    pub m: C64,
    pub xi: CVec,
    pub mu: C64,
    pub b: CMat,
    /// `‖D₂ − D₃‖` of the product route.
    pub d2_d3_residual: f64,
    /// `‖(I + μ ξ (z̄ − z)ᵗ)(I − (ξ/m)(z̄ − z)ᵗ) − I‖`
    pub inverse_identity_residual: f64,
    /// `‖Z − Z₊‖` where `Z₊` uses `D₁ = a − zᵗ(α − Āz) + μ(zᵗξ)²`, `D₄ = Ā + μξξᵗ`.
    pub plus_sign_residual: f64,
}

impl SiegelPoint {
    pub fn n(&self) -> usize {
        self.z.nrows() - 1
    }

    pub fn symmetry_residual(&self) -> f64 {
        linalg::max_abs(&(&self.z - self.z.transpose()))
    }

    pub fn closed_form_residual(&self) -> f64 {
        linalg::max_abs(&(&self.z - &self.z_closed_form))
    }

    /// `sign · Im Z`, positive definite by construction.
    pub fn imaginary_part(&self) -> CMat {
        self.z.map(|x| c(self.convention_sign * x.im, 0.0))
    }
}

/// Projects the flag spanned by `Ω = (1, z, a, α)` and `Θ = (0, I, α − Az, A)` to the Siegel space.
pub fn siegel_project(z: &CVec, a: C64, alpha: &CVec, amat: &CMat) -> Result<SiegelPoint> {
    let n = z.len();
    let scale = linalg::max_abs(amat).max(1.0);
    let asym = linalg::max_abs(&(amat - amat.transpose()));
    if asym > 1e-10 * scale {
        return Err(Error::AsymmetricA(asym));
    }
    let zb = z.map(|x| x.conj());
    let ab = a.conj();
    let alphab = alpha.map(|x| x.conj());
    let abar = amat.map(|x| x.conj());
    let dz = &zb - z;

    let m = -a + ab - alpha.dot(&zb) + alphab.dot(z);
    let xi: CVec = -alpha + &alphab - &abar * &dz;
    let denom = m - dz.dot(&xi);
    let tiny = 1e-14 * (1.0 + a.norm() + alpha.norm() * (1.0 + z.norm()));
    if m.norm() <= tiny || denom.norm() <= tiny {
        return Err(Error::ProjectionUndefined);
    }
    let mu = c(1.0, 0.0) / denom;
    let id = CMat::identity(n, n);
    let b = &id + &xi * dz.transpose() * mu;
    let inverse_identity_residual = linalg::max_abs(&(&b * (&id - &xi * dz.transpose() / m) - &id));

    let beta: CVec = alpha - amat * z;
    let betab = beta.map(|x| x.conj());

    // rows (M | N) of Ω and Θ̄ − (ξ/m) Ω̄
    let mut mm = CMat::zeros(n + 1, n + 1);
    let mut nn = CMat::zeros(n + 1, n + 1);
    mm[(0, 0)] = c(1.0, 0.0);
    nn[(0, 0)] = a;
    for s in 0..n {
        mm[(0, s + 1)] = z[s];
        nn[(0, s + 1)] = alpha[s];
    }
    for r in 0..n {
        let w = xi[r] / m;
        mm[(r + 1, 0)] = -w;
        nn[(r + 1, 0)] = betab[r] - ab * w;
        for s in 0..n {
            mm[(r + 1, s + 1)] = id[(r, s)] - w * zb[s];
            nn[(r + 1, s + 1)] = abar[(r, s)] - w * alphab[s];
        }
    }
    let minv = mm.try_inverse().ok_or(Error::ProjectionUndefined)?;
    let zmat = minv * nn;
    let d2_d3_residual = (0..n).map(|r| (zmat[(0, r + 1)] - zmat[(r + 1, 0)]).norm()).fold(0.0, f64::max);

    let zt_xi = z.dot(&xi);
    let d3: CVec = &xi * ((a - ab) * mu) + &b * &betab;
    let assemble = |sign: f64| {
        let d1 = a - z.dot(&(alpha - &abar * z)) + mu * zt_xi * zt_xi * sign;
        let d4: CMat = &abar + &xi * xi.transpose() * (mu * sign);
        let mut out = CMat::zeros(n + 1, n + 1);
        out[(0, 0)] = d1;
        for r in 0..n {
            out[(0, r + 1)] = d3[r];
            out[(r + 1, 0)] = d3[r];
            for s in 0..n {
                out[(r + 1, s + 1)] = d4[(r, s)];
            }
        }
        out
    };
    // Expanding M⁻¹N gives −μ(zᵗξ)² in D₁ and −μξξᵗ in D₄; the `+` variant is kept for comparison.
    let closed = assemble(-1.0);
    let plus_sign_residual = linalg::max_abs(&(&zmat - assemble(1.0)));

    let im = zmat.map(|x| c(x.im, 0.0));
    let convention_sign = if linalg::is_positive_definite(&im) {
        1.0
    } else if linalg::is_positive_definite(&(-&im)) {
        -1.0
    } else {
        return Err(Error::NotPolarized);
    };
    Ok(SiegelPoint {
        z: zmat,
        z_closed_form: closed,
        convention_sign,
        m,
        xi,
        mu,
        b,
        d2_d3_residual,
        inverse_identity_residual,
        plus_sign_residual,
    })
}

/// Affine data `(z, a, α, A)` of the flag at the base point, with `Ω` normalized to `Ω₀ = 1`.
#[derive(Clone, Debug)]
pub struct FlagCoordinates {
    pub z: CVec,
    pub a: C64,
    pub alpha: CVec,
    pub amat: CMat,
    /// `‖∂a (∂z)⁻¹ − (α − A z)‖`, zero on a horizontal slice.
    pub beta_residual: f64,
}

pub fn flag_coordinates(p: &PeriodJet) -> Result<FlagCoordinates> {
    p.require_order(1)?;
    let n = p.n();
    let inv0 = p.omega[0].inv()?;
    let normalized: Vec<Jet> = p.omega.iter().map(|j| j * &inv0).collect();
    let val = |k: usize| normalized[k].constant_term();
    let d = |k: usize, i: usize| -> Result<C64> { Ok(normalized[k].deriv_vars(&[i])?) };
    let z = CVec::from_fn(n, |r, _| val(r + 1));
    let a = val(n + 1);
    let alpha = CVec::from_fn(n, |r, _| val(n + 2 + r));
    let mut dz = CMat::zeros(n, n);
    let mut dalpha = CMat::zeros(n, n);
    let mut da = CVec::zeros(n);
    for k in 0..n {
        da[k] = d(n + 1, k)?;
        for r in 0..n {
            dz[(r, k)] = d(r + 1, k)?;
            dalpha[(r, k)] = d(n + 2 + r, k)?;
        }
    }
    let dzinv = dz.try_inverse().ok_or(Error::Singular("period chart"))?;
    let amat = &dalpha * &dzinv;
    let beta = dzinv.transpose() * &da;
    let beta_residual = (beta - (&alpha - &amat * &z)).iter().map(|x| x.norm()).fold(0.0, f64::max);
    Ok(FlagCoordinates { z, a, alpha, amat, beta_residual })
}

/// Siegel point of the flag at the base point of `p`.
pub fn siegel_from_period(p: &PeriodJet) -> Result<SiegelPoint> {
    let fc = flag_coordinates(p)?;
    siegel_project(&fc.z, fc.a, &fc.alpha, &fc.amat)
}

fn siegel_at(u: &Prepotential, t: &[C64]) -> Result<SiegelPoint> {
    siegel_from_period(&period_vector(u, t, 1)?)
}

/// Pullback of `tr(Y⁻¹ dZ Y⁻¹ dZ̄)`, `Y = sign · Im Z`, along `t ↦ Z(t)`, on the holomorphic frame.
pub fn siegel_metric_pullback(u: &Prepotential, t: &[C64], stencil: &Stencil) -> Result<HermitianTensor> {
    let n = t.len();
    let center = siegel_at(u, t)?;
    let sign = center.convention_sign;
    let zfn = |w: &[C64]| -> Result<CMat> {
        let s = siegel_at(u, w)?;
        if s.convention_sign != sign {
            return Err(Error::Stencil("Im Z changes sign inside the stencil".into()));
        }
        Ok(s.z)
    };
    let yinv = center.imaginary_part().try_inverse().ok_or(Error::Singular("Im Z"))?;
    let dh: Vec<CMat> = (0..n).map(|k| fd::d_holo(&zfn, t, k, stencil)).collect::<Result<_>>()?;
    let da: Vec<CMat> = (0..n).map(|k| fd::d_anti(&zfn, t, k, stencil)).collect::<Result<_>>()?;
    let pair = |x: &CMat, y: &CMat| (&yinv * x * &yinv * y.map(|v| v.conj())).trace();
    let mat = CMat::from_fn(n, n, |i, j| (pair(&dh[i], &dh[j]) + pair(&da[j], &da[i])) * 0.5);
    Ok(HermitianTensor { point: t.to_vec(), mat })
}

#[derive(Clone, Debug)]
pub struct ConstantMultipleReport {
    /// `tr(G h⁻¹)/n` per sample.
    pub lambdas: Vec<f64>,
    /// Largest `‖G h⁻¹ − λ I‖ / λ` over samples.
    pub max_deviation: f64,
    /// `max λ − min λ`.
    pub lambda_spread: f64,
}

/// Compares the Siegel pullback metric with the Hodge metric at the origin of each sample.
pub fn constant_multiple_test(samples: &[Prepotential], stencil: &Stencil) -> Result<ConstantMultipleReport> {
    use rayon::prelude::*;
    let per: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|u| {
            let n = u.n();
            let origin = vec![c(0.0, 0.0); n];
            let g = siegel_metric_pullback(u, &origin, stencil)?;
            let h = hodge_metric_at(u, &origin)?;
            let hinv = h.try_inverse().ok_or(Error::Singular("Hodge metric"))?;
            let ratio = &g.mat * hinv;
            let lambda = ratio.trace().re / n as f64;
            let dev = linalg::max_abs(&(ratio - CMat::identity(n, n) * c(lambda, 0.0))) / lambda.abs();
            Ok((lambda, dev))
        })
        .collect::<Result<_>>()?;
    if per.is_empty() {
        return Err(Error::InsufficientSamples("constant multiple test needs at least one sample".into()));
    }
    let lambdas: Vec<f64> = per.iter().map(|x| x.0).collect();
    let max_deviation = per.iter().map(|x| x.1).fold(0.0, f64::max);
    let lo = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ConstantMultipleReport { lambdas, max_deviation, lambda_spread: hi - lo })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_projection() {
        let n = 2;
        let u = Prepotential::normalized_quadratic(n);
        let p = period_vector(&u, &[c(0.0, 0.0); 2], 1).unwrap();
        let fc = flag_coordinates(&p).unwrap();
        assert!((fc.a - c(0.0, -1.0)).norm() < 1e-15);
        assert!(linalg::max_abs(&(&fc.amat - CMat::identity(n, n) * c(0.0, 1.0))) < 1e-15);
        let s = siegel_from_period(&p).unwrap();
        assert!((s.m - c(0.0, 2.0)).norm() < 1e-15);
        assert!(s.xi.norm() < 1e-15);
        assert_eq!(s.convention_sign, -1.0);
        assert!(linalg::max_abs(&(&s.z - CMat::identity(3, 3) * c(0.0, -1.0))) < 1e-15);
        assert!(linalg::max_abs(&(&s.b - CMat::identity(n, n))) == 0.0);
    }

    #[test]
    fn asymmetric_a_rejected() {
        let z = CVec::zeros(2);
        let a = CMat::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        assert!(matches!(siegel_project(&z, c(0.0, -1.0), &CVec::zeros(2), &a), Err(Error::AsymmetricA(_))));
    }

    #[test]
    fn degenerate_pairing_is_undefined() {
        let z = CVec::zeros(1);
        let a = CMat::identity(1, 1) * c(0.0, 1.0);
        // real a gives m = 0
        assert!(matches!(siegel_project(&z, c(1.0, 0.0), &CVec::zeros(1), &a), Err(Error::ProjectionUndefined)));
    }
}
