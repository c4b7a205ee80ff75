//! Prepotentials and the period vector they generate.
//!
//! A horizontal slice through the origin of the period domain is locally the
//! image of
//!
//! ```text
//! Ω(z) = (1, z/√2, u − ½ Σ zⁱ uᵢ, ∇u/√2)
//! ```
//!
//! for a holomorphic function `u`. Everything downstream works from jets of
//! `Ω` in the displacement `w = z − z_base`.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::jets::{Jet, LogJet, MultiIndex, C64};
use crate::linalg::{CMat, CVec};

/// `c · z^α · (log z₁)^p`, only for one-parameter families.
#[derive(Clone, Debug, PartialEq)]
pub struct LogTerm {
    pub monomial: MultiIndex,
    pub log_power: u32,
    pub coeff: C64,
}

/// Holomorphic function `u = Σ c_α z^α + Σ c_{α,p} z^α (log z)^p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Prepotential {
    n: usize,
    terms: Vec<(MultiIndex, C64)>,
    log_terms: Vec<LogTerm>,
}

impl Prepotential {
    pub fn new(n: usize, terms: Vec<(MultiIndex, C64)>, log_terms: Vec<LogTerm>) -> Result<Self> {
        if n == 0 || n > 8 {
            return Err(Error::InvalidPrepotential(format!("dimension {n} outside 1..=8")));
        }
        for (idx, _) in &terms {
            if idx.len() != n {
                return Err(Error::InvalidPrepotential(format!(
                    "monomial {idx} has length {}, expected {n}",
                    idx.len()
                )));
            }
        }
        if !log_terms.is_empty() && n != 1 {
            return Err(Error::InvalidPrepotential(
                "log terms are only supported for one-parameter families".into(),
            ));
        }
        for t in &log_terms {
            if t.monomial.len() != 1 {
                return Err(Error::InvalidPrepotential(format!(
                    "log-term monomial {} must have length 1",
                    t.monomial
                )));
            }
            if t.log_power == 0 {
                return Err(Error::InvalidPrepotential("log power must be at least 1".into()));
            }
            if t.monomial.degree() > crate::jets::MAX_ORDER {
                return Err(Error::InvalidPrepotential(format!(
                    "log-term monomial degree {} too large",
                    t.monomial.degree()
                )));
            }
        }
        Ok(Prepotential { n, terms, log_terms })
    }

    /// `u = −i + (i/2) Σ (zⁱ)²`, the normal form with vanishing cubic form.
    pub fn normalized_quadratic(n: usize) -> Self {
        let mut terms = vec![(MultiIndex::zeros(n), C64::new(0.0, -1.0))];
        for i in 0..n {
            terms.push((MultiIndex::from_vars(n, &[i, i]), C64::new(0.0, 0.5)));
        }
        Prepotential { n, terms, log_terms: Vec::new() }
    }

    pub fn zero(n: usize) -> Self {
        Prepotential { n, terms: Vec::new(), log_terms: Vec::new() }
    }

    /// Adds `coeff · ∂`-normalized monomial: `coeff · z^α / α!`, so that
    /// `∂^α u = coeff` for the added piece.
    pub fn with_derivative_term(mut self, vars: &[usize], coeff: C64) -> Self {
        let idx = MultiIndex::from_vars(self.n, vars);
        let f = idx.factorial();
        self.terms.push((idx, coeff / f));
        self
    }

    pub fn with_term(mut self, idx: MultiIndex, coeff: C64) -> Result<Self> {
        if idx.len() != self.n {
            return Err(Error::InvalidPrepotential(format!("monomial {idx} has wrong length")));
        }
        self.terms.push((idx, coeff));
        Ok(self)
    }

    pub fn with_log_term(self, degree: u32, log_power: u32, coeff: C64) -> Result<Self> {
        let mut log_terms = self.log_terms;
        log_terms.push(LogTerm {
            monomial: MultiIndex::new(vec![degree]),
            log_power,
            coeff,
        });
        Prepotential::new(self.n, self.terms, log_terms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(MultiIndex, C64)] {
        &self.terms
    }

    pub fn log_terms(&self) -> &[LogTerm] {
        &self.log_terms
    }

    pub fn has_log_terms(&self) -> bool {
        !self.log_terms.is_empty()
    }

    fn log_jet(&self) -> Result<LogJet> {
        let mut powers: Vec<u32> = self.log_terms.iter().map(|t| t.log_power).collect();
        powers.sort_unstable();
        powers.dedup();
        let mut branches = Vec::new();
        for p in powers {
            let degree = self
                .log_terms
                .iter()
                .filter(|t| t.log_power == p)
                .map(|t| t.monomial.degree())
                .max()
                .unwrap_or(0);
            let poly = Jet::from_terms(
                1,
                degree,
                self.log_terms
                    .iter()
                    .filter(|t| t.log_power == p)
                    .map(|t| (t.monomial.clone(), t.coeff)),
            )?;
            branches.push((p, poly));
        }
        Ok(LogJet::new(branches)?)
    }
}

/// Taylor jet of `u` at `z` in the displacement `w = z_eval − z`.
pub fn eval_prepotential(u: &Prepotential, z: &[C64], order: usize) -> Result<Jet> {
    let n = u.n();
    if z.len() != n {
        return Err(Error::Dimension(format!("point has {} coordinates, expected {n}", z.len())));
    }
    if u.has_log_terms() && z[0].norm() == 0.0 {
        return Err(Error::LogAtPuncture);
    }
    let mut out = Jet::zero(n, order)?;
    let max_exp = u
        .terms()
        .iter()
        .flat_map(|(idx, _)| idx.exponents().iter().copied())
        .max()
        .unwrap_or(0);
    let shifted: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            let base = Jet::variable(n, order, i).map(|v| v.add_constant(z[i]))?;
            let mut p = vec![Jet::constant(n, order, C64::new(1.0, 0.0))?];
            for k in 1..=max_exp as usize {
                let next = &p[k - 1] * &base;
                p.push(next);
            }
            Ok(p)
        })
        .collect::<Result<_>>()?;
    for (idx, c) in u.terms() {
        let mut term = Jet::constant(n, order, *c)?;
        for (var, &e) in idx.exponents().iter().enumerate() {
            if e > 0 {
                term = &term * &shifted[var][e as usize];
            }
        }
        out = &out + &term;
    }
    if u.has_log_terms() {
        out = &out + &u.log_jet()?.expand_at(z[0], order)?;
    }
    Ok(out)
}

/// The skew form `Q = [[0, I], [−I, 0]]` on `C^{2n+2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticForm {
    matrix: CMat,
}

impl SymplecticForm {
    pub fn standard(n: usize) -> Self {
        let m = n + 1;
        let mut matrix = CMat::zeros(2 * m, 2 * m);
        for i in 0..m {
            matrix[(i, m + i)] = C64::new(1.0, 0.0);
            matrix[(m + i, i)] = C64::new(-1.0, 0.0);
        }
        SymplecticForm { matrix }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Bilinear (not sesquilinear) pairing `xᵗ Q y`.
    pub fn pair(&self, x: &CVec, y: &CVec) -> C64 {
        let h = self.dim() / 2;
        (0..h).map(|i| x[i] * y[h + i] - x[h + i] * y[i]).sum()
    }

    pub fn pair_jets(&self, x: &[Jet], y: &[Jet]) -> Jet {
        let h = self.dim() / 2;
        let mut acc = &x[0] * &y[h];
        acc = &acc - &(&x[h] * &y[0]);
        for i in 1..h {
            acc = &acc + &(&x[i] * &y[h + i]);
            acc = &acc - &(&x[h + i] * &y[i]);
        }
        acc
    }
}

/// Jets of the `2n+2` components of `Ω` around a base point.
#[derive(Clone, Debug)]
pub struct PeriodJet {
    pub base_point: Vec<C64>,
    pub omega: Vec<Jet>,
    pub q: SymplecticForm,
}

impl PeriodJet {
    pub fn new(base_point: Vec<C64>, omega: Vec<Jet>) -> Result<Self> {
        let n = base_point.len();
        if omega.len() != 2 * n + 2 {
            return Err(Error::Dimension(format!(
                "period vector has {} components, expected {}",
                omega.len(),
                2 * n + 2
            )));
        }
        for j in &omega {
            if j.nvars() != n || j.order() != omega[0].order() {
                return Err(Error::Dimension("period jets must share shape".into()));
            }
        }
        Ok(PeriodJet { base_point, omega, q: SymplecticForm::standard(n) })
    }

    pub fn n(&self) -> usize {
        self.base_point.len()
    }

    pub fn order(&self) -> usize {
        self.omega[0].order()
    }

    /// `∂^{vars} Ω` at the base point (empty slice gives `Ω` itself).
    pub fn deriv(&self, vars: &[usize]) -> Result<CVec> {
        let idx = MultiIndex::from_vars(self.n(), vars);
        let vals = self
            .omega
            .iter()
            .map(|j| j.eval_deriv(&idx))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(CVec::from_vec(vals))
    }

    pub fn value(&self) -> CVec {
        CVec::from_iterator(self.omega.len(), self.omega.iter().map(|j| j.constant_term()))
    }

    pub fn require_order(&self, needed: usize) -> Result<()> {
        if self.order() < needed {
            return Err(Error::InsufficientOrder { needed, have: self.order() });
        }
        Ok(())
    }

    /// Jet of `∂ᵢΩ` (one order lower).
    pub fn derivative_jets(&self, i: usize) -> Result<Vec<Jet>> {
        Ok(self.omega.iter().map(|j| j.derivative(i)).collect::<std::result::Result<_, _>>()?)
    }
}

/// `Ω = (1, z/√2, u − ½Σzⁱuᵢ, ∇u/√2)` as jets of the given order at `z`.
pub fn period_vector(u: &Prepotential, z: &[C64], order: usize) -> Result<PeriodJet> {
    let n = u.n();
    let u_jet = eval_prepotential(u, z, order + 1)?;
    let grads: Vec<Jet> = (0..n).map(|i| u_jet.derivative(i)).collect::<std::result::Result<_, _>>()?;
    let coords: Vec<Jet> = (0..n)
        .map(|i| Jet::variable(n, order, i).map(|v| v.add_constant(z[i])))
        .collect::<std::result::Result<_, _>>()?;
    let inv_sqrt2 = C64::new(1.0 / SQRT_2, 0.0);
    let mut a = u_jet.with_order(order)?;
    for i in 0..n {
        a = &a - &(&coords[i] * &grads[i]).scale(C64::new(0.5, 0.0));
    }
    let mut omega = Vec::with_capacity(2 * n + 2);
    omega.push(Jet::constant(n, order, C64::new(1.0, 0.0))?);
    omega.extend(coords.iter().map(|c| c.scale(inv_sqrt2)));
    omega.push(a);
    omega.extend(grads.iter().map(|g| g.scale(inv_sqrt2)));
    PeriodJet::new(z.to_vec(), omega)
}

/// Largest residuals of `Q(Ω, ∂ᵢΩ)` and `Q(∂ᵢΩ, ∂ⱼΩ)` over all jet coefficients,
/// relative to the squared coefficient scale of `Ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct HorizontalityResiduals {
    pub omega_tangent: f64,
    pub tangent_tangent: f64,
    pub scale: f64,
}

pub fn horizontality_residuals(p: &PeriodJet) -> Result<HorizontalityResiduals> {
    p.require_order(2)?;
    let n = p.n();
    let d = p.order() - 1;
    let omega_low: Vec<Jet> = p.omega.iter().map(|j| j.with_order(d)).collect::<std::result::Result<_, _>>()?;
    let tangents: Vec<Vec<Jet>> = (0..n).map(|i| p.derivative_jets(i)).collect::<Result<_>>()?;
    let scale = p.omega.iter().map(|j| j.max_abs()).fold(0.0, f64::max).powi(2).max(1.0);
    let mut omega_tangent = 0.0f64;
    let mut tangent_tangent = 0.0f64;
    for i in 0..n {
        omega_tangent = omega_tangent.max(p.q.pair_jets(&omega_low, &tangents[i]).max_abs());
        for j in 0..n {
            tangent_tangent = tangent_tangent.max(p.q.pair_jets(&tangents[i], &tangents[j]).max_abs());
        }
    }
    Ok(HorizontalityResiduals {
        omega_tangent: omega_tangent / scale,
        tangent_tangent: tangent_tangent / scale,
        scale,
    })
}

/// Whether `Ω` spans an integral curve of the horizontal distribution to within `tol`.
pub fn check_horizontality(p: &PeriodJet, tol: f64) -> bool {
    match horizontality_residuals(p) {
        Ok(r) => r.omega_tangent <= tol && r.tangent_tangent <= tol,
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn normalized_quadratic_at_origin() {
        let u = Prepotential::normalized_quadratic(2);
        let j = eval_prepotential(&u, &[c(0.0, 0.0), c(0.0, 0.0)], 3).unwrap();
        assert_eq!(j.constant_term(), c(0.0, -1.0));
        for i in 0..2 {
            assert_eq!(j.deriv_vars(&[i]).unwrap(), c(0.0, 0.0));
            for k in 0..2 {
                let e = if i == k { c(0.0, 1.0) } else { c(0.0, 0.0) };
                assert_eq!(j.deriv_vars(&[i, k]).unwrap(), e);
            }
        }
    }

    #[test]
    fn zero_prepotential_gives_zero_jet() {
        let j = eval_prepotential(&Prepotential::zero(3), &[c(0.1, 0.0); 3], 3).unwrap();
        assert_eq!(j.max_abs(), 0.0);
    }

    #[test]
    fn cubic_monomial_third_derivative() {
        let u = Prepotential::zero(1).with_term(MultiIndex::new(vec![3]), c(1.0, 0.0)).unwrap();
        let j = eval_prepotential(&u, &[c(0.0, 0.0)], 3).unwrap();
        assert_eq!(j.deriv_vars(&[0, 0, 0]).unwrap(), c(6.0, 0.0));
    }

    #[test]
    fn log_terms_rejected_at_puncture_and_for_n_above_one() {
        let u = Prepotential::zero(1).with_log_term(2, 1, c(0.0, -0.1)).unwrap();
        assert!(matches!(eval_prepotential(&u, &[c(0.0, 0.0)], 3), Err(Error::LogAtPuncture)));
        assert!(Prepotential::zero(2).with_log_term(2, 1, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn period_vector_at_origin() {
        let u = Prepotential::normalized_quadratic(2);
        let p = period_vector(&u, &[c(0.0, 0.0); 2], 3).unwrap();
        let v = p.value();
        let expected = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0), c(0.0, 0.0), c(0.0, 0.0)];
        for (a, b) in v.iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn one_dimensional_quadratic_period_closed_form() {
        // Ω = (1, z/√2, −i, iz/√2) exactly: the z-terms of u − ½zu' cancel.
        let u = Prepotential::normalized_quadratic(1);
        let z0 = c(0.2, -0.1);
        let p = period_vector(&u, &[z0], 3).unwrap();
        let s = 1.0 / SQRT_2;
        for w in [c(0.0, 0.0), c(0.01, 0.02), c(-0.03, 0.0)] {
            let z = z0 + w;
            let expected = [c(1.0, 0.0), z * s, c(0.0, -1.0), c(0.0, 1.0) * z * s];
            for (jet, e) in p.omega.iter().zip(expected.iter()) {
                assert!((jet.evaluate(&[w]).unwrap() - e).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn horizontality_holds_and_detects_corruption() {
        let u = Prepotential::normalized_quadratic(2)
            .with_derivative_term(&[0, 0, 1], c(0.3, 0.1))
            .with_derivative_term(&[1, 1, 1], c(-0.2, 0.4))
            .with_derivative_term(&[0, 1, 1, 1], c(0.5, 0.0));
        let z = [c(0.1, 0.05), c(-0.07, 0.02)];
        let p = period_vector(&u, &z, 4).unwrap();
        let r = horizontality_residuals(&p).unwrap();
        assert!(r.omega_tangent < 1e-12 && r.tangent_tangent < 1e-12, "{r:?}");
        assert!(check_horizontality(&p, 1e-10));

        let mut bad = p.clone();
        let nudge = Jet::variable(2, 4, 0).unwrap().scale(c(1e-3, 0.0));
        bad.omega[3] = &bad.omega[3] + &nudge;
        assert!(!check_horizontality(&bad, 1e-10));
    }

    #[test]
    fn pairing_is_skew() {
        let q = SymplecticForm::standard(2);
        let x = CVec::from_vec(vec![c(1.0, 2.0), c(0.0, 1.0), c(3.0, 0.0), c(-1.0, 0.5), c(0.2, 0.0), c(0.0, 0.0)]);
        let y = CVec::from_vec(vec![c(0.5, 0.0), c(1.0, 1.0), c(0.0, -2.0), c(1.0, 0.0), c(0.0, 0.3), c(2.0, 0.0)]);
        assert!((q.pair(&x, &y) + q.pair(&y, &x)).norm() < 1e-15);
        let qm = q.matrix();
        assert!((qm + qm.transpose()).iter().all(|v| v.norm() == 0.0));
    }
}
