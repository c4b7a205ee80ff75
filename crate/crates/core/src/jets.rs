//! Truncated multivariate holomorphic Taylor jets.
//!
//! A [`Jet`] stores every Taylor coefficient `c_α` of a function around a base
//! point for all multi-indices with `|α| ≤ order`, densely, in graded order.
//! The coefficient of `w^α` is `∂^α f / α!`, so derivatives are recovered with
//! [`Jet::eval_deriv`]. All arithmetic is complex-analytic: nothing in this
//! module conjugates a coefficient.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use thiserror::Error;

pub type C64 = Complex64;

/// Largest number of variables a jet may carry. Mixed `(w, w̄)` expansions
/// double the holomorphic dimension, so this is twice the supported moduli count.
pub const MAX_VARS: usize = 16;
pub const MAX_ORDER: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("dimension mismatch: {left} vs {right} variables")]
    DimensionMismatch { left: usize, right: usize },
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("constant term is zero")]
    ZeroConstantTerm,
    #[error("derivative of total order {requested} exceeds jet order {order}")]
    OrderExceeded { requested: usize, order: usize },
    #[error("multi-index has length {got}, expected {expected}")]
    IndexLength { got: usize, expected: usize },
    #[error("substituted jet must have zero constant term")]
    NonzeroConstant,
    #[error("unsupported jet shape: {nvars} variables at order {order}")]
    UnsupportedShape { nvars: usize, order: usize },
    #[error("log-jets are evaluated away from the puncture, got z = 0")]
    AtPuncture,
}

pub type JetResult<T> = std::result::Result<T, JetError>;

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MultiIndex(e)
    }

    /// Multi-index counting how often each variable appears in `vars`.
    pub fn from_vars(n: usize, vars: &[usize]) -> Self {
        let mut e = vec![0; n];
        for &v in vars {
            e[v] += 1;
        }
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// `α! = Π αᵢ!`
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&e| (1..=e).map(f64::from).product::<f64>())
            .product()
    }

    pub fn checked_add(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if self.len() != other.len() {
            return None;
        }
        Some(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Enumeration of the monomials of a given shape plus the Cauchy-product table.
#[derive(Debug)]
pub struct JetLayout {
    nvars: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    /// `(a, b, a+b)` slot triples with `|a| + |b| ≤ order`.
    products: Vec<(u32, u32, u32)>,
    /// `degree_start[k]` is the first slot of total degree `k`.
    degree_start: Vec<usize>,
}

/// Layouts keyed by `(nvars, order)`.
type LayoutCache = Mutex<HashMap<(usize, usize), Arc<JetLayout>>>;

static LAYOUTS: Lazy<LayoutCache> = Lazy::new(|| Mutex::new(HashMap::new()));

impl JetLayout {
    pub fn get(nvars: usize, order: usize) -> JetResult<Arc<JetLayout>> {
        if nvars == 0 || nvars > MAX_VARS || order > MAX_ORDER {
            return Err(JetError::UnsupportedShape { nvars, order });
        }
        let mut cache = LAYOUTS.lock().expect("jet layout cache poisoned");
        Ok(cache
            .entry((nvars, order))
            .or_insert_with(|| Arc::new(JetLayout::build(nvars, order)))
            .clone())
    }

    fn build(nvars: usize, order: usize) -> Self {
        let mut indices = Vec::new();
        let mut degree_start = Vec::with_capacity(order + 2);
        for deg in 0..=order {
            degree_start.push(indices.len());
            let mut current = vec![0u32; nvars];
            push_compositions(&mut indices, &mut current, 0, deg as u32);
        }
        degree_start.push(indices.len());
        let lookup: HashMap<MultiIndex, usize> = indices
            .iter()
            .enumerate()
            .map(|(k, m)| (m.clone(), k))
            .collect();
        let mut products = Vec::new();
        for (ia, a) in indices.iter().enumerate() {
            let da = a.degree();
            for (ib, b) in indices[..degree_start[order - da + 1]].iter().enumerate() {
                let sum = a.checked_add(b).expect("same length");
                products.push((ia as u32, ib as u32, lookup[&sum] as u32));
            }
        }
        JetLayout {
            nvars,
            order,
            indices,
            lookup,
            products,
            degree_start,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn slot(&self, idx: &MultiIndex) -> Option<usize> {
        self.lookup.get(idx).copied()
    }

    fn degree_range(&self, deg: usize) -> std::ops::Range<usize> {
        self.degree_start[deg]..self.degree_start[deg + 1]
    }
}

// Graded order: within a degree, larger leading exponents come first.
fn push_compositions(out: &mut Vec<MultiIndex>, current: &mut [u32], pos: usize, remaining: u32) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex(current.to_vec()));
        current[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        push_compositions(out, current, pos + 1, remaining - e);
    }
    current[pos] = 0;
}

/// Truncated Taylor expansion of a holomorphic function of `nvars` variables.
#[derive(Clone)]
pub struct Jet {
    layout: Arc<JetLayout>,
    coeffs: Vec<C64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_map();
        for (idx, c) in self.terms() {
            s.entry(&idx.0, &c);
        }
        s.finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.same_shape(other) && self.coeffs == other.coeffs
    }
}

impl Jet {
    pub fn zero(nvars: usize, order: usize) -> JetResult<Jet> {
        let layout = JetLayout::get(nvars, order)?;
        let coeffs = vec![C64::new(0.0, 0.0); layout.len()];
        Ok(Jet { layout, coeffs })
    }

    pub fn constant(nvars: usize, order: usize, c: C64) -> JetResult<Jet> {
        let mut j = Jet::zero(nvars, order)?;
        j.coeffs[0] = c;
        Ok(j)
    }

    /// The coordinate function `w_i`.
    pub fn variable(nvars: usize, order: usize, i: usize) -> JetResult<Jet> {
        if i >= nvars {
            return Err(JetError::IndexLength {
                got: i + 1,
                expected: nvars,
            });
        }
        let mut j = Jet::zero(nvars, order)?;
        if order >= 1 {
            let slot = j.layout.slot(&MultiIndex::unit(nvars, i)).expect("unit index");
            j.coeffs[slot] = C64::new(1.0, 0.0);
        }
        Ok(j)
    }

    /// Builds a jet from monomial coefficients (coefficient of `w^α`, not of `∂^α`).
    /// Repeated indices accumulate.
    pub fn from_terms<I>(nvars: usize, order: usize, terms: I) -> JetResult<Jet>
    where
        I: IntoIterator<Item = (MultiIndex, C64)>,
    {
        let mut j = Jet::zero(nvars, order)?;
        for (idx, c) in terms {
            let slot = j.slot_checked(&idx)?;
            j.coeffs[slot] += c;
        }
        Ok(j)
    }

    pub fn nvars(&self) -> usize {
        self.layout.nvars
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, C64)> + '_ {
        self.layout
            .indices
            .iter()
            .zip(self.coeffs.iter().copied())
            .filter(|(_, c)| *c != C64::new(0.0, 0.0))
    }

    fn slot_checked(&self, idx: &MultiIndex) -> JetResult<usize> {
        if idx.len() != self.nvars() {
            return Err(JetError::IndexLength {
                got: idx.len(),
                expected: self.nvars(),
            });
        }
        if idx.degree() > self.order() {
            return Err(JetError::OrderExceeded {
                requested: idx.degree(),
                order: self.order(),
            });
        }
        Ok(self.layout.slot(idx).expect("index within layout"))
    }

    /// Monomial coefficient; indices past the order read as zero.
    pub fn coeff(&self, idx: &MultiIndex) -> C64 {
        match self.slot_checked(idx) {
            Ok(s) => self.coeffs[s],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn constant_term(&self) -> C64 {
        self.coeffs[0]
    }

    pub fn same_shape(&self, other: &Jet) -> bool {
        Arc::ptr_eq(&self.layout, &other.layout)
            || (self.nvars() == other.nvars() && self.order() == other.order())
    }

    fn check_shape(&self, other: &Jet) -> JetResult<()> {
        if self.nvars() != other.nvars() {
            return Err(JetError::DimensionMismatch {
                left: self.nvars(),
                right: other.nvars(),
            });
        }
        if self.order() != other.order() {
            return Err(JetError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Jet) -> JetResult<Jet> {
        self.check_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(self.with_coeffs(coeffs))
    }

    pub fn try_sub(&self, other: &Jet) -> JetResult<Jet> {
        self.check_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(self.with_coeffs(coeffs))
    }

    /// Cauchy product truncated at the common order.
    pub fn try_mul(&self, other: &Jet) -> JetResult<Jet> {
        self.check_shape(other)?;
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len()];
        for &(a, b, c) in &self.layout.products {
            let x = self.coeffs[a as usize];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            out[c as usize] += x * other.coeffs[b as usize];
        }
        Ok(self.with_coeffs(out))
    }

    fn with_coeffs(&self, coeffs: Vec<C64>) -> Jet {
        Jet {
            layout: self.layout.clone(),
            coeffs,
        }
    }

    pub fn map_coeffs<F: Fn(C64) -> C64>(&self, f: F) -> Jet {
        self.with_coeffs(self.coeffs.iter().map(|&c| f(c)).collect())
    }

    pub fn scale(&self, s: C64) -> Jet {
        self.map_coeffs(|c| c * s)
    }

    pub fn add_constant(&self, s: C64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// `Σ_k series[k] · x^k` for a jet `x` without constant term; nilpotency
    /// makes the sum exact through the order.
    fn nilpotent_series(x: &Jet, series: &[C64]) -> Jet {
        debug_assert_eq!(x.constant_term(), C64::new(0.0, 0.0));
        let d = x.order().min(series.len().saturating_sub(1));
        let mut acc = Jet::constant(x.nvars(), x.order(), series[d]).expect("valid shape");
        for k in (0..d).rev() {
            acc = (&acc * x).add_constant(series[k]);
        }
        acc
    }

    fn split_constant(&self) -> (C64, Jet) {
        let mut rest = self.clone();
        let c = rest.coeffs[0];
        rest.coeffs[0] = C64::new(0.0, 0.0);
        (c, rest)
    }

    /// Multiplicative inverse through the order.
    pub fn inv(&self) -> JetResult<Jet> {
        let (c, rest) = self.split_constant();
        if c.norm() == 0.0 {
            return Err(JetError::ZeroConstantTerm);
        }
        let x = rest.scale(c.inv());
        let series: Vec<C64> = (0..=self.order())
            .map(|k| C64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
            .collect();
        Ok(Jet::nilpotent_series(&x, &series).scale(c.inv()))
    }

    /// Principal-branch logarithm.
    pub fn log(&self) -> JetResult<Jet> {
        let (c, rest) = self.split_constant();
        if c.norm() == 0.0 {
            return Err(JetError::ZeroConstantTerm);
        }
        let x = rest.scale(c.inv());
        let mut series = vec![C64::new(0.0, 0.0)];
        for k in 1..=self.order() {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            series.push(C64::new(sign / k as f64, 0.0));
        }
        Ok(Jet::nilpotent_series(&x, &series).add_constant(c.ln()))
    }

    pub fn exp(&self) -> Jet {
        let (c, rest) = self.split_constant();
        let mut series = Vec::with_capacity(self.order() + 1);
        let mut fact = 1.0;
        for k in 0..=self.order() {
            if k > 0 {
                fact *= k as f64;
            }
            series.push(C64::new(1.0 / fact, 0.0));
        }
        Jet::nilpotent_series(&rest, &series).scale(c.exp())
    }

    pub fn powi(&self, k: u32) -> Jet {
        let mut acc = Jet::constant(self.nvars(), self.order(), C64::new(1.0, 0.0))
            .expect("valid shape");
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `∂^α f` at the base point, i.e. `α! · c_α`.
    pub fn eval_deriv(&self, idx: &MultiIndex) -> JetResult<C64> {
        let slot = self.slot_checked(idx)?;
        Ok(self.coeffs[slot] * idx.factorial())
    }

    /// Derivative with respect to the variables listed in `vars` (with repetition).
    pub fn deriv_vars(&self, vars: &[usize]) -> JetResult<C64> {
        self.eval_deriv(&MultiIndex::from_vars(self.nvars(), vars))
    }

    /// `∂f/∂w_i` as a jet of one lower order.
    pub fn derivative(&self, i: usize) -> JetResult<Jet> {
        if i >= self.nvars() {
            return Err(JetError::IndexLength {
                got: i + 1,
                expected: self.nvars(),
            });
        }
        let order = self.order().saturating_sub(1);
        let mut out = Jet::zero(self.nvars(), order)?;
        if self.order() == 0 {
            return Ok(out);
        }
        for (slot, idx) in out.layout.clone().indices.iter().enumerate() {
            let mut up = idx.0.clone();
            up[i] += 1;
            let up = MultiIndex(up);
            out.coeffs[slot] = self.coeff(&up) * f64::from(up.0[i]);
        }
        Ok(out)
    }

    /// Truncates or zero-pads to a new order.
    pub fn with_order(&self, order: usize) -> JetResult<Jet> {
        let mut out = Jet::zero(self.nvars(), order)?;
        let keep = order.min(self.order());
        for slot in 0..self.layout.degree_start[keep + 1] {
            let target = out.layout.slot(&self.layout.indices[slot]).expect("same nvars");
            out.coeffs[target] = self.coeffs[slot];
        }
        Ok(out)
    }

    /// Value of the truncated polynomial at displacement `w`.
    pub fn evaluate(&self, w: &[C64]) -> JetResult<C64> {
        if w.len() != self.nvars() {
            return Err(JetError::IndexLength {
                got: w.len(),
                expected: self.nvars(),
            });
        }
        let mut total = C64::new(0.0, 0.0);
        for (idx, &c) in self.layout.indices.iter().zip(&self.coeffs) {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let mut m = c;
            for (e, x) in idx.0.iter().zip(w) {
                m *= x.powu(*e);
            }
            total += m;
        }
        Ok(total)
    }

    /// Substitutes `subs[i]` (jets without constant term) for `w_i`.
    pub fn compose(&self, subs: &[Jet]) -> JetResult<Jet> {
        if subs.len() != self.nvars() {
            return Err(JetError::IndexLength {
                got: subs.len(),
                expected: self.nvars(),
            });
        }
        let first = &subs[0];
        for s in subs {
            s.check_shape(first)?;
            if s.constant_term().norm() != 0.0 {
                return Err(JetError::NonzeroConstant);
            }
        }
        let d = first.order().min(self.order());
        let powers: Vec<Vec<Jet>> = subs
            .iter()
            .map(|s| {
                let mut p = vec![Jet::constant(s.nvars(), s.order(), C64::new(1.0, 0.0)).expect("shape")];
                for k in 1..=d {
                    p.push(&p[k - 1] * s);
                }
                p
            })
            .collect();
        let mut out = Jet::zero(first.nvars(), first.order())?;
        for (idx, &c) in self.layout.indices.iter().zip(&self.coeffs) {
            if c == C64::new(0.0, 0.0) || idx.degree() > d {
                continue;
            }
            let mut term: Option<Jet> = None;
            for (var, &e) in idx.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = &powers[var][e as usize];
                term = Some(match term {
                    None => p.clone(),
                    Some(t) => &t * p,
                });
            }
            match term {
                None => out.coeffs[0] += c,
                Some(t) => {
                    for (o, x) in out.coeffs.iter_mut().zip(&t.coeffs) {
                        *o += c * x;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Re-expands the truncated polynomial around the displaced point `delta`.
    pub fn shift(&self, delta: &[C64]) -> JetResult<Jet> {
        if delta.len() != self.nvars() {
            return Err(JetError::IndexLength {
                got: delta.len(),
                expected: self.nvars(),
            });
        }
        let n = self.nvars();
        let d = self.order();
        let shifted: Vec<Vec<Jet>> = (0..n)
            .map(|i| {
                let base = Jet::variable(n, d, i).expect("shape").add_constant(delta[i]);
                let mut p = vec![Jet::constant(n, d, C64::new(1.0, 0.0)).expect("shape")];
                for k in 1..=d {
                    p.push(&p[k - 1] * &base);
                }
                p
            })
            .collect();
        let mut out = Jet::zero(n, d)?;
        for (idx, &c) in self.layout.indices.iter().zip(&self.coeffs) {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let mut term = Jet::constant(n, d, c)?;
            for (var, &e) in idx.0.iter().enumerate() {
                if e > 0 {
                    term = &term * &shifted[var][e as usize];
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Re-indexes the variables into a larger space: variable `i` becomes
    /// variable `offset + i` of `total_vars`.
    pub fn embed(&self, total_vars: usize, offset: usize) -> JetResult<Jet> {
        if offset + self.nvars() > total_vars {
            return Err(JetError::DimensionMismatch {
                left: total_vars,
                right: offset + self.nvars(),
            });
        }
        let mut out = Jet::zero(total_vars, self.order())?;
        for (idx, &c) in self.layout.indices.iter().zip(&self.coeffs) {
            let mut e = vec![0u32; total_vars];
            e[offset..offset + self.nvars()].copy_from_slice(&idx.0);
            let slot = out.layout.slot(&MultiIndex(e)).expect("within order");
            out.coeffs[slot] = c;
        }
        Ok(out)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coefficients of total degree exactly `deg`.
    pub fn homogeneous_part(&self, deg: usize) -> impl Iterator<Item = (&MultiIndex, C64)> + '_ {
        let range = if deg <= self.order() {
            self.layout.degree_range(deg)
        } else {
            0..0
        };
        range.map(move |s| (&self.layout.indices[s], self.coeffs[s]))
    }
}

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    /// Panics on shape mismatch; use [`Jet::try_add`] for a checked sum.
    fn add(self, rhs: &'a Jet) -> Jet {
        self.try_add(rhs).expect("jet shapes must match")
    }
}

impl<'a> Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, rhs: &'a Jet) -> Jet {
        self.try_sub(rhs).expect("jet shapes must match")
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, rhs: &'a Jet) -> Jet {
        self.try_mul(rhs).expect("jet shapes must match")
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map_coeffs(|c| -c)
    }
}

/// One-variable function `Σ_p (log z)^p · f_p(z)` with each `f_p` a polynomial
/// about the puncture `z = 0`, stored as a jet whose order bounds its degree.
#[derive(Clone, Debug)]
pub struct LogJet {
    branch_terms: Vec<(u32, Jet)>,
}

impl LogJet {
    pub fn new(branch_terms: Vec<(u32, Jet)>) -> JetResult<LogJet> {
        for (_, j) in &branch_terms {
            if j.nvars() != 1 {
                return Err(JetError::DimensionMismatch {
                    left: 1,
                    right: j.nvars(),
                });
            }
        }
        Ok(LogJet { branch_terms })
    }

    pub fn branch_terms(&self) -> &[(u32, Jet)] {
        &self.branch_terms
    }

    /// Taylor jet of the function at `z0 ≠ 0` in the displacement `w = z − z0`,
    /// using the principal branch of `log z0`.
    pub fn expand_at(&self, z0: C64, order: usize) -> JetResult<Jet> {
        if z0.norm() == 0.0 {
            return Err(JetError::AtPuncture);
        }
        let w = Jet::variable(1, order, 0)?;
        // log(z0 + w) = log z0 + log(1 + w/z0)
        let log_z = w.scale(z0.inv()).add_constant(C64::new(1.0, 0.0)).log()?.add_constant(z0.ln());
        let mut out = Jet::zero(1, order)?;
        for (p, poly) in &self.branch_terms {
            // exact: f_p is a polynomial of degree ≤ its jet order
            let at_z0 = poly.shift(&[z0])?.with_order(order)?;
            let term = &at_z0 * &log_z.powi(*p);
            out = &out + &term;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn layout_counts_monomials() {
        let l = JetLayout::get(3, 4).unwrap();
        // C(3 + 4, 4)
        assert_eq!(l.len(), 35);
        assert_eq!(l.indices()[0], MultiIndex::zeros(3));
        assert!(JetLayout::get(0, 2).is_err());
    }

    #[test]
    fn add_linear_example() {
        let one_z1 = Jet::from_terms(2, 2, [(mi(&[0, 0]), c(1.0, 0.0)), (mi(&[1, 0]), c(1.0, 0.0))]).unwrap();
        let two_z2 = Jet::from_terms(2, 2, [(mi(&[0, 0]), c(2.0, 0.0)), (mi(&[0, 1]), c(1.0, 0.0))]).unwrap();
        let s = one_z1.try_add(&two_z2).unwrap();
        assert_eq!(s.constant_term(), c(3.0, 0.0));
        assert_eq!(s.coeff(&mi(&[1, 0])), c(1.0, 0.0));
        assert_eq!(s.coeff(&mi(&[0, 1])), c(1.0, 0.0));
        let zero = Jet::zero(2, 2).unwrap();
        assert_eq!(one_z1.try_add(&zero).unwrap(), one_z1);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = Jet::zero(2, 2).unwrap();
        let b = Jet::zero(3, 2).unwrap();
        let c3 = Jet::zero(2, 3).unwrap();
        assert!(matches!(a.try_add(&b), Err(JetError::DimensionMismatch { .. })));
        assert!(matches!(a.try_mul(&c3), Err(JetError::OrderMismatch { .. })));
    }

    #[test]
    fn mul_difference_of_squares() {
        let z = Jet::variable(1, 2, 0).unwrap();
        let p = z.add_constant(c(1.0, 0.0));
        let m = (-&z).add_constant(c(1.0, 0.0));
        let prod = p.try_mul(&m).unwrap();
        assert_eq!(prod.constant_term(), c(1.0, 0.0));
        assert_eq!(prod.coeff(&mi(&[1])), c(0.0, 0.0));
        assert_eq!(prod.coeff(&mi(&[2])), c(-1.0, 0.0));
        let one = Jet::constant(1, 2, c(1.0, 0.0)).unwrap();
        assert_eq!(p.try_mul(&one).unwrap(), p);
    }

    #[test]
    fn inverse_is_geometric_series() {
        let z = Jet::variable(1, 3, 0).unwrap();
        let inv = z.add_constant(c(1.0, 0.0)).inv().unwrap();
        for (k, sign) in [1.0, -1.0, 1.0, -1.0].iter().enumerate() {
            assert!((inv.coeff(&mi(&[k as u32])) - c(*sign, 0.0)).norm() < 1e-15);
        }
        let two = Jet::constant(2, 3, c(2.0, 0.0)).unwrap();
        assert_eq!(two.inv().unwrap().constant_term(), c(0.5, 0.0));
        assert_eq!(Jet::zero(1, 3).unwrap().inv(), Err(JetError::ZeroConstantTerm));
    }

    #[test]
    fn log_series() {
        let one = Jet::constant(1, 2, c(1.0, 0.0)).unwrap();
        assert!(one.log().unwrap().max_abs() < 1e-16);
        let e = std::f64::consts::E;
        let z = Jet::variable(1, 2, 0).unwrap();
        let l = z.add_constant(c(1.0, 0.0)).scale(c(e, 0.0)).log().unwrap();
        assert!((l.constant_term() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((l.coeff(&mi(&[1])) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((l.coeff(&mi(&[2])) - c(-0.5, 0.0)).norm() < 1e-15);
        assert_eq!(Jet::zero(1, 2).unwrap().log(), Err(JetError::ZeroConstantTerm));
    }

    #[test]
    fn eval_deriv_factorial_rule() {
        let a = Jet::from_terms(3, 4, [(mi(&[2, 0, 0]), c(1.0, 0.0))]).unwrap();
        assert_eq!(a.eval_deriv(&mi(&[2, 0, 0])).unwrap(), c(2.0, 0.0));
        let b = Jet::constant(3, 4, c(0.25, -1.0)).unwrap();
        assert_eq!(b.eval_deriv(&MultiIndex::zeros(3)).unwrap(), c(0.25, -1.0));
        assert!(matches!(
            a.eval_deriv(&mi(&[3, 2, 0])),
            Err(JetError::OrderExceeded { requested: 5, order: 4 })
        ));
    }

    #[test]
    fn monomial_derivatives_match_symbolic_rule() {
        // ∂^β z^α = α!/(α−β)! z^{α−β}, which at 0 is α! when β = α and 0 otherwise.
        let l = JetLayout::get(2, 4).unwrap();
        for alpha in l.indices() {
            let j = Jet::from_terms(2, 4, [(alpha.clone(), c(1.0, 0.0))]).unwrap();
            for beta in l.indices() {
                let expected = if alpha == beta { alpha.factorial() } else { 0.0 };
                assert_eq!(j.eval_deriv(beta).unwrap(), c(expected, 0.0));
            }
        }
    }

    #[test]
    fn compose_with_linear_map() {
        // f(w) = w1^2, w1 = 2 v1 + v2
        let f = Jet::from_terms(2, 3, [(mi(&[2, 0]), c(1.0, 0.0))]).unwrap();
        let v1 = Jet::variable(2, 3, 0).unwrap();
        let v2 = Jet::variable(2, 3, 1).unwrap();
        let w1 = &v1.scale(c(2.0, 0.0)) + &v2;
        let g = f.compose(&[w1, v2.clone()]).unwrap();
        assert_eq!(g.coeff(&mi(&[2, 0])), c(4.0, 0.0));
        assert_eq!(g.coeff(&mi(&[1, 1])), c(4.0, 0.0));
        assert_eq!(g.coeff(&mi(&[0, 2])), c(1.0, 0.0));
        assert_eq!(f.compose(&[v1.add_constant(c(1.0, 0.0)), v2]), Err(JetError::NonzeroConstant));
    }

    #[test]
    fn shift_reexpands_polynomial() {
        // (1 + w)^2 shifted by 1 is (2 + w)^2
        let w = Jet::variable(1, 2, 0).unwrap();
        let p = w.add_constant(c(1.0, 0.0)).powi(2);
        let s = p.shift(&[c(1.0, 0.0)]).unwrap();
        assert_eq!(s.constant_term(), c(4.0, 0.0));
        assert_eq!(s.coeff(&mi(&[1])), c(4.0, 0.0));
        assert_eq!(s.coeff(&mi(&[2])), c(1.0, 0.0));
    }

    #[test]
    fn derivative_jet() {
        let a = Jet::from_terms(2, 3, [(mi(&[2, 1]), c(1.0, 0.0)), (mi(&[0, 1]), c(3.0, 0.0))]).unwrap();
        let d = a.derivative(1).unwrap();
        assert_eq!(d.order(), 2);
        assert_eq!(d.coeff(&mi(&[2, 0])), c(1.0, 0.0));
        assert_eq!(d.constant_term(), c(3.0, 0.0));
    }

    #[test]
    fn log_jet_matches_direct_evaluation() {
        // f(z) = z^2 log z
        let poly = Jet::from_terms(1, 2, [(mi(&[2]), c(1.0, 0.0))]).unwrap();
        let lj = LogJet::new(vec![(1, poly)]).unwrap();
        let z0 = c(0.3, 0.2);
        let jet = lj.expand_at(z0, 4).unwrap();
        let f = |z: C64| z * z * z.ln();
        assert!((jet.constant_term() - f(z0)).norm() < 1e-14);
        // f'(z) = 2 z log z + z
        let df = 2.0 * z0 * z0.ln() + z0;
        assert!((jet.coeff(&mi(&[1])) - df).norm() < 1e-14);
        // f'''(z) = 2 / z
        let d3 = jet.eval_deriv(&mi(&[3])).unwrap();
        assert!((d3 - 2.0 / z0).norm() < 1e-12);
        assert_eq!(lj.expand_at(c(0.0, 0.0), 3), Err(JetError::AtPuncture));
    }
}
