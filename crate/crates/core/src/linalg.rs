//! Small complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::jets::C64;

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Contravariant components `g^{p m̄}` of a Hermitian form stored as `g[(i, j)] = g_{i j̄}`,
/// normalized so that `Σ_m g_{k m̄} g^{p m̄} = δ_kp`. Returned as `up[(p, m)]`.
pub fn raise(g: &CMat, what: &'static str) -> Result<CMat> {
    let inv = g.clone().try_inverse().ok_or(Error::Singular(what))?;
    Ok(inv.transpose())
}

/// Hermitian (to rounding) with strictly positive spectrum.
///
/// Cholesky alone is not enough here: the complex square root accepts
/// negative pivots.
pub fn is_positive_definite(m: &CMat) -> bool {
    let scale = max_abs(m).max(1e-300);
    if hermitian_residual(m) > 1e-10 * scale {
        return false;
    }
    hermitian_eigenvalues(m).first().is_some_and(|&e| e > 1e-14 * scale)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    ev
}

/// Eigenvalues of `a` relative to the positive-definite `b`, i.e. of `L⁻¹ a L⁻*` with `b = L L*`.
pub fn relative_eigenvalues(a: &CMat, b: &CMat) -> Result<Vec<f64>> {
    if !is_positive_definite(b) {
        return Err(Error::Singular("relative eigenproblem"));
    }
    let l = b.clone().cholesky().ok_or(Error::Singular("relative eigenproblem"))?.unpack();
    let linv = l.try_inverse().ok_or(Error::Singular("Cholesky factor"))?;
    Ok(hermitian_eigenvalues(&(&linv * a * linv.adjoint())))
}

pub fn hermitian_residual(m: &CMat) -> f64 {
    (m - m.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Hermitian inner product `⟨x, y⟩ = Σ x̄ᵢ yᵢ`.
pub fn inner(x: &CVec, y: &CVec) -> C64 {
    x.dotc(y)
}

/// Orthonormal basis (as columns) of the span of the given columns, dropping
/// directions whose residual norm falls below `tol` relative to the input.
pub fn orthonormal_basis(cols: &[CVec], tol: f64) -> Vec<CVec> {
    let scale = cols.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let mut basis: Vec<CVec> = Vec::new();
    for v in cols {
        let mut w = v.clone();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let p = inner(b, &w);
                w -= b * p;
            }
        }
        let nrm = w.norm();
        if nrm > tol * scale {
            basis.push(w / c(nrm, 0.0));
        }
    }
    basis
}

/// Orthonormal basis of `{v : rows · v = 0}` where `rows` holds linear functionals.
pub fn null_space(rows: &CMat, tol: f64) -> Vec<CVec> {
    let dim = rows.ncols();
    let conj_rows: Vec<CVec> = (0..rows.nrows())
        .map(|r| rows.row(r).transpose().map(|x| x.conj()))
        .collect();
    let row_basis = orthonormal_basis(&conj_rows, tol);
    let mut all = row_basis.clone();
    for k in 0..dim {
        all.push(CVec::from_fn(dim, |i, _| if i == k { c(1.0, 0.0) } else { c(0.0, 0.0) }));
    }
    orthonormal_basis(&all, 1e-8)
        .into_iter()
        .skip(row_basis.len())
        .collect()
}

pub fn columns_to_matrix(cols: &[CVec]) -> CMat {
    let nrows = cols.first().map_or(0, |v| v.len());
    CMat::from_fn(nrows, cols.len(), |i, j| cols[j][i])
}

pub fn matrix_columns(m: &CMat) -> Vec<CVec> {
    (0..m.ncols()).map(|j| m.column(j).into_owned()).collect()
}

/// Numerical rank from singular values above `tol · σ_max`.
pub fn rank(m: &CMat, tol: f64) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax).count()
}
