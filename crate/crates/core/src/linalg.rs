//! Dense complex linear-algebra helpers.
//!
//! Most of the trace formulas in this crate multiply full matrices by
//! diagonal ones, so the helpers here take diagonals as plain slices and
//! scale rows or columns in place instead of forming `diag(d)` explicitly.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `diag(d) * m`
pub fn scale_rows<T>(d: &[T], m: &CMatrix) -> CMatrix
where
    T: Copy + Into<Complex64>,
{
    assert_eq!(d.len(), m.nrows());
    let mut out = m.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        let s: Complex64 = d[i].into();
        row *= s;
    }
    out
}

/// `m * diag(d)`
pub fn scale_cols<T>(m: &CMatrix, d: &[T]) -> CMatrix
where
    T: Copy + Into<Complex64>,
{
    assert_eq!(d.len(), m.ncols());
    let mut out = m.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        let s: Complex64 = d[j].into();
        col *= s;
    }
    out
}

pub fn diag_matrix<T>(d: &[T]) -> CMatrix
where
    T: Copy + Into<Complex64>,
{
    CMatrix::from_diagonal(&CVector::from_iterator(d.len(), d.iter().map(|&x| x.into())))
}

pub fn diagonal(m: &CMatrix) -> Vec<Complex64> {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).collect()
}

/// `Tr(a * b)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    assert_eq!(a.ncols(), b.nrows());
    assert_eq!(a.nrows(), b.ncols());
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `Tr(diag(d) * m)`
pub fn trace_diag<T>(d: &[T], m: &CMatrix) -> Complex64
where
    T: Copy + Into<Complex64>,
{
    d.iter()
        .enumerate()
        .map(|(i, &x)| x.into() * m[(i, i)])
        .sum()
}

/// Inverse of a Hermitian positive-definite matrix via Cholesky.
pub fn inverse_hpd(m: CMatrix) -> Result<CMatrix> {
    Cholesky::new(m)
        .map(|ch| ch.inverse())
        .ok_or_else(|| Error::Numeric("matrix is not Hermitian positive definite".into()))
}

/// General inverse via LU with partial pivoting.
pub fn inverse_general(m: CMatrix) -> Result<CMatrix> {
    let n = m.nrows();
    let lu = m.lu();
    let inv = lu
        .try_inverse()
        .ok_or_else(|| Error::Numeric(format!("singular {n}x{n} matrix")))?;
    if inv.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::Numeric(format!("non-finite inverse of {n}x{n} matrix")));
    }
    Ok(inv)
}

/// `log det` of a Hermitian positive-definite matrix.
pub fn log_det_hpd(m: CMatrix) -> Result<f64> {
    let ch = Cholesky::new(m)
        .ok_or_else(|| Error::Numeric("matrix is not Hermitian positive definite".into()))?;
    let l = ch.l_dirty();
    Ok((0..l.nrows()).map(|i| 2.0 * l[(i, i)].re.ln()).sum())
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// `max |a_ij - b_ij| / max(max |a_ij|, tiny)`
pub fn max_rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = a.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_gap(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}
