use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Inverse of a symmetric positive definite matrix.
///
/// The matrix is first scaled to unit diagonal, which removes the large
/// spread between frequency, phase and amplitude units, then factorized by
/// Cholesky. Returns the inverse and the reciprocal condition number of
/// the scaled matrix.
pub fn spd_inverse(m: &DMatrix<f64>, what: &'static str, min_rcond: f64) -> Result<(DMatrix<f64>, f64)> {
    let n = m.nrows();
    let d: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    if d.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Singular { what, rcond: 0.0 });
    }
    let s: Vec<f64> = d.iter().map(|v| 1.0 / v.sqrt()).collect();
    let scaled = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]) * s[i] * s[j]);
    let eig = scaled.clone().symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let rcond = if max > 0.0 { (min / max).max(0.0) } else { 0.0 };
    if !(rcond >= min_rcond) {
        return Err(Error::Singular { what, rcond });
    }
    let chol = scaled.cholesky().ok_or(Error::Singular { what, rcond })?;
    let inv = chol.inverse();
    Ok((DMatrix::from_fn(n, n, |i, j| inv[(i, j)] * s[i] * s[j]), rcond))
}

/// Smallest eigenvalue relative to the trace; PSD matrices give `≥ 0` up to
/// rounding.
pub fn min_eigen_ratio(m: &DMatrix<f64>) -> f64 {
    let sym = 0.5 * (m + m.transpose());
    let trace = sym.trace();
    let min = sym.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    min / trace
}
