//! Dense symmetric eigen helpers for the small matrices used here (N up to a
//! few hundred).

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest (algebraic) eigenvalue of a symmetric matrix and a unit
/// eigenvector for it. Fails if the matrix is not symmetric to 1e-9 or the
/// residual `||Av - lambda v||` exceeds `tol`.
pub fn symmetric_top_eigenpair(matrix: &DMatrix<f64>, tol: f64) -> Result<(f64, DVector<f64>)> {
    let n = matrix.nrows();
    if n == 0 || matrix.ncols() != n {
        return Err(Error::InvalidArgument(format!(
            "expected a non-empty square matrix, got {}x{}",
            n,
            matrix.ncols()
        )));
    }
    let asym = (matrix - matrix.transpose()).abs().max();
    if !(asym <= 1e-9) {
        return Err(Error::InvalidArgument(format!("matrix is not symmetric (asymmetry {asym:e})")));
    }
    let eig = SymmetricEigen::new(matrix.clone());
    let (idx, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if !lambda.is_finite() {
        return Err(Error::Numerical("non-finite eigenvalue".into()));
    }
    let v = eig.eigenvectors.column(idx).normalize();
    let residual = (matrix * &v - &v * lambda).norm();
    if !(residual <= tol) {
        return Err(Error::Numerical(format!("eigenpair residual {residual:e} exceeds {tol:e}")));
    }
    Ok((lambda, v))
}

/// Subtracts `J = 11^T / n`, deflating the consensus direction of a doubly
/// stochastic matrix.
pub fn deflate(w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = w.nrows();
    w.map(|x| x - 1.0 / n as f64)
}
