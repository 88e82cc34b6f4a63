//! Small dense helpers on top of `nalgebra`.

use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Ratio of extreme eigenvalue magnitudes of a symmetric matrix.
pub fn symmetric_condition(g: &DMatrix<f64>) -> f64 {
    if g.nrows() == 0 {
        return 1.0;
    }
    let ev = g.clone().symmetric_eigenvalues();
    let max = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = ev.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// 2-norm condition number from singular values.
pub fn condition(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 1.0;
    }
    let sv = a.singular_values();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        sv.max() / min
    }
}

/// Cholesky factor of an SPD matrix whose condition number is at most
/// `limit`.
pub fn checked_cholesky(
    g: &DMatrix<f64>,
    limit: f64,
) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let c = symmetric_condition(g);
    if !(c <= limit) {
        return Err(Error::Conditioning {
            condition: c,
            limit,
        });
    }
    g.clone()
        .cholesky()
        .ok_or_else(|| Error::Degeneracy("matrix is not positive definite".into()))
}

/// Orthonormal basis (columns) of the range of `a`, dropping singular
/// values below `tol * max`.
pub fn orthonormal_range(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let max = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol * max)
        .collect();
    DMatrix::from_fn(a.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Columns of `a` made orthogonal to the columns of the orthonormal `q`.
pub fn project_out(a: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    if q.ncols() == 0 {
        return a.clone();
    }
    a - q * (q.transpose() * a)
}

/// Smallest singular value.
pub fn min_singular_value(a: &DMatrix<f64>) -> f64 {
    a.singular_values().min()
}

pub fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}
