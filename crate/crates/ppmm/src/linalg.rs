//! Small dense symmetric positive-definite solves.
//!
//! Hand-rolled Cholesky so rank deficiency can be detected with an explicit
//! relative pivot tolerance instead of whatever a library factorization does
//! internally. Matrices here are normal-equation sized (tens of columns).

use nalgebra::{DMatrix, DVector};

/// Relative pivot tolerance for declaring a symmetric system rank deficient.
pub(crate) const PIVOT_REL_TOL: f64 = 1e-10;

/// Cholesky factor of a symmetric positive-definite matrix.
///
/// Fails with the offending pivot index when a diagonal pivot falls at or
/// below `rel_tol` times the largest pivot seen so far (or is non-positive).
/// `rel_tol = 0.0` accepts any strictly positive pivot.
pub(crate) fn cholesky(a: &DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>, usize> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    let mut l = DMatrix::<f64>::zeros(n, n);
    let mut max_pivot = 0.0_f64;
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        max_pivot = max_pivot.max(d);
        if d <= 0.0 || d <= rel_tol * max_pivot {
            return Err(j);
        }
        let dj = d.sqrt();
        l[(j, j)] = dj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / dj;
        }
    }
    Ok(l)
}

/// Solve `L L^T x = b` given the Cholesky factor `L`.
pub(crate) fn solve_with_factor(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = l.nrows();
    let mut x = b.clone();
    // forward: L y = b
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[(i, k)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    // backward: L^T x = y
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Inverse of the matrix underlying the Cholesky factor `L`.
pub(crate) fn inverse_with_factor(l: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut inv = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut e = DVector::<f64>::zeros(n);
        e[j] = 1.0;
        let col = solve_with_factor(l, &e);
        inv.set_column(j, &col);
    }
    inv
}
