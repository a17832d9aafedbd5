//! Small dense linear-algebra helpers shared by the lattice and decoder code.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Thin Householder QR with the sign convention `R_ii >= 0`.
///
/// For an `r x c` input with `r >= c` returns `Q` (`r x c`, orthonormal
/// columns) and upper-triangular `R` (`c x c`). The factorization is a pure
/// function of the input, so repeated calls are bit-identical.
pub fn qr_positive(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    assert!(a.nrows() >= a.ncols(), "qr_positive needs a tall or square matrix");
    let qr = a.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for i in 0..r.nrows() {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
    (q, r)
}

/// `ln |det(A)|` of a square matrix via QR, robust to overflow of the plain
/// determinant for large dimensions.
pub fn log_abs_det(a: &DMatrix<f64>) -> f64 {
    assert!(a.is_square());
    let (_, r) = qr_positive(a);
    r.diagonal().iter().map(|d| d.abs().ln()).sum()
}

/// Checks that `r` is square, upper triangular and has a strictly positive
/// diagonal; returns its dimension.
pub fn check_upper_positive(r: &DMatrix<f64>) -> Result<usize> {
    if !r.is_square() {
        return Err(Error::DimensionMismatch {
            expected: r.nrows(),
            got: r.ncols(),
        });
    }
    let m = r.nrows();
    for i in 0..m {
        let d = r[(i, i)];
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "diagonal entry {i} of the triangular factor is {d}, must be positive"
            )));
        }
    }
    Ok(m)
}

/// Row-major copy of a square matrix, used by the hot decoder loops.
pub(crate) fn row_major(r: &DMatrix<f64>) -> Vec<f64> {
    let m = r.nrows();
    let n = r.ncols();
    let mut out = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            out.push(r[(i, j)]);
        }
    }
    out
}

/// `‖y − G z‖²` for an integer coefficient vector.
pub fn squared_distance(g: &DMatrix<f64>, y: &DVector<f64>, z: &[i64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..g.nrows() {
        let mut s = y[i];
        for (j, &zj) in z.iter().enumerate() {
            s -= g[(i, j)] * zj as f64;
        }
        acc += s * s;
    }
    acc
}

/// Matrix-vector product with an integer vector.
pub fn mul_int(g: &DMatrix<f64>, z: &[i64]) -> DVector<f64> {
    let zf = DVector::from_iterator(z.len(), z.iter().map(|&v| v as f64));
    g * zf
}

/// Round half away from zero into an `i64`.
#[inline]
pub fn round_int(x: f64) -> i64 {
    x.round() as i64
}
