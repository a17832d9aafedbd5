//! MMSE-DFE front end from the QR decomposition of the augmented channel.
//!
//! With `[H; I] = Q~ R` (positive diagonal), the forward filter is
//! `F = Q^T` where `Q` is the upper `n x m` block of `Q~`, and the backward
//! filter is `B = R`. Then `F y = B x + e'` with
//! `e' = -R^{-T} x + F e`, and `det(B^T B) = det(I + H^T H)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Result};
use crate::linalg::qr_positive;

/// Forward (`m x n`) and backward (`m x m`, upper triangular) filters.
#[derive(Debug, Clone, PartialEq)]
pub struct MmseDfeFilters {
    pub forward: DMatrix<f64>,
    pub backward: DMatrix<f64>,
}

/// Filters for the real channel matrix `h_real` (`n x m`).
pub fn augmented_qr(h_real: &DMatrix<f64>) -> MmseDfeFilters {
    let (n, m) = h_real.shape();
    let mut aug = DMatrix::zeros(n + m, m);
    aug.view_mut((0, 0), (n, m)).copy_from(h_real);
    aug.view_mut((n, 0), (m, m)).fill_with_identity();
    let (q, r) = qr_positive(&aug);
    MmseDfeFilters {
        forward: q.view((0, 0), (n, m)).transpose(),
        backward: r,
    }
}

/// `F y`.
pub fn apply_forward(filters: &MmseDfeFilters, y: &DVector<f64>) -> Result<DVector<f64>> {
    check_dim(filters.forward.ncols(), y.len())?;
    Ok(&filters.forward * y)
}
