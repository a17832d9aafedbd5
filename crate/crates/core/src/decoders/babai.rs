use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Result};
use crate::linalg::{check_upper_positive, round_int};

/// Nearest-plane (successive rounding) estimate on an upper-triangular basis.
pub fn babai_nearest_plane(r_upper: &DMatrix<f64>, y_prime: &DVector<f64>) -> Result<Vec<i64>> {
    let m = check_upper_positive(r_upper)?;
    check_dim(m, y_prime.len())?;
    let mut z = vec![0i64; m];
    for i in (0..m).rev() {
        let mut s = y_prime[i];
        for j in (i + 1)..m {
            s -= r_upper[(i, j)] * z[j] as f64;
        }
        z[i] = round_int(s / r_upper[(i, i)]);
    }
    Ok(z)
}
