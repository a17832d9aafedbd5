//! Exhaustive reference oracles. Exponential cost; intended for small `m`.

use nalgebra::{DMatrix, DVector};

use super::babai_nearest_plane;
use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::{check_upper_positive, qr_positive, squared_distance};

/// Largest dimension accepted by [`brute_force_cvp`].
pub const BRUTE_FORCE_MAX_DIM: usize = 8;

const MAX_BOX_POINTS: f64 = 2e8;

/// Exhaustive closest-vector search over the box `babai ± box_bound`.
///
/// Ties are broken toward the lexicographically smallest `z`.
pub fn brute_force_cvp(generator: &DMatrix<f64>, y: &DVector<f64>, box_bound: u32) -> Result<Vec<i64>> {
    if !generator.is_square() {
        return Err(invalid("brute_force_cvp needs a square generator"));
    }
    let m = generator.nrows();
    check_dim(m, y.len())?;
    if m > BRUTE_FORCE_MAX_DIM {
        return Err(Error::OracleScaleExceeded(format!(
            "brute-force CVP limited to m <= {BRUTE_FORCE_MAX_DIM}, got {m}"
        )));
    }
    if (2.0 * box_bound as f64 + 1.0).powi(m as i32) > MAX_BOX_POINTS {
        return Err(Error::OracleScaleExceeded(format!(
            "box of half-width {box_bound} in dimension {m} is too large"
        )));
    }
    let (q, r) = qr_positive(generator);
    let center = babai_nearest_plane(&r, &(q.transpose() * y))?;
    let b = box_bound as i64;
    let lo: Vec<i64> = center.iter().map(|c| c - b).collect();
    let hi: Vec<i64> = center.iter().map(|c| c + b).collect();

    let mut best: Option<(f64, Vec<i64>)> = None;
    for_each_in_box(&lo, &hi, |z| {
        let d = squared_distance(generator, y, z);
        let better = match &best {
            None => true,
            Some((bd, bz)) => d < *bd || (d == *bd && z < bz.as_slice()),
        };
        if better {
            best = Some((d, z.to_vec()));
        }
    });
    Ok(best.map(|(_, z)| z).unwrap_or_default())
}

/// Smallest `box_bound` for which [`brute_force_cvp`] is guaranteed to
/// contain the closest point.
///
/// The closest point is no farther from `y` than the Babai point `b`, so it
/// lies in `c + G^{-1} B(d)` with `c = G^{-1} y` and `d = ‖y − G b‖`; hence
/// `|z_i − b_i| <= |c_i − b_i| + d ‖row_i(G^{-1})‖`.
pub fn sufficient_box_bound(generator: &DMatrix<f64>, y: &DVector<f64>) -> Result<u32> {
    if !generator.is_square() {
        return Err(invalid("box bound needs a square generator"));
    }
    check_dim(generator.nrows(), y.len())?;
    let inv = generator
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularLattice("generator is singular".into()))?;
    let (q, r) = qr_positive(generator);
    let babai = babai_nearest_plane(&r, &(q.transpose() * y))?;
    let d = squared_distance(generator, y, &babai).sqrt();
    let c = &inv * y;
    let mut bound = 0.0f64;
    for i in 0..generator.nrows() {
        bound = bound.max((c[i] - babai[i] as f64).abs() + d * inv.row(i).norm());
    }
    let bound = bound.ceil() + 1.0;
    if bound > u32::MAX as f64 {
        return Err(Error::OracleScaleExceeded(format!("box bound {bound:.3e} is too large")));
    }
    Ok(bound as u32)
}

/// Counts the partial vectors of layer `k` inside the sphere by direct
/// enumeration: the number of `z` in `Z^k` with
/// `‖y'_{last k} − R_kk z‖ <= radius`, where `R_kk` is the lower-right
/// `k x k` block of `r_upper`.
pub fn layer_count_enumeration(
    r_upper: &DMatrix<f64>,
    y_prime: &DVector<f64>,
    radius: f64,
    k: usize,
) -> Result<u64> {
    let m = check_upper_positive(r_upper)?;
    check_dim(m, y_prime.len())?;
    if k == 0 || k > m {
        return Err(invalid(format!("layer {k} outside 1..={m}")));
    }
    if k > BRUTE_FORCE_MAX_DIM {
        return Err(Error::OracleScaleExceeded(format!(
            "layer enumeration limited to k <= {BRUTE_FORCE_MAX_DIM}, got {k}"
        )));
    }
    let off = m - k;
    let rk = r_upper.view((off, off), (k, k)).into_owned();
    let yk = y_prime.rows(off, k).into_owned();
    let inv = rk
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularLattice("layer block is singular".into()))?;
    let center = &inv * &yk;
    // {z : ‖yk − Rk z‖ <= r} ⊂ center + Rk^{-1} B(r), so |z_i − c_i| <= r ‖row_i(Rk^{-1})‖.
    let mut lo = Vec::with_capacity(k);
    let mut hi = Vec::with_capacity(k);
    let mut points = 1.0f64;
    for i in 0..k {
        let w = radius * inv.row(i).norm();
        let a = (center[i] - w).floor() as i64;
        let b = (center[i] + w).ceil() as i64;
        points *= (b - a + 1) as f64;
        lo.push(a);
        hi.push(b);
    }
    if points > MAX_BOX_POINTS {
        return Err(Error::OracleScaleExceeded(format!(
            "layer {k} enumeration box holds {points:.3e} points"
        )));
    }
    let r2 = radius * radius;
    let mut count = 0u64;
    for_each_in_box(&lo, &hi, |z| {
        let mut acc = 0.0;
        for i in 0..k {
            let mut s = yk[i];
            for j in i..k {
                s -= rk[(i, j)] * z[j] as f64;
            }
            acc += s * s;
        }
        if acc <= r2 {
            count += 1;
        }
    });
    Ok(count)
}

/// Visits every integer vector of the box in lexicographic order.
fn for_each_in_box(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    let n = lo.len();
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return;
    }
    let mut z = lo.to_vec();
    loop {
        f(&z);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if z[i] < hi[i] {
                z[i] += 1;
                for t in (i + 1)..n {
                    z[t] = lo[t];
                }
                break;
            }
        }
    }
}
