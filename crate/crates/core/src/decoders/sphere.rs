use nalgebra::{DMatrix, DVector};

use super::{DecodeOutcome, DecodeStatus};
use crate::error::{check_dim, invalid, Result};
use crate::linalg::{check_upper_positive, row_major};

/// Fincke-Pohst sphere decoder with a fixed radius and an optional node
/// budget.
///
/// Every partial vector whose partial metric stays within `radius^2` is
/// visited, layer by layer from the last coordinate down to the first, in
/// ascending order inside each layer. The radius never shrinks. Before each
/// new node the running count is compared with `timeout`; reaching it ends
/// the search with [`DecodeStatus::TimedOut`], so `total_count <= timeout`.
///
/// Among the full-length vectors found, the one closest to `y_prime` is
/// returned, ties going to the lexicographically smallest `z`.
pub fn sphere_decode(
    r_upper: &DMatrix<f64>,
    y_prime: &DVector<f64>,
    radius: f64,
    timeout: Option<u64>,
) -> Result<DecodeOutcome> {
    let m = check_upper_positive(r_upper)?;
    check_dim(m, y_prime.len())?;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(invalid(format!("sphere radius must be positive, got {radius}")));
    }
    let mut out = DecodeOutcome::new(m);
    if m == 0 {
        out.z_hat = Some(Vec::new());
        out.status = DecodeStatus::Found;
        return Ok(out);
    }

    let r = row_major(r_upper);
    let r2 = radius * radius;
    let mut z = vec![0i64; m];
    let mut hi = vec![0i64; m];
    let mut resid = vec![0.0f64; m];
    // dist[l] is the partial metric of coordinates l..m; dist[m] = 0.
    let mut dist = vec![0.0f64; m + 1];
    let mut best: Option<(f64, Vec<i64>)> = None;

    let enter = |l: usize, z: &mut [i64], hi: &mut [i64], resid: &mut [f64], dist: &[f64]| {
        let row = &r[l * m..(l + 1) * m];
        let mut s = y_prime[l];
        for j in (l + 1)..m {
            s -= row[j] * z[j] as f64;
        }
        resid[l] = s;
        let d = row[l];
        let base = dist[l + 1];
        let metric = |v: i64| {
            let e = s - d * v as f64;
            base + e * e
        };
        let budget = r2 - base;
        if budget < 0.0 {
            z[l] = 1;
            hi[l] = 0;
            return;
        }
        let c = s / d;
        let half = budget.sqrt() / d;
        let mut lo = (c - half).ceil() as i64;
        let mut up = (c + half).floor() as i64;
        while metric(lo - 1) <= r2 {
            lo -= 1;
        }
        while lo <= up && metric(lo) > r2 {
            lo += 1;
        }
        while metric(up + 1) <= r2 {
            up += 1;
        }
        while up >= lo && metric(up) > r2 {
            up -= 1;
        }
        z[l] = lo;
        hi[l] = up;
    };

    let mut l = m - 1;
    enter(l, &mut z, &mut hi, &mut resid, &dist);
    loop {
        if z[l] > hi[l] {
            if l == m - 1 {
                break;
            }
            l += 1;
            z[l] += 1;
            continue;
        }
        if let Some(limit) = timeout {
            if out.total_count >= limit {
                out.status = DecodeStatus::TimedOut;
                return Ok(out);
            }
        }
        out.total_count += 1;
        out.layer_counts[m - 1 - l] += 1;
        let e = resid[l] - r[l * m + l] * z[l] as f64;
        dist[l] = dist[l + 1] + e * e;
        if l == 0 {
            let better = match &best {
                None => true,
                Some((bd, bz)) => dist[0] < *bd || (dist[0] == *bd && z < *bz),
            };
            if better {
                best = Some((dist[0], z.clone()));
            }
            z[0] += 1;
        } else {
            l -= 1;
            enter(l, &mut z, &mut hi, &mut resid, &dist);
        }
    }

    if let Some((_, zb)) = best {
        out.z_hat = Some(zb);
        out.status = DecodeStatus::Found;
    }
    Ok(out)
}
