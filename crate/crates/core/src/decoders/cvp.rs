use nalgebra::{DMatrix, DVector};

use super::babai_nearest_plane;
use crate::error::{check_dim, Result};
use crate::linalg::{check_upper_positive, round_int, row_major};

/// Exact closest lattice point on an upper-triangular basis.
///
/// Schnorr-Euchner enumeration started at the Babai distance with the radius
/// shrinking on every improvement. Uninstrumented; used for mod-lattice
/// reduction and as a reference, never for complexity measurements.
pub fn closest_point(r_upper: &DMatrix<f64>, y_prime: &DVector<f64>) -> Result<Vec<i64>> {
    let m = check_upper_positive(r_upper)?;
    check_dim(m, y_prime.len())?;
    if m == 0 {
        return Ok(Vec::new());
    }
    let babai = babai_nearest_plane(r_upper, y_prime)?;
    let r = row_major(r_upper);
    let mut search = Search {
        r: &r,
        y: y_prime.as_slice(),
        m,
        best_d: distance(&r, y_prime.as_slice(), &babai, m),
        best: babai,
        z: vec![0; m],
    };
    search.descend(m - 1, 0.0);
    Ok(search.best)
}

fn distance(r: &[f64], y: &[f64], z: &[i64], m: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..m {
        let mut s = y[i];
        for j in i..m {
            s -= r[i * m + j] * z[j] as f64;
        }
        acc += s * s;
    }
    acc
}

struct Search<'a> {
    r: &'a [f64],
    y: &'a [f64],
    m: usize,
    best: Vec<i64>,
    best_d: f64,
    z: Vec<i64>,
}

impl Search<'_> {
    fn descend(&mut self, l: usize, acc: f64) {
        let m = self.m;
        let mut s = self.y[l];
        for j in (l + 1)..m {
            s -= self.r[l * m + j] * self.z[j] as f64;
        }
        let d = self.r[l * m + l];
        let c = s / d;
        let z0 = round_int(c);
        let dir: i64 = if c >= z0 as f64 { 1 } else { -1 };
        // Zig-zag z0, z0+dir, z0-dir, z0+2dir, ... visits nondecreasing |z - c|.
        let mut step = 0i64;
        loop {
            let v = if step == 0 {
                z0
            } else if step % 2 == 1 {
                z0 + dir * (step + 1) / 2
            } else {
                z0 - dir * step / 2
            };
            let e = s - d * v as f64;
            let dist = acc + e * e;
            if dist >= self.best_d {
                break;
            }
            self.z[l] = v;
            if l == 0 {
                self.best_d = dist;
                self.best.copy_from_slice(&self.z);
            } else {
                self.descend(l - 1, dist);
            }
            step += 1;
        }
    }
}
