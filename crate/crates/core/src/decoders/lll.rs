use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::linalg::{log_abs_det, round_int};

/// Output of [`lll_reduce`]: `reduced = basis * transform` with `transform`
/// unimodular.
#[derive(Debug, Clone)]
pub struct LllOutcome {
    pub reduced: DMatrix<f64>,
    pub transform: DMatrix<i64>,
}

/// LLL reduction of the column basis `generator` with Lovász parameter
/// `delta` in `(0.25, 1]`.
pub fn lll_reduce(generator: &DMatrix<f64>, delta: f64) -> Result<LllOutcome> {
    if !(delta > 0.25 && delta <= 1.0) {
        return Err(invalid(format!("LLL delta must lie in (0.25, 1], got {delta}")));
    }
    if !generator.is_square() {
        return Err(invalid("LLL needs a square generator"));
    }
    let n = generator.ncols();
    let scale = generator.amax().max(f64::MIN_POSITIVE);
    if n > 0 && log_abs_det(generator) <= (1e-12f64).ln() + n as f64 * scale.ln() {
        return Err(Error::SingularLattice("LLL input is rank deficient".into()));
    }

    let mut b = generator.clone();
    let mut u = DMatrix::<i64>::identity(n, n);
    if n < 2 {
        return Ok(LllOutcome { reduced: b, transform: u });
    }
    let (mut mu, mut bstar) = gram_schmidt(&b);
    let mut k = 1;
    // Hard bound on iterations guards against float stagnation on
    // pathological inputs.
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 100_000 * n {
            return Err(Error::Internal("LLL failed to converge".into()));
        }
        for j in (0..k).rev() {
            let q = round_int(mu[(k, j)]);
            if q != 0 {
                let bj = b.column(j).into_owned();
                b.column_mut(k).axpy(-(q as f64), &bj, 1.0);
                for i in 0..n {
                    u[(i, k)] -= q * u[(i, j)];
                }
                for t in 0..j {
                    mu[(k, t)] -= q as f64 * mu[(j, t)];
                }
                mu[(k, j)] -= q as f64;
            }
        }
        if bstar[k] >= (delta - mu[(k, k - 1)].powi(2)) * bstar[k - 1] {
            k += 1;
        } else {
            b.swap_columns(k, k - 1);
            u.swap_columns(k, k - 1);
            let gs = gram_schmidt(&b);
            mu = gs.0;
            bstar = gs.1;
            k = (k - 1).max(1);
        }
    }
    Ok(LllOutcome { reduced: b, transform: u })
}

/// Gram-Schmidt coefficients `mu[(i, j)]` and squared norms `‖b*_i‖²`.
pub(crate) fn gram_schmidt(b: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let n = b.ncols();
    let mut mu = DMatrix::zeros(n, n);
    let mut star: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(n);
    let mut norms: Vec<f64> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = b.column(i).into_owned();
        for j in 0..i {
            let c = b.column(i).dot(&star[j]) / norms[j];
            mu[(i, j)] = c;
            v.axpy(-c, &star[j], 1.0);
        }
        mu[(i, i)] = 1.0;
        norms.push(v.norm_squared());
        star.push(v);
    }
    (mu, norms)
}

/// `Π ‖b_i‖ / |det B|`, equal to 1 exactly for orthogonal bases.
pub fn orthogonality_defect(b: &DMatrix<f64>) -> f64 {
    let log_norms: f64 = b.column_iter().map(|c| c.norm().ln()).sum();
    (log_norms - log_abs_det(b)).exp()
}
