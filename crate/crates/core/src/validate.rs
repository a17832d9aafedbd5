//! Self-check suites run by the `validate` command.
//!
//! Each suite compares a production routine against an independent oracle
//! on random instances and reports the worst discrepancy.

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{realify, sample_channel};
use crate::complexity::{cutoff_multiplexing_gain, l_exponent, partial_det_factorization_check};
use crate::decoders::{
    babai_nearest_plane, brute_force_cvp, layer_count_enumeration, sphere_decode, sufficient_box_bound,
};
use crate::error::Result;
use crate::linalg::{log_abs_det, qr_positive, squared_distance};
use crate::mmse_dfe::augmented_qr;

/// Result of one suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub instances: usize,
    pub passed: bool,
    pub detail: String,
}

/// Random generator with entries uniform in `[-1, 1]`, redrawn until its
/// condition number is moderate so exhaustive oracles stay affordable.
fn random_generator<R: Rng>(rng: &mut R, m: usize) -> DMatrix<f64> {
    loop {
        let g = DMatrix::from_fn(m, m, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let sv = g.singular_values();
        if sv.min() > 0.15 * sv.max() {
            return g;
        }
    }
}

/// Sphere decoder against exhaustive search.
pub fn check_sphere_vs_brute_force(instances: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agree = 0;
    for i in 0..instances {
        let m = [2, 4, 6][i % 3];
        let g = random_generator(&mut rng, m);
        let y = DVector::from_fn(m, |_, _| rng.random::<f64>() * 6.0 - 3.0);
        let (q, r) = qr_positive(&g);
        let yq = q.transpose() * &y;
        let babai = babai_nearest_plane(&r, &yq)?;
        let radius = squared_distance(&r, &yq, &babai).sqrt() * (1.0 + 1e-9) + 1e-12;
        let sd = sphere_decode(&r, &yq, radius, None)?;
        let bf = brute_force_cvp(&g, &y, sufficient_box_bound(&g, &y)?)?;
        if sd.z_hat.as_deref() == Some(bf.as_slice()) {
            agree += 1;
        }
    }
    Ok(CheckReport {
        name: "sphere-decoder-vs-brute-force".into(),
        instances,
        passed: agree == instances,
        detail: format!("{agree}/{instances} agree"),
    })
}

/// Per-layer node counts against direct enumeration.
pub fn check_layer_counts(instances: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exact = 0;
    for i in 0..instances {
        let m = 2 + i % 4;
        let (_, r) = qr_positive(&random_generator(&mut rng, m));
        let y = DVector::from_fn(m, |_, _| rng.random::<f64>() * 4.0 - 2.0);
        let radius = 0.5 + rng.random::<f64>() * 2.0;
        let sd = sphere_decode(&r, &y, radius, None)?;
        let mut ok = true;
        for k in 1..=m {
            ok &= layer_count_enumeration(&r, &y, radius, k)? == sd.layer_counts[k - 1];
        }
        exact += ok as usize;
    }
    Ok(CheckReport {
        name: "layer-count-instrumentation".into(),
        instances,
        passed: exact == instances,
        detail: format!("{exact}/{instances} exact"),
    })
}

/// `det(B^T B) = det(I + rho H^H H)^{2T}`.
pub fn check_determinant_identity(instances: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for i in 0..instances {
        let (m, n, t) = (1 + i % 3, 1 + (i / 3) % 3, [1, 3, 5][(i / 9) % 3]);
        let rho = 10f64.powf(rng.random::<f64>() * 3.0);
        let ch = sample_channel(&mut rng, m, n, t, rho)?;
        let b = augmented_qr(&realify(&ch)).backward;
        let lhs = 2.0 * log_abs_det(&b);
        let h = ch.matrix();
        let inner = DMatrix::<Complex<f64>>::identity(m, m) + h.adjoint() * h * Complex::new(rho, 0.0);
        let rhs = 2.0 * t as f64 * inner.determinant().re.ln();
        worst = worst.max(((lhs - rhs).exp() - 1.0).abs());
    }
    Ok(CheckReport {
        name: "mmse-dfe-determinant".into(),
        instances,
        passed: worst <= 1e-8,
        detail: format!("max relative error {worst:.3e}"),
    })
}

/// `det[(A G)_kk] = det(A_kk) det(G_kk)` for lower-triangular `G`.
pub fn check_partial_determinants(instances: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for i in 0..instances {
        let m = 2 + i % 7;
        let a = DMatrix::from_fn(m, m, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let g = DMatrix::from_fn(m, m, |r, c| {
            if c > r {
                0.0
            } else if c == r {
                0.5 + rng.random::<f64>()
            } else {
                rng.random::<f64>() * 2.0 - 1.0
            }
        });
        for k in 1..=m {
            let (l, r) = partial_det_factorization_check(&a, &g, k)?;
            if r.abs() > 1e-12 {
                worst = worst.max(((l - r) / r).abs());
            }
        }
    }
    Ok(CheckReport {
        name: "partial-determinant-factorization".into(),
        instances,
        passed: worst <= 1e-8,
        detail: format!("max relative error {worst:.3e}"),
    })
}

/// Closed-form exponent values.
pub fn check_closed_forms() -> Result<CheckReport> {
    let ok = cutoff_multiplexing_gain(2, 2, 3) == 0
        && cutoff_multiplexing_gain(3, 3, 5) == 1
        && l_exponent(2, 2, 3, 0.0)? == -4.0
        && l_exponent(3, 3, 5, 0.0)? == -9.0;
    Ok(CheckReport {
        name: "closed-form-exponents".into(),
        instances: 4,
        passed: ok,
        detail: "r0(2,2,3)=0, r0(3,3,5)=1, l(0)=-MN".into(),
    })
}

/// All suites with `instances` random cases each.
pub fn run_all(instances: usize, seed: u64) -> Result<Vec<CheckReport>> {
    Ok(vec![
        check_sphere_vs_brute_force(instances, seed)?,
        check_layer_counts(instances, seed.wrapping_add(1))?,
        check_determinant_identity(instances, seed.wrapping_add(2))?,
        check_partial_determinants(instances, seed.wrapping_add(3))?,
        check_closed_forms()?,
    ])
}
