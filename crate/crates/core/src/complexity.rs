//! Closed-form complexity exponents and thresholds.
//!
//! All logarithms are natural. Quantities that overflow `f64` for large `m`
//! (`L0`, `(ln rho)^{2MT}`) are accumulated in the log domain.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::linalg::check_upper_positive;

/// `ln V(S^k(radius)) = (k/2) ln(π r²) − ln Γ(k/2 + 1)`.
pub fn log_hypersphere_volume(k: usize, radius: f64) -> f64 {
    let kf = k as f64;
    0.5 * kf * (std::f64::consts::PI * radius * radius).ln() - ln_gamma(0.5 * kf + 1.0)
}

/// Volume of the `k`-dimensional ball of the given radius.
pub fn hypersphere_volume(k: usize, radius: f64) -> f64 {
    if radius == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    log_hypersphere_volume(k, radius).exp()
}

/// Optimal diversity-multiplexing tradeoff `(M − r)(N − r)`.
pub fn dmt_exponent(antennas: usize, receive: usize, r: f64) -> Result<f64> {
    let max = antennas.min(receive) as f64;
    if !(0.0..=max).contains(&r) {
        return Err(invalid(format!("multiplexing gain {r} outside [0, {max}]")));
    }
    Ok((antennas as f64 - r) * (receive as f64 - r))
}

/// Average-complexity exponent `l(r) = T r (M − r)/M − (M − r)(N − r)` for
/// integer `r` in `0..=M`.
pub fn l_exponent(antennas: usize, receive: usize, blocklength: usize, r: f64) -> Result<f64> {
    if r.fract() != 0.0 || r < 0.0 || r > antennas as f64 {
        return Err(invalid(format!(
            "l(r) is defined for integer r in 0..={antennas}, got {r}"
        )));
    }
    let (m, n, t) = (antennas as f64, receive as f64, blocklength as f64);
    Ok(t * r * (m - r) / m - (m - r) * (n - r))
}

/// Objective of the `l(r)` maximization at a given exponent vector.
pub fn l_objective(antennas: usize, receive: usize, blocklength: usize, r: f64, alpha: &[f64]) -> f64 {
    let (m, n, t) = (antennas as f64, receive as f64, blocklength as f64);
    let mut gain = 0.0;
    let mut cost = 0.0;
    for (i, &a) in alpha.iter().enumerate() {
        let one_minus = (1.0 - a).max(0.0);
        gain += (r / m - one_minus).max(0.0);
        cost += (2.0 * (i + 1) as f64 - 1.0 + n - m) * a;
    }
    t * gain - cost
}

/// Grid maximization of [`l_objective`] over the non-outage set
/// `{alpha >= 0 : Σ (1 − alpha_i)^+ >= r}` with `alpha_i` in `[0, 1.5]`.
///
/// Returns the maximum and the maximizing `alpha` (first found in
/// lexicographic grid order).
pub fn maximize_l_over_alpha(
    antennas: usize,
    receive: usize,
    blocklength: usize,
    r: f64,
    grid_step: f64,
) -> Result<(f64, Vec<f64>)> {
    if !(grid_step > 0.0 && grid_step <= 0.05) {
        return Err(invalid(format!("grid step must lie in (0, 0.05], got {grid_step}")));
    }
    if antennas == 0 || antennas > 4 {
        return Err(invalid("grid search supports 1 <= M <= 4"));
    }
    if r < 0.0 || r > antennas as f64 {
        return Err(invalid(format!("non-outage set is empty for r = {r}")));
    }
    let points = (1.5 / grid_step).round() as usize + 1;
    let grid: Vec<f64> = (0..points).map(|i| i as f64 * grid_step).collect();
    let mut idx = vec![0usize; antennas];
    let mut alpha = vec![0.0; antennas];
    let mut best: Option<(f64, Vec<f64>)> = None;
    loop {
        for (a, &i) in alpha.iter_mut().zip(&idx) {
            *a = grid[i];
        }
        let slack: f64 = alpha.iter().map(|a| (1.0 - a).max(0.0)).sum();
        if slack >= r - 1e-12 {
            let v = l_objective(antennas, receive, blocklength, r, &alpha);
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, alpha.clone()));
            }
        }
        let mut d = antennas;
        loop {
            if d == 0 {
                return best.ok_or_else(|| invalid(format!("no grid point satisfies the constraint for r = {r}")));
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < points {
                break;
            }
            idx[d] = 0;
        }
    }
}

/// Cut-off multiplexing gain `floor(MN / (M + T))`, clamped to `M`.
///
/// Multiplexing gains only range over `0..=min(M, N)`; the floor can exceed
/// `M` when `N > M + T`, in which case every gain keeps the complexity
/// bounded and the cut-off is `M` itself.
pub fn cutoff_multiplexing_gain(antennas: usize, receive: usize, blocklength: usize) -> usize {
    ((antennas * receive) / (antennas + blocklength)).min(antennas)
}

/// `ln(L0 − m)` for the time-out threshold
/// `L0 = m + V(S^m(2R_s)) Σ_k V(S^k(R_s)) / det(R_kkᵀ R_kk)^{1/2}`.
pub fn log_l0_excess(r_upper: &DMatrix<f64>, radius: f64) -> Result<f64> {
    let m = check_upper_positive(r_upper).map_err(|e| match e {
        Error::InvalidParameter(s) => Error::SingularLattice(s),
        other => other,
    })?;
    if m == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    // det(R_kkᵀR_kk)^{1/2} is the product of the last k diagonal entries.
    let mut log_det = 0.0;
    let mut terms = Vec::with_capacity(m);
    for k in 1..=m {
        log_det += r_upper[(m - k, m - k)].ln();
        terms.push(log_hypersphere_volume(k, radius) - log_det);
    }
    Ok(log_hypersphere_volume(m, 2.0 * radius) + log_sum_exp(&terms))
}

/// The `L0` threshold; `+inf` once it leaves the `f64` range.
pub fn compute_l0(r_upper: &DMatrix<f64>, radius: f64) -> Result<f64> {
    let m = r_upper.nrows() as f64;
    Ok(m + log_l0_excess(r_upper, radius)?.exp())
}

/// Per-layer volume heuristic `C_k' = V(S^k(R_s)) / det(R_kkᵀ R_kk)^{1/2}`.
pub fn layer_volume_estimates(r_upper: &DMatrix<f64>, radius: f64) -> Result<Vec<f64>> {
    let m = check_upper_positive(r_upper)?;
    let mut log_det = 0.0;
    Ok((1..=m)
        .map(|k| {
            log_det += r_upper[(m - k, m - k)].ln();
            (log_hypersphere_volume(k, radius) - log_det).exp()
        })
        .collect())
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Both sides of `det[(A G)_kk] = det(A_kk) det(G_kk)` for lower-triangular
/// `G`, where `X_kk` is the lower-right `k x k` block.
pub fn partial_det_factorization_check(
    m_mat: &DMatrix<f64>,
    g_lower: &DMatrix<f64>,
    k: usize,
) -> Result<(f64, f64)> {
    let m = m_mat.nrows();
    if !m_mat.is_square() || g_lower.shape() != (m, m) {
        return Err(invalid("factorization check needs two m x m matrices"));
    }
    if k == 0 || k > m {
        return Err(invalid(format!("block size {k} outside 1..={m}")));
    }
    for i in 0..m {
        for j in (i + 1)..m {
            if g_lower[(i, j)] != 0.0 {
                return Err(invalid("G must be lower triangular"));
            }
        }
    }
    let off = m - k;
    let prod = m_mat * g_lower;
    let lhs = prod.view((off, off), (k, k)).determinant();
    let rhs = m_mat.view((off, off), (k, k)).determinant() * g_lower.view((off, off), (k, k)).determinant();
    Ok((lhs, rhs))
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 1.0) || !rho.is_finite() {
        return Err(invalid(format!("rho must exceed 1, got {rho}")));
    }
    Ok(())
}

/// `ln((ln rho)^power rho^{l(r)})`, the log of the excess term shared by the
/// average-complexity formulas.
fn log_excess(power: f64, l: f64, rho: f64) -> f64 {
    power * rho.ln().ln() + l * rho.ln()
}

/// Minimum average sphere-decoding complexity `2MT + (ln rho)^{2MT} rho^{l(r)}`.
pub fn l_out_theoretical(antennas: usize, receive: usize, blocklength: usize, r: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let l = l_exponent(antennas, receive, blocklength, r)?;
    let mt = (antennas * blocklength) as f64;
    Ok(2.0 * mt + log_excess(2.0 * mt, l, rho).exp())
}

/// Average sequential-decoding complexity `2MT + (ln rho)^{MT} rho^{l(r)}`.
pub fn sequential_complexity_theoretical(
    antennas: usize,
    receive: usize,
    blocklength: usize,
    r: f64,
    rho: f64,
) -> Result<f64> {
    check_rho(rho)?;
    let l = l_exponent(antennas, receive, blocklength, r)?;
    let mt = (antennas * blocklength) as f64;
    Ok(2.0 * mt + log_excess(mt, l, rho).exp())
}

/// Sphere-to-sequential complexity ratio `gamma`.
pub fn complexity_ratio(antennas: usize, receive: usize, blocklength: usize, r: f64, rho: f64) -> Result<f64> {
    Ok(l_out_theoretical(antennas, receive, blocklength, r, rho)?
        / sequential_complexity_theoretical(antennas, receive, blocklength, r, rho)?)
}

/// One row of the exponent table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentProfile {
    #[serde(rename = "M")]
    pub antennas: usize,
    #[serde(rename = "N")]
    pub receive: usize,
    #[serde(rename = "T")]
    pub blocklength: usize,
    pub r: usize,
    pub d_out: f64,
    pub l_r: f64,
    pub r0: usize,
}

impl ExponentProfile {
    pub fn new(antennas: usize, receive: usize, blocklength: usize, r: usize) -> Result<Self> {
        if r > antennas.min(receive) {
            return Err(invalid(format!("r = {r} exceeds min(M, N)")));
        }
        Ok(Self {
            antennas,
            receive,
            blocklength,
            r,
            d_out: dmt_exponent(antennas, receive, r as f64)?,
            l_r: l_exponent(antennas, receive, blocklength, r as f64)?,
            r0: cutoff_multiplexing_gain(antennas, receive, blocklength),
        })
    }
}

/// CSV exponent table: `M,N,T,r,d_out,l_r,r0` followed by one `L_out`
/// column per SNR (dB) in `snr_db`.
pub fn exponent_table_csv(systems: &[(usize, usize, usize)], snr_db: &[f64]) -> Result<String> {
    let mut out = String::from("M,N,T,r,d_out,l_r,r0");
    for s in snr_db {
        out.push_str(&format!(",L_out@{s}dB"));
    }
    out.push('\n');
    for &(m, n, t) in systems {
        for r in 0..=m.min(n) {
            let row = ExponentProfile::new(m, n, t, r)?;
            out.push_str(&format!(
                "{},{},{},{},{},{},{}",
                m,
                n,
                t,
                r,
                crate::harness::fmt_f64(row.d_out),
                crate::harness::fmt_f64(row.l_r),
                row.r0
            ));
            for &db in snr_db {
                let rho = 10f64.powf(db / 10.0);
                out.push(',');
                out.push_str(&crate::harness::fmt_f64(l_out_theoretical(m, n, t, r as f64, rho)?));
            }
            out.push('\n');
        }
    }
    Ok(out)
}
