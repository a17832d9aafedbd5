//! Lattices, Construction-A mod-p lattices and nested LAST codebooks.

mod code;

use nalgebra::{DMatrix, DVector};

use crate::complexity::log_hypersphere_volume;
use crate::decoders::{closest_point, lll_reduce};
use crate::error::{invalid, Error, Result};
use crate::linalg::{log_abs_det, qr_positive};

pub use code::{build_nested_code, select_prime_power, CodeRecord, NestedLastCode, PRIME_CAP};

/// LLL parameter of the basis used internally for closest-point search.
const SEARCH_BASIS_DELTA: f64 = 0.99;

/// A full-rank lattice `{G z : z in Z^m}`; basis vectors are the columns of
/// the generator.
///
/// Closest-point queries run on an LLL-reduced copy `G U` of the basis,
/// which keeps exact search cheap for structured generators such as the
/// triangular Construction-A basis; results are mapped back through `U`.
#[derive(Debug, Clone)]
pub struct Lattice {
    generator: DMatrix<f64>,
    r: DMatrix<f64>,
    search_q: DMatrix<f64>,
    search_r: DMatrix<f64>,
    search_transform: DMatrix<i64>,
}

impl Lattice {
    pub fn new(generator: DMatrix<f64>) -> Result<Self> {
        if !generator.is_square() || generator.nrows() == 0 {
            return Err(invalid(format!(
                "lattice generator must be square and nonempty, got {}x{}",
                generator.nrows(),
                generator.ncols()
            )));
        }
        check_full_rank(&generator)?;
        let r = qr_positive(&generator).1;
        let lll = lll_reduce(&generator, SEARCH_BASIS_DELTA)?;
        let (search_q, search_r) = qr_positive(&lll.reduced);
        Ok(Self {
            generator,
            r,
            search_q,
            search_r,
            search_transform: lll.transform,
        })
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    pub fn dimension(&self) -> usize {
        self.generator.nrows()
    }

    /// Upper-triangular factor of the generator's QR decomposition.
    pub fn triangular(&self) -> &DMatrix<f64> {
        &self.r
    }

    /// Lattice with generator `factor * G`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Lattice::new(&self.generator * factor)
    }

    /// `sqrt(det(Gᵀ G))`.
    pub fn fundamental_volume(&self) -> f64 {
        self.r.diagonal().iter().product::<f64>().abs()
    }

    /// Integer coefficients of the lattice point closest to `y`.
    pub fn closest_point(&self, y: &DVector<f64>) -> Result<Vec<i64>> {
        let w = closest_point(&self.search_r, &(self.search_q.transpose() * y))?;
        let u = &self.search_transform;
        Ok((0..u.nrows())
            .map(|i| (0..u.ncols()).map(|j| u[(i, j)] * w[j]).sum())
            .collect())
    }

    /// `y mod Λ`: `y` minus its closest lattice point, together with the
    /// coefficients of the subtracted point.
    pub fn reduce(&self, y: &DVector<f64>) -> Result<(DVector<f64>, Vec<i64>)> {
        let w = self.closest_point(y)?;
        let reduced = y - crate::linalg::mul_int(&self.generator, &w);
        Ok((reduced, w))
    }
}

fn check_full_rank(g: &DMatrix<f64>) -> Result<()> {
    let m = g.nrows();
    let scale = g.amax();
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::SingularLattice("generator is zero or not finite".into()));
    }
    // |det G| > 1e-12 * scale^m, in log form.
    if log_abs_det(g) <= (1e-12f64).ln() + m as f64 * scale.ln() {
        return Err(Error::SingularLattice(format!(
            "generator of dimension {m} is numerically rank deficient"
        )));
    }
    Ok(())
}

/// `sqrt(det(Gᵀ G))` of an arbitrary square generator.
pub fn fundamental_volume(generator: &DMatrix<f64>) -> Result<f64> {
    if !generator.is_square() {
        return Err(invalid("fundamental volume needs a square generator"));
    }
    check_full_rank(generator)?;
    Ok(log_abs_det(generator).exp())
}

/// Radius of the ball whose volume equals the fundamental volume of
/// `Λ(A)`, where `A` is the channel-code matrix `M G`.
pub fn effective_radius(channel_code_matrix: &DMatrix<f64>) -> Result<f64> {
    if !channel_code_matrix.is_square() {
        return Err(invalid("effective radius needs a square matrix"));
    }
    check_full_rank(channel_code_matrix)?;
    let m = channel_code_matrix.nrows();
    let log_vol = log_abs_det(channel_code_matrix);
    Ok(((log_vol - log_hypersphere_volume(m, 1.0)) / m as f64).exp())
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Construction-A lattice `κ (C + p Z^m)` for the systematic code with
/// parity block `parity` (`(m - k) x k` over `Z_p`).
///
/// The generator is `κ [[I_k, 0], [P, p I_{m-k}]]`, lower triangular, with
/// determinant `κ^m p^{m-k}`.
pub fn construct_mod_p_lattice(p: u64, parity: &DMatrix<i64>, kappa: f64) -> Result<Lattice> {
    Lattice::new(mod_p_generator(p, parity, kappa)?)
}

pub(crate) fn mod_p_generator(p: u64, parity: &DMatrix<i64>, kappa: f64) -> Result<DMatrix<f64>> {
    if !is_prime(p) {
        return Err(invalid(format!("{p} is not prime")));
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(invalid(format!("kappa must be positive, got {kappa}")));
    }
    if let Some(bad) = parity.iter().find(|&&v| v < 0 || v as u64 >= p) {
        return Err(invalid(format!("parity entry {bad} outside [0, {p})")));
    }
    let k = parity.ncols();
    let m = parity.nrows() + k;
    if m == 0 {
        return Err(invalid("mod-p lattice needs a positive dimension"));
    }
    let mut g = DMatrix::zeros(m, m);
    for i in 0..k {
        g[(i, i)] = kappa;
    }
    for i in 0..(m - k) {
        for j in 0..k {
            g[(k + i, j)] = kappa * parity[(i, j)] as f64;
        }
        g[(k + i, k + i)] = kappa * p as f64;
    }
    Ok(g)
}
