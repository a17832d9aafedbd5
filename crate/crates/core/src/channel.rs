//! Quasi-static Rayleigh MIMO channel and its real-valued block model.
//!
//! The complex model over `T` channel uses is `Y = sqrt(rho) H X + W` with
//! `H` of size `N x M`. Vectorizing per time slot as
//! `[Re x_t; Im x_t]` gives the real model `y = H_r x + e` with
//! `H_r = I_T ⊗ sqrt(rho) [[Re H, -Im H], [Im H, Re H]]` and `e` i.i.d.
//! `N(0, 1/2)`.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};

/// Exponent assigned to a (numerically) zero eigenvalue.
pub const ALPHA_SENTINEL: f64 = 1e6;

/// One channel draw together with the dimensions and SNR it is used at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ChannelRecord", try_from = "ChannelRecord")]
pub struct ChannelRealization {
    h: DMatrix<Complex<f64>>,
    blocklength: usize,
    rho: f64,
}

/// Serialized form of a [`ChannelRealization`] (row-major real and imaginary
/// parts), used to replay failing trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRecord {
    #[serde(rename = "M")]
    pub antennas: usize,
    #[serde(rename = "N")]
    pub receive: usize,
    #[serde(rename = "T")]
    pub blocklength: usize,
    pub rho: f64,
    pub h_re: Vec<f64>,
    pub h_im: Vec<f64>,
}

impl From<ChannelRealization> for ChannelRecord {
    fn from(ch: ChannelRealization) -> Self {
        let (n, m) = ch.h.shape();
        let mut h_re = Vec::with_capacity(n * m);
        let mut h_im = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                h_re.push(ch.h[(i, j)].re);
                h_im.push(ch.h[(i, j)].im);
            }
        }
        Self {
            antennas: m,
            receive: n,
            blocklength: ch.blocklength,
            rho: ch.rho,
            h_re,
            h_im,
        }
    }
}

impl TryFrom<ChannelRecord> for ChannelRealization {
    type Error = Error;

    fn try_from(rec: ChannelRecord) -> Result<Self> {
        let len = rec.antennas * rec.receive;
        check_dim(len, rec.h_re.len())?;
        check_dim(len, rec.h_im.len())?;
        let h = DMatrix::from_fn(rec.receive, rec.antennas, |i, j| {
            let idx = i * rec.antennas + j;
            Complex::new(rec.h_re[idx], rec.h_im[idx])
        });
        ChannelRealization::new(h, rec.blocklength, rec.rho)
    }
}

impl ChannelRealization {
    /// Wraps a given `N x M` complex channel matrix.
    pub fn new(h: DMatrix<Complex<f64>>, blocklength: usize, rho: f64) -> Result<Self> {
        if h.nrows() == 0 || h.ncols() == 0 || blocklength == 0 {
            return Err(invalid("M, N and T must be at least 1"));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(invalid(format!("snr must be positive, got {rho}")));
        }
        Ok(Self { h, blocklength, rho })
    }

    pub fn matrix(&self) -> &DMatrix<Complex<f64>> {
        &self.h
    }

    pub fn antennas(&self) -> usize {
        self.h.ncols()
    }

    pub fn receive(&self) -> usize {
        self.h.nrows()
    }

    pub fn blocklength(&self) -> usize {
        self.blocklength
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Same channel matrix used at another SNR.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.h.clone(), self.blocklength, rho)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Eigenvalues of `H^H H` (ascending) and their SNR exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenExponents {
    pub lambdas: Vec<f64>,
    pub alphas: Vec<f64>,
}

/// Draws `H` with i.i.d. `CN(0, 1)` entries.
pub fn sample_channel<R: Rng + ?Sized>(
    rng: &mut R,
    antennas: usize,
    receive: usize,
    blocklength: usize,
    rho: f64,
) -> Result<ChannelRealization> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = DMatrix::from_fn(receive, antennas, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(s * re, s * im)
    });
    ChannelRealization::new(h, blocklength, rho)
}

/// The `2NT x 2MT` real channel matrix including the `sqrt(rho)` gain.
pub fn realify(ch: &ChannelRealization) -> DMatrix<f64> {
    let (n, m) = ch.h.shape();
    let t = ch.blocklength;
    let g = ch.rho.sqrt();
    let mut out = DMatrix::zeros(2 * n * t, 2 * m * t);
    for slot in 0..t {
        let (r0, c0) = (2 * n * slot, 2 * m * slot);
        for i in 0..n {
            for j in 0..m {
                let h = ch.h[(i, j)] * g;
                out[(r0 + i, c0 + j)] = h.re;
                out[(r0 + i, c0 + m + j)] = -h.im;
                out[(r0 + n + i, c0 + j)] = h.im;
                out[(r0 + n + i, c0 + m + j)] = h.re;
            }
        }
    }
    out
}

/// Real vectorization of a complex `rows x T` matrix: `[Re x_t; Im x_t]`
/// stacked over the columns `t`.
pub fn vec_real(x: &DMatrix<Complex<f64>>) -> DVector<f64> {
    let rows = x.nrows();
    let mut out = DVector::zeros(2 * rows * x.ncols());
    for t in 0..x.ncols() {
        for i in 0..rows {
            out[2 * rows * t + i] = x[(i, t)].re;
            out[2 * rows * t + rows + i] = x[(i, t)].im;
        }
    }
    out
}

/// Inverse of [`vec_real`] for a `rows x T` matrix.
pub fn unvec_real(v: &DVector<f64>, rows: usize) -> Result<DMatrix<Complex<f64>>> {
    if rows == 0 || v.len() % (2 * rows) != 0 {
        return Err(invalid(format!("length {} is not a multiple of 2*{rows}", v.len())));
    }
    let t = v.len() / (2 * rows);
    Ok(DMatrix::from_fn(rows, t, |i, c| {
        Complex::new(v[2 * rows * c + i], v[2 * rows * c + rows + i])
    }))
}

fn check_power(x: &DVector<f64>, ch: &ChannelRealization) -> Result<()> {
    check_dim(2 * ch.antennas() * ch.blocklength, x.len())?;
    // The power constraint holds on average over the codebook (Voronoi
    // shaping), so individual codewords are only checked for finiteness.
    if !x.iter().all(|v| v.is_finite()) {
        return Err(invalid("transmit vector has non-finite entries"));
    }
    Ok(())
}

/// `y = H_r x + e` with `e` i.i.d. `N(0, 1/2)`.
pub fn transmit<R: Rng + ?Sized>(x: &DVector<f64>, ch: &ChannelRealization, rng: &mut R) -> Result<DVector<f64>> {
    check_power(x, ch)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut y = realify(ch) * x;
    for v in y.iter_mut() {
        let e: f64 = rng.sample(StandardNormal);
        *v += s * e;
    }
    Ok(y)
}

/// `y = H_r x` without noise.
pub fn transmit_noiseless(x: &DVector<f64>, ch: &ChannelRealization) -> Result<DVector<f64>> {
    check_power(x, ch)?;
    Ok(realify(ch) * x)
}

/// `H^H H`.
fn gram(ch: &ChannelRealization) -> DMatrix<Complex<f64>> {
    ch.h.adjoint() * &ch.h
}

/// Achievable rate `log2 det(I_M + rho H^H H)` in bits per channel use.
pub fn last_rate(ch: &ChannelRealization) -> f64 {
    let m = ch.antennas();
    let a = DMatrix::<Complex<f64>>::identity(m, m) + gram(ch) * Complex::new(ch.rho, 0.0);
    // I + rho H^H H is Hermitian positive definite.
    let chol = a.cholesky().expect("I + rho H^H H is positive definite");
    2.0 * chol.l().diagonal().iter().map(|d| d.re.log2()).sum::<f64>()
}

/// Outage event `R >= log2 det(I + rho H^H H)`.
pub fn is_outage(ch: &ChannelRealization, rate_bpcu: f64) -> bool {
    rate_bpcu >= last_rate(ch)
}

/// Eigenvalues of `H^H H`, ascending and clamped at zero.
pub fn eigenvalues(ch: &ChannelRealization) -> Vec<f64> {
    let mut l: Vec<f64> = gram(ch).symmetric_eigenvalues().iter().map(|v| v.max(0.0)).collect();
    l.sort_by(|a, b| a.total_cmp(b));
    l
}

/// `alpha_i = -ln lambda_i / ln rho`, with [`ALPHA_SENTINEL`] for
/// vanishing eigenvalues.
pub fn alpha_vector(ch: &ChannelRealization) -> Result<EigenExponents> {
    if !(ch.rho > 1.0) {
        return Err(invalid(format!("eigen-exponents need rho > 1, got {}", ch.rho)));
    }
    let lambdas = eigenvalues(ch);
    let lr = ch.rho.ln();
    let alphas = lambdas
        .iter()
        .map(|&l| if l < 1e-300 { ALPHA_SENTINEL } else { -l.ln() / lr })
        .collect();
    Ok(EigenExponents { lambdas, alphas })
}
