use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{is_prime, mod_p_generator, Lattice};
use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::mul_int;

/// Largest prime considered when sizing the codebook.
pub const PRIME_CAP: u64 = 251;

/// Target average energy after calibration, as a fraction of `MT`.
const ENERGY_TARGET: f64 = 0.95;
/// Codebooks up to this size are averaged exhaustively during calibration.
const EXHAUSTIVE_LIMIT: f64 = 1e4;
const CALIBRATION_SAMPLES: usize = 10_000;

/// Nested LAST code built from a Construction-A lattice `Λ_p = κ (C + p Z^m)`.
///
/// The shaping lattice is `Λ_s = φ Λ_p` and the coding lattice the
/// self-similar `Λ_c = Λ_s / p`, so `Λ_s ⊂ Λ_c` and a message `u in Z_p^k`
/// is carried by the coset `G [u; 0] + Λ_s`. Codewords are the dithered
/// coset representatives reduced into the Voronoi region of `Λ_s`.
#[derive(Debug, Clone)]
pub struct NestedLastCode {
    antennas: usize,
    blocklength: usize,
    rate_bpcu: f64,
    rho: f64,
    p: u64,
    k: usize,
    parity: DMatrix<i64>,
    kappa: f64,
    phi: f64,
    seed: u64,
    mod_p: Lattice,
    shaping: Lattice,
    coding: Lattice,
    dither: DVector<f64>,
}

/// JSON form of a [`NestedLastCode`], sufficient for a bit-identical rebuild.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeRecord {
    #[serde(rename = "M")]
    pub antennas: usize,
    #[serde(rename = "T")]
    pub blocklength: usize,
    #[serde(rename = "R")]
    pub rate_bpcu: f64,
    pub rho: f64,
    pub p: u64,
    pub k: usize,
    pub kappa: f64,
    pub phi: f64,
    /// Parity block, `(m - k) x k`, row-major.
    #[serde(rename = "P")]
    pub parity: Vec<i64>,
    pub u0: Vec<f64>,
    pub seed: u64,
}

/// Smallest prime `p <= PRIME_CAP` (and its `k = min(m, ceil(bits / log2 p))`)
/// with `p^k >= 2^bits`.
pub fn select_prime_power(m: usize, bits: f64) -> Result<(u64, usize)> {
    if !(bits >= 0.0) || !bits.is_finite() {
        return Err(invalid(format!("codebook size 2^{bits} is not valid")));
    }
    for p in (2..=PRIME_CAP).filter(|&p| is_prime(p)) {
        let lp = (p as f64).log2();
        let k = ((bits / lp - 1e-9).ceil().max(0.0) as usize).min(m);
        if k as f64 * lp >= bits - 1e-9 {
            return Ok((p, k));
        }
    }
    Err(Error::RateInfeasible {
        rate_bpcu: f64::NAN,
        blocklength: 0,
        dimension: m,
        max_prime: PRIME_CAP,
    })
}

/// Builds the nested code for an `M x T` system at rate `rate_bpcu`.
///
/// All randomness (parity block, dither, calibration messages) comes from a
/// ChaCha stream seeded with `seed`.
pub fn build_nested_code(
    antennas: usize,
    blocklength: usize,
    rate_bpcu: f64,
    rho: f64,
    seed: u64,
) -> Result<NestedLastCode> {
    if antennas == 0 || blocklength == 0 {
        return Err(invalid("M and T must be at least 1"));
    }
    if !(rate_bpcu >= 0.0) || !rate_bpcu.is_finite() {
        return Err(invalid(format!("rate must be nonnegative, got {rate_bpcu}")));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(invalid(format!("snr must be positive, got {rho}")));
    }
    let m = 2 * antennas * blocklength;
    let (p, k) = select_prime_power(m, rate_bpcu * blocklength as f64).map_err(|_| Error::RateInfeasible {
        rate_bpcu,
        blocklength,
        dimension: m,
        max_prime: PRIME_CAP,
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parity = DMatrix::from_fn(m - k, k, |_, _| rng.random_range(0..p as i64));
    let kappa = (p as f64).powf(-((m - k) as f64) / m as f64);
    let mod_p = Lattice::new(mod_p_generator(p, &parity, kappa)?)?;

    // Uniform point of the fundamental parallelepiped, folded into the
    // Voronoi region.
    let cube = DVector::from_fn(m, |_, _| rng.random::<f64>());
    let (unit_dither, _) = mod_p.reduce(&(mod_p.generator() * cube))?;

    let unit_coding = mod_p.generator() / p as f64;
    let mut energy = 0.0;
    let mut count = 0usize;
    let mut accumulate = |msg: &[u64]| -> Result<()> {
        let a = mul_int(&unit_coding, &embed(msg, m)) + &unit_dither;
        let (x, _) = mod_p.reduce(&a)?;
        energy += x.norm_squared();
        count += 1;
        Ok(())
    };
    if (k as f64) * (p as f64).log10() <= EXHAUSTIVE_LIMIT.log10() {
        let mut msg = vec![0u64; k];
        loop {
            accumulate(&msg)?;
            if !increment(&mut msg, p) {
                break;
            }
        }
    } else {
        for _ in 0..CALIBRATION_SAMPLES {
            let msg: Vec<u64> = (0..k).map(|_| rng.random_range(0..p)).collect();
            accumulate(&msg)?;
        }
    }
    let unit_energy = energy / count as f64;
    if !(unit_energy > 0.0) {
        return Err(Error::Internal("calibration produced zero energy".into()));
    }
    let phi = (ENERGY_TARGET * (antennas * blocklength) as f64 / unit_energy).sqrt();
    let dither = unit_dither * phi;

    NestedLastCode::assemble(CodeRecord {
        antennas,
        blocklength,
        rate_bpcu,
        rho,
        p,
        k,
        kappa,
        phi,
        parity: parity.transpose().as_slice().to_vec(),
        u0: dither.as_slice().to_vec(),
        seed,
    })
}

fn embed(msg: &[u64], m: usize) -> Vec<i64> {
    let mut z = vec![0i64; m];
    for (zi, &u) in z.iter_mut().zip(msg) {
        *zi = u as i64;
    }
    z
}

/// Odometer increment over `Z_p^k`; false once it wraps.
fn increment(msg: &mut [u64], p: u64) -> bool {
    for d in msg.iter_mut() {
        *d += 1;
        if *d < p {
            return true;
        }
        *d = 0;
    }
    false
}

impl NestedLastCode {
    fn assemble(rec: CodeRecord) -> Result<Self> {
        let m = 2 * rec.antennas * rec.blocklength;
        if rec.k > m {
            return Err(invalid(format!("k = {} exceeds m = {m}", rec.k)));
        }
        check_dim((m - rec.k) * rec.k, rec.parity.len())?;
        check_dim(m, rec.u0.len())?;
        let parity = DMatrix::from_row_slice(m - rec.k, rec.k, &rec.parity);
        let gp = mod_p_generator(rec.p, &parity, rec.kappa)?;
        let mod_p = Lattice::new(gp.clone())?;
        let shaping = Lattice::new(&gp * rec.phi)?;
        let coding = Lattice::new(&gp * (rec.phi / rec.p as f64))?;
        Ok(Self {
            antennas: rec.antennas,
            blocklength: rec.blocklength,
            rate_bpcu: rec.rate_bpcu,
            rho: rec.rho,
            p: rec.p,
            k: rec.k,
            parity,
            kappa: rec.kappa,
            phi: rec.phi,
            seed: rec.seed,
            mod_p,
            shaping,
            coding,
            dither: DVector::from_vec(rec.u0),
        })
    }

    /// The same codebook labelled with another operating SNR.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(invalid(format!("snr must be positive, got {rho}")));
        }
        let mut code = self.clone();
        code.rho = rho;
        Ok(code)
    }

    pub fn from_record(rec: &CodeRecord) -> Result<Self> {
        Self::assemble(rec.clone())
    }

    pub fn to_record(&self) -> CodeRecord {
        CodeRecord {
            antennas: self.antennas,
            blocklength: self.blocklength,
            rate_bpcu: self.rate_bpcu,
            rho: self.rho,
            p: self.p,
            k: self.k,
            kappa: self.kappa,
            phi: self.phi,
            parity: self.parity.transpose().as_slice().to_vec(),
            u0: self.dither.as_slice().to_vec(),
            seed: self.seed,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_record())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_record(&serde_json::from_str(s)?)
    }

    /// Real dimension `m = 2MT`.
    pub fn dimension(&self) -> usize {
        2 * self.antennas * self.blocklength
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn blocklength(&self) -> usize {
        self.blocklength
    }

    pub fn rate_bpcu(&self) -> f64 {
        self.rate_bpcu
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `r = R / log2 rho`; undefined for `rho <= 1`.
    pub fn multiplexing_gain(&self) -> Option<f64> {
        (self.rho > 1.0).then(|| self.rate_bpcu / self.rho.log2())
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn message_dim(&self) -> usize {
        self.k
    }

    pub fn parity(&self) -> &DMatrix<i64> {
        &self.parity
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dither(&self) -> &DVector<f64> {
        &self.dither
    }

    /// `Λ_p` with generator `G_p`.
    pub fn mod_p_lattice(&self) -> &Lattice {
        &self.mod_p
    }

    /// `Λ_s = φ Λ_p`.
    pub fn shaping_lattice(&self) -> &Lattice {
        &self.shaping
    }

    /// `Λ_c = Λ_s / p`, generator `G = (φ / p) G_p` (lower triangular).
    pub fn coding_lattice(&self) -> &Lattice {
        &self.coding
    }

    /// Ratio between shaping and coding generators.
    pub fn self_similarity_ratio(&self) -> f64 {
        self.p as f64
    }

    /// `log2 |C| = k log2 p`.
    pub fn codebook_bits(&self) -> f64 {
        self.k as f64 * (self.p as f64).log2()
    }

    fn check_message(&self, message: &[u64]) -> Result<()> {
        check_dim(self.k, message.len())?;
        if let Some(bad) = message.iter().find(|&&u| u >= self.p) {
            return Err(invalid(format!("message symbol {bad} outside Z_{}", self.p)));
        }
        Ok(())
    }

    /// Codeword `x = (G [u; 0] + u0) mod Λ_s`.
    pub fn encode(&self, message: &[u64]) -> Result<DVector<f64>> {
        Ok(self.encode_with_coordinates(message)?.0)
    }

    /// Codeword together with its integer coordinates in the coding lattice:
    /// `x = G z + u0`.
    pub fn encode_with_coordinates(&self, message: &[u64]) -> Result<(DVector<f64>, Vec<i64>)> {
        self.check_message(message)?;
        let m = self.dimension();
        let z_embed = embed(message, m);
        let a = mul_int(self.coding.generator(), &z_embed) + &self.dither;
        let (x, w) = self
            .shaping
            .reduce(&a)
            .map_err(|e| Error::Internal(format!("shaping reduction failed: {e}")))?;
        let p = self.p as i64;
        let z = z_embed.iter().zip(&w).map(|(&e, &s)| e - p * s).collect();
        Ok((x, z))
    }

    /// Message carried by the coding-lattice point with coordinates `z_hat`,
    /// or `None` when the point lies outside the codebook's cosets.
    pub fn decode_message(&self, z_hat: &[i64]) -> Option<Vec<u64>> {
        if z_hat.len() != self.dimension() {
            return None;
        }
        let p = self.p as i64;
        let residues: Vec<u64> = z_hat.iter().map(|v| v.rem_euclid(p) as u64).collect();
        if residues[self.k..].iter().any(|&v| v != 0) {
            return None;
        }
        Some(residues[..self.k].to_vec())
    }

    /// Uniform random message.
    pub fn random_message<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        (0..self.k).map(|_| rng.random_range(0..self.p)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoders::brute_force_cvp;

    #[test]
    fn prime_power_selection() {
        assert_eq!(select_prime_power(12, 12.0).unwrap(), (2, 12));
        let (p, k) = select_prime_power(12, 24.0).unwrap();
        assert_eq!((p, k), (5, 11));
        assert!(k as f64 * (p as f64).log2() >= 24.0);
        assert_eq!(select_prime_power(12, 36.0).unwrap(), (11, 11));
        assert_eq!(select_prime_power(30, 20.0).unwrap(), (2, 20));
        assert_eq!(select_prime_power(4, 0.0).unwrap(), (2, 0));
        assert!(select_prime_power(2, 100.0).is_err());
    }

    #[test]
    fn rate_infeasible_reports_parameters() {
        let err = build_nested_code(1, 1, 50.0, 100.0, 0).unwrap_err();
        assert!(matches!(err, Error::RateInfeasible { dimension: 2, .. }));
    }

    #[test]
    fn zero_rate_has_single_codeword() {
        let code = build_nested_code(1, 1, 0.0, 10.0, 9).unwrap();
        assert_eq!(code.message_dim(), 0);
        let x = code.encode(&[]).unwrap();
        let (expected, _) = code.shaping_lattice().reduce(code.dither()).unwrap();
        assert!((x - expected).norm() < 1e-12);
    }

    #[test]
    fn zero_message_without_dither_is_origin() {
        let code = build_nested_code(1, 2, 2.0, 100.0, 1).unwrap();
        let mut rec = code.to_record();
        rec.u0 = vec![0.0; code.dimension()];
        let plain = NestedLastCode::from_record(&rec).unwrap();
        let x = plain.encode(&vec![0; plain.message_dim()]).unwrap();
        assert_eq!(x.norm(), 0.0);
    }

    #[test]
    fn generators_are_lower_triangular_and_self_similar() {
        let code = build_nested_code(2, 3, 8.0, 100.0, 3).unwrap();
        let g = code.coding_lattice().generator();
        let gs = code.shaping_lattice().generator();
        for i in 0..g.nrows() {
            for j in (i + 1)..g.ncols() {
                assert_eq!(g[(i, j)], 0.0);
            }
        }
        let diff = (g * code.self_similarity_ratio() - gs).amax();
        assert!(diff <= 1e-12 * gs.amax());
        let vol = code.mod_p_lattice().fundamental_volume();
        assert!((vol - 1.0).abs() < 1e-12);
        let ratio = code.shaping_lattice().fundamental_volume() / code.coding_lattice().fundamental_volume();
        let m = code.dimension() as i32;
        assert!((ratio / (code.prime() as f64).powi(m) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn toy_code_words_are_distinct_and_in_voronoi_region() {
        // m = 2 with p = 2, k = 1.
        let code = build_nested_code(1, 1, 1.0, 10.0, 17).unwrap();
        assert_eq!((code.prime(), code.message_dim()), (2, 1));
        let gs = code.shaping_lattice().generator().clone();
        let words: Vec<DVector<f64>> = (0..2).map(|u| code.encode(&[u]).unwrap()).collect();
        assert!((&words[0] - &words[1]).norm() > 1e-9);
        for x in &words {
            assert_eq!(brute_force_cvp(&gs, x, 3).unwrap(), vec![0, 0]);
        }
    }

    #[test]
    fn codebook_is_injective_and_decodable() {
        let code = build_nested_code(1, 2, 2.0, 100.0, 5).unwrap();
        let p = code.prime();
        let k = code.message_dim();
        assert!(p.pow(k as u32) <= 256);
        let mut msg = vec![0u64; k];
        let mut words = Vec::new();
        loop {
            let (x, z) = code.encode_with_coordinates(&msg).unwrap();
            let rebuilt = mul_int(code.coding_lattice().generator(), &z) + code.dither();
            assert!((&rebuilt - &x).norm() < 1e-9);
            assert_eq!(code.decode_message(&z), Some(msg.clone()));
            words.push(x);
            if !increment(&mut msg, p) {
                break;
            }
        }
        for i in 0..words.len() {
            for j in (i + 1)..words.len() {
                assert!((&words[i] - &words[j]).norm() > 1e-9);
            }
        }
    }

    #[test]
    fn average_energy_respects_power_constraint() {
        for (m_ant, t, r) in [(2, 3, 4.0), (2, 3, 8.0), (3, 5, 4.0)] {
            let code = build_nested_code(m_ant, t, r, 100.0, 7).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            let n = 4000;
            let mut e = 0.0;
            for _ in 0..n {
                let msg = code.random_message(&mut rng);
                e += code.encode(&msg).unwrap().norm_squared();
            }
            let avg = e / n as f64;
            let mt = (m_ant * t) as f64;
            assert!(avg <= mt && avg >= 0.85 * mt, "avg energy {avg} vs MT {mt}");
        }
    }

    #[test]
    fn same_seed_same_code_and_json_roundtrip() {
        let a = build_nested_code(2, 2, 6.0, 50.0, 42).unwrap();
        let b = build_nested_code(2, 2, 6.0, 50.0, 42).unwrap();
        assert_eq!(a.to_record(), b.to_record());
        let c = NestedLastCode::from_json(&a.to_json().unwrap()).unwrap();
        assert_eq!(c.to_record(), a.to_record());
        assert_eq!(c.coding_lattice().generator(), a.coding_lattice().generator());
        let msg = vec![1u64; a.message_dim()];
        assert_eq!(a.encode(&msg).unwrap(), c.encode(&msg).unwrap());
    }

    #[test]
    fn rejects_bad_messages() {
        let code = build_nested_code(1, 1, 2.0, 10.0, 0).unwrap();
        assert!(code.encode(&[0]).is_err());
        assert!(code.encode(&vec![code.prime(); code.message_dim()]).is_err());
    }
}
