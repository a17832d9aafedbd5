//! Seeded Monte-Carlo sweeps over SNR.
//!
//! Every trial owns a ChaCha stream keyed by the master seed and selected by
//! the trial index, so a sweep gives identical results for any thread count
//! or execution order. The same stream is reused at every SNR point (common
//! random numbers): trial `i` sees the same channel matrix, message and
//! noise pattern at each SNR, which makes SNR trends far less noisy.

use std::fmt::Write as _;
use std::io::Write;

use nalgebra::DVector;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{is_outage, realify, sample_channel, transmit, transmit_noiseless};
use crate::complexity::compute_l0;
use crate::decoders::{
    babai_nearest_plane, default_radius, lll_reduce, sphere_decode, stack_sequential_decode, DecodeOutcome,
    DecodeStatus,
};
use crate::error::{invalid, Result};
use crate::lattice::{build_nested_code, NestedLastCode};
use crate::linalg::qr_positive;
use crate::mmse_dfe::{apply_forward, augmented_qr};

/// Number of points of the geometric tail grid.
pub const TAIL_GRID_POINTS: usize = 64;
/// Lovász parameter of the lattice-reduction-aided decoder.
pub const LLL_DELTA: f64 = 0.75;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// How the transmission rate is chosen at each SNR point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RateMode {
    /// Constant rate in bits per channel use.
    FixedRate { rate_bpcu: f64 },
    /// Rate growing with SNR: `R = r log2 rho`.
    FixedGain { r: f64 },
}

impl RateMode {
    pub fn rate_at(&self, rho: f64) -> f64 {
        match *self {
            RateMode::FixedRate { rate_bpcu } => rate_bpcu,
            RateMode::FixedGain { r } => r * rho.log2(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    Sphere,
    Sequential,
    LrAided,
}

impl DecoderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DecoderKind::Sphere => "sphere",
            DecoderKind::Sequential => "sequential",
            DecoderKind::LrAided => "lr-aided",
        }
    }
}

/// Node budget applied to the search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TimeoutPolicy {
    None,
    /// Per-channel threshold `L0` evaluated on the triangular factor of the
    /// effective generator.
    L0Formula,
    Fixed { limit: u64 },
}

/// One Monte-Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(rename = "M")]
    pub antennas: usize,
    #[serde(rename = "N")]
    pub receive: usize,
    #[serde(rename = "T")]
    pub blocklength: usize,
    pub rate_mode: RateMode,
    pub snr_grid_db: Vec<f64>,
    pub trials_per_point: usize,
    pub seed: u64,
    pub decoder: DecoderKind,
    pub zeta: f64,
    pub timeout_policy: TimeoutPolicy,
    pub sequential_bias: f64,
    /// Drop the channel noise (debugging aid).
    #[serde(default)]
    pub noiseless: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.antennas == 0 || self.receive == 0 || self.blocklength == 0 {
            return Err(invalid("M, N and T must be at least 1"));
        }
        if self.trials_per_point == 0 {
            return Err(invalid("trials_per_point must be at least 1"));
        }
        if self.snr_grid_db.is_empty() {
            return Err(invalid("snr grid is empty"));
        }
        if !self.snr_grid_db.iter().all(|s| s.is_finite()) || self.snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("snr grid must be finite and strictly increasing"));
        }
        if !(self.zeta > 0.0) || !self.zeta.is_finite() {
            return Err(invalid(format!("zeta must be positive, got {}", self.zeta)));
        }
        if !(self.sequential_bias > 0.0) || !self.sequential_bias.is_finite() {
            return Err(invalid(format!("sequential bias must be positive, got {}", self.sequential_bias)));
        }
        match self.rate_mode {
            RateMode::FixedRate { rate_bpcu } if !(rate_bpcu >= 0.0) || !rate_bpcu.is_finite() => {
                return Err(invalid("rate must be nonnegative"));
            }
            RateMode::FixedGain { r } if !(r >= 0.0) || r > self.antennas.min(self.receive) as f64 => {
                return Err(invalid("multiplexing gain must lie in [0, min(M, N)]"));
            }
            _ => {}
        }
        if let TimeoutPolicy::Fixed { limit: 0 } = self.timeout_policy {
            return Err(invalid("fixed timeout must be positive"));
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        2 * self.antennas * self.blocklength
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Converts dB to the linear normalized SNR.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Outcome of a single trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub snr_db: f64,
    pub trial_index: u64,
    pub outage: bool,
    pub decoded_ok: bool,
    pub status: DecodeStatus,
    pub total_count: u64,
    /// Node budget used, `None` when unlimited.
    pub timeout_used: Option<u64>,
    /// ChaCha stream id of the trial under the master seed.
    pub channel_seed: u64,
}

/// Aggregates at one SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub snr_db: f64,
    pub rate_bpcu: f64,
    pub trials: usize,
    pub avg_complexity: f64,
    pub error_rate: f64,
    pub outage_rate: f64,
    pub timeout_rate: f64,
    pub records: Vec<TrialRecord>,
}

impl PointResult {
    pub fn from_records(snr_db: f64, rate_bpcu: f64, records: Vec<TrialRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(invalid("no trial records to aggregate"));
        }
        let n = records.len() as f64;
        let frac = |f: &dyn Fn(&TrialRecord) -> bool| records.iter().filter(|r| f(r)).count() as f64 / n;
        Ok(Self {
            snr_db,
            rate_bpcu,
            trials: records.len(),
            avg_complexity: records.iter().map(|r| r.total_count as f64).sum::<f64>() / n,
            error_rate: frac(&|r| !r.decoded_ok),
            outage_rate: frac(&|r| r.outage),
            timeout_rate: frac(&|r| r.status == DecodeStatus::TimedOut),
            records,
        })
    }

    /// Sample standard error of the average complexity.
    pub fn complexity_std_error(&self) -> f64 {
        let n = self.records.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let var = self
            .records
            .iter()
            .map(|r| (r.total_count as f64 - self.avg_complexity).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        (var / n).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub points: Vec<PointResult>,
}

/// An experiment with its codebooks built, ready to run trials.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    codes: Vec<NestedLastCode>,
}

impl Experiment {
    /// Validates the configuration and builds one codebook per SNR point.
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let code_seed = ChaCha8Rng::seed_from_u64(config.seed).next_u64();
        let mut codes: Vec<NestedLastCode> = Vec::with_capacity(config.snr_grid_db.len());
        for &db in &config.snr_grid_db {
            let rho = db_to_linear(db);
            let rate = config.rate_mode.rate_at(rho);
            // Codebooks depend on the SNR only through the rate.
            let code = match codes.last() {
                Some(prev) if prev.rate_bpcu() == rate => prev.with_rho(rho)?,
                _ => build_nested_code(config.antennas, config.blocklength, rate, rho, code_seed)?,
            };
            codes.push(code);
        }
        Ok(Self { config, codes })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    /// Codebook used at SNR point `snr_index`.
    pub fn code(&self, snr_index: usize) -> &NestedLastCode {
        &self.codes[snr_index]
    }

    /// Runs trial `trial_index` at SNR point `snr_index`.
    pub fn run_trial(&self, snr_index: usize, trial_index: u64) -> Result<TrialRecord> {
        let cfg = &self.config;
        let code = self
            .codes
            .get(snr_index)
            .ok_or_else(|| invalid(format!("snr index {snr_index} out of range")))?;
        let snr_db = cfg.snr_grid_db[snr_index];
        let rho = code.rho();
        let stream = trial_index
            .checked_add(1)
            .ok_or_else(|| invalid("trial index overflows the stream id"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream);

        let ch = sample_channel(&mut rng, cfg.antennas, cfg.receive, cfg.blocklength, rho)?;
        let message = code.random_message(&mut rng);
        let x = code.encode(&message)?;
        let y = if cfg.noiseless {
            transmit_noiseless(&x, &ch)?
        } else {
            transmit(&x, &ch, &mut rng)?
        };
        let outage = is_outage(&ch, code.rate_bpcu());

        let filters = augmented_qr(&realify(&ch));
        let y_prime = apply_forward(&filters, &y)? - &filters.backward * code.dither();
        let effective = &filters.backward * code.coding_lattice().generator();
        let radius = default_radius(cfg.antennas, cfg.blocklength, rho, cfg.zeta);

        let (outcome, timeout_used) = match cfg.decoder {
            DecoderKind::LrAided => (lr_aided_decode(&effective, &y_prime)?, None),
            kind => {
                let (q, r) = qr_positive(&effective);
                let y_dec = q.transpose() * &y_prime;
                let timeout = match cfg.timeout_policy {
                    TimeoutPolicy::None => None,
                    TimeoutPolicy::Fixed { limit } => Some(limit),
                    TimeoutPolicy::L0Formula => l0_budget(compute_l0(&r, radius)?),
                };
                let outcome = match kind {
                    DecoderKind::Sphere => sphere_decode(&r, &y_dec, radius, timeout)?,
                    _ => stack_sequential_decode(&r, &y_dec, cfg.sequential_bias, timeout)?,
                };
                (outcome, timeout)
            }
        };

        let decoded_ok = outcome.status == DecodeStatus::Found
            && outcome
                .z_hat
                .as_deref()
                .and_then(|z| code.decode_message(z))
                .is_some_and(|u| u == message);
        Ok(TrialRecord {
            snr_db,
            trial_index,
            outage,
            decoded_ok,
            status: outcome.status,
            total_count: outcome.total_count,
            timeout_used,
            channel_seed: stream,
        })
    }

    /// All trials at one SNR point, in trial order.
    pub fn run_point(&self, snr_index: usize) -> Result<PointResult> {
        let records = (0..self.config.trials_per_point as u64)
            .into_par_iter()
            .map(|t| self.run_trial(snr_index, t))
            .collect::<Result<Vec<_>>>()?;
        PointResult::from_records(
            self.config.snr_grid_db[snr_index],
            self.codes[snr_index].rate_bpcu(),
            records,
        )
    }

    pub fn run_sweep(&self) -> Result<SweepResult> {
        let points = (0..self.codes.len())
            .map(|i| self.run_point(i))
            .collect::<Result<Vec<_>>>()?;
        Ok(SweepResult {
            config: self.config.clone(),
            points,
        })
    }
}

/// Rounds the real threshold up to an integer budget; thresholds beyond
/// `u64` range cannot be reached and mean no budget.
fn l0_budget(l0: f64) -> Option<u64> {
    if l0.is_finite() && l0 < 9.0e18 {
        Some(l0.ceil() as u64)
    } else {
        None
    }
}

/// Lattice-reduction-aided decoding: LLL-reduce the effective generator,
/// take the Babai point in the reduced basis and map it back. Reported as a
/// fixed-cost decoder with `C = m` and no per-layer counts.
pub fn lr_aided_decode(effective: &nalgebra::DMatrix<f64>, y_prime: &DVector<f64>) -> Result<DecodeOutcome> {
    let m = effective.ncols();
    let lll = lll_reduce(effective, LLL_DELTA)?;
    let (q, r) = qr_positive(&lll.reduced);
    let w = babai_nearest_plane(&r, &(q.transpose() * y_prime))?;
    let z: Vec<i64> = (0..m)
        .map(|i| (0..m).map(|j| lll.transform[(i, j)] * w[j]).sum())
        .collect();
    Ok(DecodeOutcome {
        z_hat: Some(z),
        layer_counts: vec![0; m],
        total_count: m as u64,
        status: DecodeStatus::Found,
    })
}

/// Runs a sweep on a dedicated pool with `workers` threads.
pub fn run_sweep_with_workers(config: &ExperimentConfig, workers: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| crate::Error::Internal(e.to_string()))?;
    let exp = Experiment::new(config.clone())?;
    pool.install(|| exp.run_sweep())
}

/// Runs a sweep on the global pool.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    Experiment::new(config.clone())?.run_sweep()
}

/// Fraction of records with `C >= L` for each `L` in `grid`.
pub fn tail_distribution(records: &[TrialRecord], grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if records.is_empty() {
        return Err(invalid("tail distribution needs at least one record"));
    }
    let mut counts: Vec<u64> = records.iter().map(|r| r.total_count).collect();
    counts.sort_unstable();
    let n = counts.len() as f64;
    Ok(grid
        .iter()
        .map(|&l| {
            let below = counts.partition_point(|&c| (c as f64) < l);
            (l, (counts.len() - below) as f64 / n)
        })
        .collect())
}

/// Geometric grid of `points` values from `lo` to `hi`, rounded up to
/// integers and deduplicated.
pub fn geometric_grid(lo: u64, hi: u64, points: usize) -> Vec<f64> {
    let lo = lo.max(1);
    if hi <= lo || points < 2 {
        return vec![lo as f64];
    }
    let ratio = (hi as f64 / lo as f64).ln() / (points - 1) as f64;
    let mut out: Vec<f64> = (0..points)
        .map(|i| ((lo as f64).ln() + ratio * i as f64).exp().round().clamp(lo as f64, hi as f64))
        .collect();
    out.dedup();
    out
}

/// Tail grid for one SNR point: geometric from `m` to the largest `C`.
pub fn tail_grid(records: &[TrialRecord], m: usize) -> Vec<f64> {
    let max_c = records.iter().map(|r| r.total_count).max().unwrap_or(0);
    geometric_grid(m as u64, max_c.max(m as u64), TAIL_GRID_POINTS)
}

/// `snr_db,decoder,trials,avg_C,err_rate,outage_rate,timeout_rate`.
pub fn results_csv(sweep: &SweepResult) -> String {
    let mut out = String::from("snr_db,decoder,trials,avg_C,err_rate,outage_rate,timeout_rate\n");
    for p in &sweep.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(p.snr_db),
            sweep.config.decoder.as_str(),
            p.trials,
            fmt_f64(p.avg_complexity),
            fmt_f64(p.error_rate),
            fmt_f64(p.outage_rate),
            fmt_f64(p.timeout_rate)
        );
    }
    out
}

/// `snr_db,L,prob` over each point's geometric tail grid.
pub fn tail_csv(sweep: &SweepResult) -> Result<String> {
    let m = sweep.config.dimension();
    let mut out = String::from("snr_db,L,prob\n");
    for p in &sweep.points {
        for (l, prob) in tail_distribution(&p.records, &tail_grid(&p.records, m))? {
            let _ = writeln!(out, "{},{},{}", fmt_f64(p.snr_db), fmt_f64(l), fmt_f64(prob));
        }
    }
    Ok(out)
}

pub fn write_string(path: &std::path::Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}
