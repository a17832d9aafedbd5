//! Acceptance suite: one PASS/FAIL line per criterion, exit status nonzero
//! if any criterion fails. Tolerances and trial counts are pinned below.

use std::time::{Duration, Instant};

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use last_sphere::channel::{realify, sample_channel};
use last_sphere::complexity::{cutoff_multiplexing_gain, dmt_exponent, l_exponent, partial_det_factorization_check};
use last_sphere::decoders::{
    babai_nearest_plane, brute_force_cvp, layer_count_enumeration, sphere_decode, sufficient_box_bound,
    DecodeStatus,
};
use last_sphere::harness::{run_sweep, DecoderKind, ExperimentConfig, RateMode, SweepResult, TimeoutPolicy};
use last_sphere::linalg::{qr_positive, squared_distance};
use last_sphere::mmse_dfe::augmented_qr;

const CVP_INSTANCES: usize = 1002;
const LAYER_INSTANCES: usize = 240;
const DET_INSTANCES: usize = 1000;
const DET_REL_TOL: f64 = 1e-8;
const MC_TRIALS: usize = 10_000;
/// Node budgets bounding the cost of rare huge searches: for the low-SNR
/// context points of criterion 5 and for the rate comparison of criterion 6,
/// which reports how often the budget was hit.
const FIG1_CAP: u64 = 1_000_000;
const FIG2_CAP: u64 = 100_000;
const TAIL_FACTOR: f64 = 3.0;
const ERASURE_FACTOR: f64 = 2.0;
const VOLUME_LATTICES: usize = 50;
const VOLUME_MIN_COUNT: u64 = 100;
const VOLUME_BAND: (f64, f64) = (0.5, 2.0);
const SEQUENTIAL_BIAS: f64 = 1.0;
const ZETA: f64 = 1.0;

struct Verdict {
    passed: bool,
    detail: String,
}

fn report(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = f();
    let elapsed = start.elapsed();
    let passed = v.passed && elapsed <= budget;
    println!(
        "{} criterion {id} ({name}): {} [{:.1}s, budget {}s]",
        if passed { "PASS" } else { "FAIL" },
        v.detail,
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    passed
}

/// Random generator with i.i.d. uniform entries, redrawn until its condition
/// number is below 1/0.15 so the exhaustive oracle's box stays small.
fn random_generator(rng: &mut ChaCha8Rng, m: usize) -> DMatrix<f64> {
    loop {
        let g = DMatrix::from_fn(m, m, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let sv = g.singular_values();
        if sv.min() > 0.15 * sv.max() {
            return g;
        }
    }
}

fn criterion_1() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut agree = 0;
    for i in 0..CVP_INSTANCES {
        let m = [2, 4, 6][i % 3];
        let g = random_generator(&mut rng, m);
        let y = DVector::from_fn(m, |_, _| rng.random::<f64>() * 8.0 - 4.0);
        let (q, r) = qr_positive(&g);
        let yq = q.transpose() * &y;
        let babai = babai_nearest_plane(&r, &yq).unwrap();
        let radius = squared_distance(&r, &yq, &babai).sqrt() * (1.0 + 0.5 * rng.random::<f64>()) + 1e-9;
        let sd = sphere_decode(&r, &yq, radius, None).unwrap();
        let bf = brute_force_cvp(&g, &y, sufficient_box_bound(&g, &y).unwrap()).unwrap();
        if sd.status == DecodeStatus::Found && sd.z_hat.as_deref() == Some(bf.as_slice()) {
            agree += 1;
        }
    }
    Verdict {
        passed: agree == CVP_INSTANCES,
        detail: format!("sphere decoder = brute-force CVP on {agree}/{CVP_INSTANCES} instances (m in {{2,4,6}})"),
    }
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut exact = 0;
    for i in 0..LAYER_INSTANCES {
        let m = 2 + i % 5;
        let (_, r) = qr_positive(&random_generator(&mut rng, m));
        let y = DVector::from_fn(m, |_, _| rng.random::<f64>() * 4.0 - 2.0);
        let radius = 0.5 + 2.0 * rng.random::<f64>();
        let sd = sphere_decode(&r, &y, radius, None).unwrap();
        let ok = (1..=m).all(|k| layer_count_enumeration(&r, &y, radius, k).unwrap() == sd.layer_counts[k - 1])
            && sd.total_count == sd.layer_counts.iter().sum::<u64>();
        exact += ok as usize;
    }
    Verdict {
        passed: exact == LAYER_INSTANCES,
        detail: format!("layer counts exact on {exact}/{LAYER_INSTANCES} instances (m <= 6)"),
    }
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst: f64 = 0.0;
    for i in 0..DET_INSTANCES {
        let (m, n, t) = (1 + i % 3, 1 + (i / 3) % 3, 1 + (i / 9) % 5);
        let rho = 10f64.powf(rng.random::<f64>() * 4.0);
        let ch = sample_channel(&mut rng, m, n, t, rho).unwrap();
        let b = augmented_qr(&realify(&ch)).backward;
        // det(BᵀB) = Π B_ii² for triangular B.
        let log_lhs: f64 = b.diagonal().iter().map(|d| 2.0 * d.ln()).sum();
        let h = ch.matrix();
        let inner = DMatrix::<Complex<f64>>::identity(m, m) + h.adjoint() * h * Complex::new(rho, 0.0);
        let log_rhs = 2.0 * t as f64 * inner.lu().determinant().re.ln();
        worst = worst.max(((log_lhs - log_rhs).exp() - 1.0).abs());
    }
    Verdict {
        passed: worst <= DET_REL_TOL,
        detail: format!("det(BᵀB) vs det(I+ρHᴴH)^(2T) max rel. error {worst:.2e} over {DET_INSTANCES} channels (tol {DET_REL_TOL:e})"),
    }
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst: f64 = 0.0;
    for i in 0..DET_INSTANCES {
        let m = 2 + i % 7;
        let a = DMatrix::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal));
        let g = DMatrix::from_fn(m, m, |r, c| if c <= r { rng.sample::<f64, _>(StandardNormal) } else { 0.0 });
        for k in 1..=m {
            let off = m - k;
            let (lhs, rhs) = partial_det_factorization_check(&a, &g, k).unwrap();
            // Independent oracle: triangular block determinant is the
            // product of its diagonal.
            let diag: f64 = (off..m).map(|j| g[(j, j)]).product();
            let oracle_rhs = a.view((off, off), (k, k)).into_owned().lu().determinant() * diag;
            let rel = ((lhs - rhs) / rhs).abs().max(((rhs - oracle_rhs) / oracle_rhs).abs());
            worst = worst.max(rel);
        }
    }
    Verdict {
        passed: worst <= DET_REL_TOL,
        detail: format!("det[(AG)_kk] vs det(A_kk)det(G_kk) max rel. error {worst:.2e} over {DET_INSTANCES} pairs, all k (tol {DET_REL_TOL:e})"),
    }
}

fn fixed_rate_config(antennas: usize, t: usize, rate: f64, grid: Vec<f64>, decoder: DecoderKind, cap: u64, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        antennas,
        receive: antennas,
        blocklength: t,
        rate_mode: RateMode::FixedRate { rate_bpcu: rate },
        snr_grid_db: grid,
        trials_per_point: MC_TRIALS,
        seed,
        decoder,
        zeta: ZETA,
        timeout_policy: TimeoutPolicy::Fixed { limit: cap },
        sequential_bias: SEQUENTIAL_BIAS,
        noiseless: false,
    }
}

fn fig_grid() -> Vec<f64> {
    (0..=8).map(|i| 10.0 + 3.0 * i as f64).collect()
}

fn averages(s: &SweepResult) -> String {
    s.points.iter().map(|p| format!("{:.1}", p.avg_complexity)).collect::<Vec<_>>().join(", ")
}

fn criterion_5() -> Verdict {
    // Points below 20 dB only give context and run under a node budget; the
    // checked points at and above 20 dB run without any budget. Trial
    // streams do not depend on the SNR index, so both sweeps see the same
    // channels, messages and noise.
    let (low, high): (Vec<f64>, Vec<f64>) = fig_grid().into_iter().partition(|&s| s < 20.0);
    let mut passed = true;
    let mut detail = Vec::new();
    for t in [3, 4, 5] {
        let context = run_sweep(&fixed_rate_config(2, t, 4.0, low.clone(), DecoderKind::Sphere, FIG1_CAP, 2024)).unwrap();
        let checked = run_sweep(&ExperimentConfig {
            timeout_policy: TimeoutPolicy::None,
            ..fixed_rate_config(2, t, 4.0, high.clone(), DecoderKind::Sphere, FIG1_CAP, 2024)
        })
        .unwrap();
        let monotone = checked.points.windows(2).all(|w| w[1].avg_complexity <= w[0].avg_complexity);
        let top = checked.points.last().unwrap().avg_complexity;
        let ok = monotone && top <= 2.0 * (4 * t) as f64;
        passed &= ok;
        detail.push(format!(
            "T={t}: avg C <20dB (cap {FIG1_CAP}) [{}], >=20dB [{}] nonincreasing={monotone}, top {top:.2} <= {}",
            averages(&context),
            averages(&checked),
            8 * t
        ));
    }
    Verdict { passed, detail: detail.join("; ") }
}

fn criterion_6() -> Verdict {
    let sweeps: Vec<SweepResult> = [4.0, 8.0, 12.0]
        .iter()
        .map(|&rate| run_sweep(&fixed_rate_config(2, 3, rate, fig_grid(), DecoderKind::Sphere, FIG2_CAP, 2024)).unwrap())
        .collect();
    let mut passed = true;
    for i in 0..sweeps[0].points.len() {
        for w in sweeps.windows(2) {
            passed &= w[1].points[i].avg_complexity >= w[0].points[i].avg_complexity;
        }
    }
    Verdict {
        passed,
        detail: format!(
            "avg C nondecreasing in R at every SNR: R=4 [{}]; R=8 [{}]; R=12 [{}] (cap {FIG2_CAP}; budget-hit rates {})",
            averages(&sweeps[0]),
            averages(&sweeps[1]),
            averages(&sweeps[2]),
            sweeps
                .iter()
                .map(|s| s.points.iter().map(|p| format!("{:.3}", p.timeout_rate)).collect::<Vec<_>>().join("/"))
                .collect::<Vec<_>>()
                .join(" | ")
        ),
    }
}

fn criterion_7() -> Verdict {
    let base = ExperimentConfig {
        antennas: 2,
        receive: 2,
        blocklength: 3,
        rate_mode: RateMode::FixedGain { r: 1.0 },
        snr_grid_db: vec![20.0, 25.0, 30.0],
        trials_per_point: MC_TRIALS,
        seed: 31,
        decoder: DecoderKind::Sphere,
        zeta: ZETA,
        timeout_policy: TimeoutPolicy::L0Formula,
        sequential_bias: SEQUENTIAL_BIAS,
        noiseless: false,
    };
    let with = run_sweep(&base).unwrap();
    let without = run_sweep(&ExperimentConfig { timeout_policy: TimeoutPolicy::None, ..base }).unwrap();
    let mut passed = true;
    let mut detail = Vec::new();
    for (a, b) in with.points.iter().zip(&without.points) {
        let tail_ok = a.timeout_rate <= TAIL_FACTOR * a.outage_rate;
        let err_ok = a.error_rate <= ERASURE_FACTOR * b.error_rate;
        passed &= tail_ok && err_ok;
        detail.push(format!(
            "{} dB: Pr(C>=L0)={:.4} outage={:.4} err(L0)={:.4} err(none)={:.4}",
            a.snr_db, a.timeout_rate, a.outage_rate, a.error_rate, b.error_rate
        ));
    }
    Verdict { passed, detail: detail.join("; ") }
}

fn criterion_8() -> Verdict {
    let checks = [
        cutoff_multiplexing_gain(2, 2, 3) == 0,
        cutoff_multiplexing_gain(3, 3, 5) == 1,
        l_exponent(2, 2, 3, 0.0).unwrap() == -4.0,
        l_exponent(3, 3, 5, 0.0).unwrap() == -9.0,
        dmt_exponent(2, 2, 0.0).unwrap() == 4.0,
        dmt_exponent(3, 3, 1.0).unwrap() == 4.0,
    ];
    let ok = checks.iter().filter(|&&c| c).count();
    Verdict {
        passed: ok == checks.len(),
        detail: format!("{ok}/{} closed-form values exact (r0(2,2,3)=0, r0(3,3,5)=1, l(0)=-MN, d(0)=MN, d(1)=4 for 3x3)", checks.len()),
    }
}

fn ball_volume(k: usize, radius: f64) -> f64 {
    let mut v = if k % 2 == 0 { 1.0 } else { 2.0 * radius };
    let mut j = if k % 2 == 0 { 2 } else { 3 };
    while j <= k {
        v *= 2.0 * std::f64::consts::PI * radius * radius / j as f64;
        j += 2;
    }
    v
}

fn criterion_9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let (mut checked, mut inside) = (0usize, 0usize);
    let (mut worst_lo, mut worst_hi) = (f64::INFINITY, 0.0f64);
    let mut dev_small = (0.0, 0usize);
    let mut dev_large = (0.0, 0usize);
    for i in 0..VOLUME_LATTICES {
        let m = 2 + i % 5;
        let (_, r) = qr_positive(&random_generator(&mut rng, m));
        let y = DVector::from_fn(m, |_, _| rng.random::<f64>() * 4.0 - 2.0);
        let det: f64 = r.diagonal().iter().product();
        // Radii with expected full-dimensional counts from 50 to 5000.
        for target in [50.0, 150.0, 500.0, 1500.0, 5000.0] {
            let radius = (target * det / ball_volume(m, 1.0)).powf(1.0 / m as f64);
            let sd = sphere_decode(&r, &y, radius, None).unwrap();
            let mut det_k = 1.0;
            for k in 1..=m {
                det_k *= r[(m - k, m - k)];
                let c = sd.layer_counts[k - 1];
                if c < VOLUME_MIN_COUNT {
                    continue;
                }
                let ratio = c as f64 / (ball_volume(k, radius) / det_k);
                checked += 1;
                inside += (VOLUME_BAND.0..=VOLUME_BAND.1).contains(&ratio) as usize;
                worst_lo = worst_lo.min(ratio);
                worst_hi = worst_hi.max(ratio);
                let bucket = if c < 1000 { &mut dev_small } else { &mut dev_large };
                bucket.0 += (ratio - 1.0).abs();
                bucket.1 += 1;
            }
        }
    }
    let mean = |b: (f64, usize)| if b.1 == 0 { 0.0 } else { b.0 / b.1 as f64 };
    Verdict {
        passed: checked > 0 && inside == checked,
        detail: format!(
            "{inside}/{checked} layer counts with C_k>={VOLUME_MIN_COUNT} within [{}, {}] (range {worst_lo:.3}..{worst_hi:.3}); mean |ratio-1| {:.3} for C_k<1000, {:.3} for C_k>=1000",
            VOLUME_BAND.0,
            VOLUME_BAND.1,
            mean(dev_small),
            mean(dev_large)
        ),
    }
}

fn criterion_10() -> Verdict {
    let grid = vec![20.0, 25.0, 30.0];
    // Both decoders run without a node budget: a budget would turn rare,
    // very long sphere searches into errors and distort the comparison.
    let uncapped = |decoder| ExperimentConfig {
        timeout_policy: TimeoutPolicy::None,
        ..fixed_rate_config(3, 5, 4.0, grid.clone(), decoder, u64::MAX, 77)
    };
    let sphere = run_sweep(&uncapped(DecoderKind::Sphere)).unwrap();
    let seq = run_sweep(&uncapped(DecoderKind::Sequential)).unwrap();
    let mut passed = true;
    let mut detail = Vec::new();
    for (s, q) in sphere.points.iter().zip(&seq.points) {
        passed &= q.avg_complexity < s.avg_complexity && q.error_rate >= s.error_rate;
        detail.push(format!(
            "{} dB: C sphere {:.1} vs seq {:.1}, err sphere {:.4} vs seq {:.4}",
            s.snr_db, s.avg_complexity, q.avg_complexity, s.error_rate, q.error_rate
        ));
    }
    Verdict { passed, detail: detail.join("; ") }
}

fn main() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let criteria: [(u32, &str, Duration, fn() -> Verdict); 10] = [
        (1, "CVP oracle equivalence", min(1), criterion_1),
        (2, "instrumentation exactness", min(1), criterion_2),
        (3, "MMSE-DFE determinant identity", min(1), criterion_3),
        (4, "partial determinant factorization", min(1), criterion_4),
        (5, "average complexity decays with SNR", min(30), criterion_5),
        (6, "average complexity grows with rate", min(30), criterion_6),
        (7, "time-out tail and erasure bound", min(30), criterion_7),
        (8, "closed-form exponent table", Duration::from_secs(1), criterion_8),
        (9, "volume heuristic for layer counts", min(5), criterion_9),
        (10, "sphere vs sequential tradeoff", min(60), criterion_10),
    ];
    // Optional positional arguments select a subset of criteria by number;
    // flags forwarded by the test runner are ignored.
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let results: Vec<bool> = criteria
        .into_iter()
        .filter(|(id, ..)| selected.is_empty() || selected.contains(id))
        .map(|(id, name, budget, run)| report(id, name, budget, run))
        .collect();
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
