//! Average sphere-decoding complexity versus SNR for a 2x2 system with
//! T = 3 at 4, 8 and 12 bpcu: higher rates cost more computation.
//!
//! Usage: `cargo run --release --example rate_complexity [trials]`

use std::time::Instant;

use last_sphere::harness::{run_sweep, DecoderKind, ExperimentConfig, RateMode, TimeoutPolicy};

/// Node budget keeping low-SNR points tractable; it only binds where the
/// search would otherwise run far longer than the high-SNR regime of interest.
const SAFETY_CAP: u64 = 20_000;

fn main() -> last_sphere::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    println!("R,snr_db,avg_C,err_rate,outage_rate");
    for rate in [4.0, 8.0, 12.0] {
        let cfg = ExperimentConfig {
            antennas: 2,
            receive: 2,
            blocklength: 3,
            rate_mode: RateMode::FixedRate { rate_bpcu: rate },
            snr_grid_db: (0..=8).map(|i| 10.0 + 3.0 * i as f64).collect(),
            trials_per_point: trials,
            seed: 2024,
            decoder: DecoderKind::Sphere,
            zeta: 1.0,
            timeout_policy: TimeoutPolicy::Fixed { limit: SAFETY_CAP },
            sequential_bias: 1.0,
            noiseless: false,
        };
        let start = Instant::now();
        let sweep = run_sweep(&cfg)?;
        for p in &sweep.points {
            println!(
                "{rate},{},{:.2},{:.4},{:.4}",
                p.snr_db, p.avg_complexity, p.error_rate, p.outage_rate
            );
        }
        eprintln!("R={rate}: {:.1?}", start.elapsed());
    }
    Ok(())
}
