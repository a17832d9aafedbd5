//! Error rate of the sphere, stack sequential and lattice-reduction-aided
//! MMSE-DFE decoders on the same channels and messages.
//!
//! Usage: `cargo run --release --example decoder_comparison [trials] [M] [T] [R]`
//!
//! Defaults to a 2x2 system with T = 3 at 8 bpcu, which runs in seconds;
//! larger systems (e.g. `3 5 12`) need a long run.

use last_sphere::harness::{run_sweep, DecoderKind, ExperimentConfig, RateMode, TimeoutPolicy};

/// Node budget for the tree searches, keeping rare huge searches bounded.
const SAFETY_CAP: u64 = 1_000_000;

fn main() -> last_sphere::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(default);
    let trials = arg(0, 2000.0) as usize;
    let (m, t, rate) = (arg(1, 2.0) as usize, arg(2, 3.0) as usize, arg(3, 8.0));
    println!("decoder,snr_db,err_rate,outage_rate,avg_C");
    for decoder in [DecoderKind::Sphere, DecoderKind::Sequential, DecoderKind::LrAided] {
        let cfg = ExperimentConfig {
            antennas: m,
            receive: m,
            blocklength: t,
            rate_mode: RateMode::FixedRate { rate_bpcu: rate },
            snr_grid_db: vec![16.0, 19.0, 22.0, 25.0, 28.0],
            trials_per_point: trials,
            seed: 4,
            decoder,
            zeta: 1.0,
            timeout_policy: TimeoutPolicy::Fixed { limit: SAFETY_CAP },
            sequential_bias: 1.0,
            noiseless: false,
        };
        for p in run_sweep(&cfg)?.points {
            println!(
                "{},{},{:.5},{:.5},{:.1}",
                decoder.as_str(),
                p.snr_db,
                p.error_rate,
                p.outage_rate,
                p.avg_complexity
            );
        }
    }
    Ok(())
}
