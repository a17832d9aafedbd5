//! Performance and complexity of the sphere decoder against the stack
//! sequential decoder on a 3x3 system with T = 5 at 4 bpcu.
//!
//! Usage: `cargo run --release --example sphere_vs_sequential [trials] [bias]`

use std::time::Instant;

use last_sphere::complexity::complexity_ratio;
use last_sphere::harness::{db_to_linear, run_sweep, DecoderKind, ExperimentConfig, RateMode, TimeoutPolicy};

fn main() -> last_sphere::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(500);
    let bias = args.next().and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let grid: Vec<f64> = vec![20.0, 22.5, 25.0, 27.5, 30.0];
    println!("decoder,snr_db,avg_C,err_rate,outage_rate");
    for decoder in [DecoderKind::Sphere, DecoderKind::Sequential] {
        let cfg = ExperimentConfig {
            antennas: 3,
            receive: 3,
            blocklength: 5,
            rate_mode: RateMode::FixedRate { rate_bpcu: 4.0 },
            snr_grid_db: grid.clone(),
            trials_per_point: trials,
            seed: 77,
            decoder,
            zeta: 1.0,
            timeout_policy: TimeoutPolicy::None,
            sequential_bias: bias,
            noiseless: false,
        };
        let start = Instant::now();
        let sweep = run_sweep(&cfg)?;
        for p in &sweep.points {
            println!(
                "{},{},{:.2},{:.5},{:.5}",
                decoder.as_str(),
                p.snr_db,
                p.avg_complexity,
                p.error_rate,
                p.outage_rate
            );
        }
        eprintln!("{}: {:.1?}", decoder.as_str(), start.elapsed());
    }
    println!("# closed-form sphere/sequential ratio at r = 0:");
    for db in grid {
        println!("# {db} dB: {:.6}", complexity_ratio(3, 3, 5, 0.0, db_to_linear(db))?);
    }
    Ok(())
}
