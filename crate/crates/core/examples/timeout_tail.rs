//! Complexity tail and the `L0` time-out on a 2x2 system with T = 3 at a
//! fixed multiplexing gain.
//!
//! Prints, per SNR, the outage rate, the fraction of searches that hit the
//! `L0` budget and the error rate with and without the time-out, followed
//! by the empirical tail `Pr(C >= L)` of the time-out-free search.
//!
//! Usage: `cargo run --release --example timeout_tail [trials] [r]`

use last_sphere::harness::{
    run_sweep, tail_distribution, tail_grid, DecoderKind, ExperimentConfig, RateMode, TimeoutPolicy,
};

fn main() -> last_sphere::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(2000);
    let r = args.next().and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let base = ExperimentConfig {
        antennas: 2,
        receive: 2,
        blocklength: 3,
        rate_mode: RateMode::FixedGain { r },
        snr_grid_db: vec![20.0, 25.0, 30.0],
        trials_per_point: trials,
        seed: 31,
        decoder: DecoderKind::Sphere,
        zeta: 1.0,
        timeout_policy: TimeoutPolicy::L0Formula,
        sequential_bias: 1.0,
        noiseless: false,
    };
    let with_timeout = run_sweep(&base)?;
    let without = run_sweep(&ExperimentConfig {
        timeout_policy: TimeoutPolicy::None,
        ..base.clone()
    })?;

    println!("snr_db,rate_bpcu,outage_rate,timeout_rate,err_with_L0,err_without,avg_C,min_L0");
    for (a, b) in with_timeout.points.iter().zip(&without.points) {
        let min_l0 = a.records.iter().filter_map(|r| r.timeout_used).min();
        println!(
            "{},{:.3},{:.5},{:.5},{:.5},{:.5},{:.1},{}",
            a.snr_db,
            a.rate_bpcu,
            a.outage_rate,
            a.timeout_rate,
            a.error_rate,
            b.error_rate,
            b.avg_complexity,
            min_l0.map_or("unbounded".to_string(), |l| l.to_string())
        );
    }
    println!("snr_db,L,prob");
    for p in &without.points {
        let grid = tail_grid(&p.records, base.dimension());
        for (l, prob) in tail_distribution(&p.records, &grid)? {
            println!("{},{l},{prob:.5}", p.snr_db);
        }
    }
    Ok(())
}
