//! Outage probability of a 2x2 Rayleigh channel at 4 bpcu versus SNR, and
//! the eigen-exponent description of one channel draw.
//!
//! Usage: `cargo run --release --example channel_outage [draws]`

use last_sphere::channel::{alpha_vector, is_outage, sample_channel};
use last_sphere::harness::db_to_linear;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> last_sphere::Result<()> {
    let draws: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    println!("snr_db,outage_prob");
    for db in [10.0, 15.0, 20.0, 25.0, 30.0] {
        let rho = db_to_linear(db);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut outages = 0usize;
        for _ in 0..draws {
            let ch = sample_channel(&mut rng, 2, 2, 1, rho)?;
            outages += is_outage(&ch, 4.0) as usize;
        }
        println!("{db},{:.6}", outages as f64 / draws as f64);
    }
    let ch = sample_channel(&mut ChaCha8Rng::seed_from_u64(9), 2, 2, 1, db_to_linear(20.0))?;
    let e = alpha_vector(&ch)?;
    println!("eigenvalues {:?}, exponents {:?}", e.lambdas, e.alphas);
    Ok(())
}
