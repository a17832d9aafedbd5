//! Decodes one noisy LAST codeword with the instrumented sphere decoder and
//! prints the per-layer node counts next to their volume estimates and the
//! `L0` time-out threshold.
//!
//! Usage: `cargo run --release --example sphere_decoding [snr_db]`

use last_sphere::channel::{realify, sample_channel, transmit};
use last_sphere::complexity::{compute_l0, layer_volume_estimates};
use last_sphere::decoders::{default_radius, sphere_decode};
use last_sphere::harness::db_to_linear;
use last_sphere::lattice::build_nested_code;
use last_sphere::linalg::qr_positive;
use last_sphere::mmse_dfe::{apply_forward, augmented_qr};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> last_sphere::Result<()> {
    let snr_db: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(15.0);
    let rho = db_to_linear(snr_db);
    let (m_ant, t) = (2, 3);
    let code = build_nested_code(m_ant, t, 4.0, rho, 42)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ch = sample_channel(&mut rng, m_ant, 2, t, rho)?;
    let message = code.random_message(&mut rng);
    let x = code.encode(&message)?;
    let y = transmit(&x, &ch, &mut rng)?;

    let f = augmented_qr(&realify(&ch));
    let y_prime = apply_forward(&f, &y)? - &f.backward * code.dither();
    let (q, r) = qr_positive(&(&f.backward * code.coding_lattice().generator()));
    let y_dec = q.transpose() * y_prime;
    let radius = default_radius(m_ant, t, rho, 1.0);
    let out = sphere_decode(&r, &y_dec, radius, None)?;

    println!("radius {radius:.3}, status {}, C = {}", out.status.as_str(), out.total_count);
    println!("L0 threshold: {:.3e}", compute_l0(&r, radius)?);
    println!("k,C_k,volume_estimate");
    for (k, (c, v)) in out.layer_counts.iter().zip(layer_volume_estimates(&r, radius)?).enumerate() {
        println!("{},{c},{v:.1}", k + 1);
    }
    let decoded = out.z_hat.as_deref().and_then(|z| code.decode_message(z));
    println!("message recovered: {}", decoded.as_deref() == Some(message.as_slice()));
    Ok(())
}
