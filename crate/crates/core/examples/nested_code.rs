//! Builds a nested LAST codebook, encodes a few messages and checks that
//! they decode back and respect the average power constraint.
//!
//! Usage: `cargo run --release --example nested_code`

use last_sphere::lattice::{build_nested_code, effective_radius};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> last_sphere::Result<()> {
    let code = build_nested_code(2, 3, 4.0, 100.0, 11)?;
    println!(
        "m = {}, p = {}, k = {}, |C| = 2^{:.1}, kappa = {:.6}, phi = {:.6}",
        code.dimension(),
        code.prime(),
        code.message_dim(),
        code.codebook_bits(),
        code.kappa(),
        code.phi()
    );
    println!(
        "shaping volume {:.4e}, coding volume {:.4e}, ratio p^m = {:.0}",
        code.shaping_lattice().fundamental_volume(),
        code.coding_lattice().fundamental_volume(),
        code.shaping_lattice().fundamental_volume() / code.coding_lattice().fundamental_volume()
    );
    println!(
        "effective radius of the coding lattice: {:.4}",
        effective_radius(code.coding_lattice().generator())?
    );

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut energy = 0.0;
    let n = 2000;
    for i in 0..n {
        let u = code.random_message(&mut rng);
        let (x, z) = code.encode_with_coordinates(&u)?;
        assert_eq!(code.decode_message(&z).as_deref(), Some(u.as_slice()));
        energy += x.norm_squared();
        if i < 3 {
            println!("message {u:?} -> ‖x‖² = {:.3}", x.norm_squared());
        }
    }
    println!("average energy {:.3} (MT = 6)", energy / n as f64);
    println!("JSON record: {}", code.to_json()?);
    Ok(())
}
