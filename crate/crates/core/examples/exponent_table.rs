//! Closed-form complexity exponents: DMT, l(r), cut-off multiplexing gain,
//! the theoretical average complexities and the grid maximization that
//! cross-checks l(r).
//!
//! Usage: `cargo run --release --example exponent_table`

use last_sphere::complexity::{complexity_ratio, exponent_table_csv, l_exponent, maximize_l_over_alpha};
use last_sphere::harness::db_to_linear;

fn main() -> last_sphere::Result<()> {
    print!("{}", exponent_table_csv(&[(2, 2, 3), (2, 2, 5), (3, 3, 5), (3, 4, 6)], &[10.0, 20.0, 30.0])?);
    println!();
    println!("M,N,T,r,l_closed_form,l_grid,alpha_star");
    for &(m, n, t) in &[(2, 2, 3), (3, 3, 5)] {
        for r in 0..=m {
            let (v, alpha) = maximize_l_over_alpha(m, n, t, r as f64, 0.05)?;
            println!("{m},{n},{t},{r},{},{v:.4},{alpha:?}", l_exponent(m, n, t, r as f64)?);
        }
    }
    println!();
    for db in [20.0, 30.0, 40.0, 60.0] {
        println!("gamma(3,3,5, r=0) at {db} dB = {:.6}", complexity_ratio(3, 3, 5, 0.0, db_to_linear(db))?);
    }
    Ok(())
}
