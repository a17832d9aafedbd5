//! Sphere decoding of lattice space-time (LAST) coded MIMO channels.
//!
//! The crate covers the whole link used to study decoder complexity:
//!
//! - [`lattice`]: mod-p (Construction A) lattices and nested LAST codebooks.
//! - [`channel`]: quasi-static Rayleigh fading, the real-valued block model,
//!   achievable rate, outage and eigen-exponents.
//! - [`mmse_dfe`]: MMSE-DFE forward/backward filters from the augmented QR.
//! - [`decoders`]: an instrumented Fincke-Pohst sphere decoder with the
//!   `MT(1 + zeta ln rho)` radius and time-out, plus Babai, LLL-aided and
//!   stack sequential decoders and brute-force reference oracles.
//! - [`complexity`]: closed-form exponents and thresholds (DMT, `l(r)`,
//!   `L0`, `L_out`, cut-off multiplexing gain).
//! - [`harness`]: seeded, order-independent Monte-Carlo sweeps with CSV/JSON
//!   output.
//!
//! Logarithms inside exponents and thresholds are natural; rates are in bits
//! per channel use.

pub mod channel;
pub mod complexity;
pub mod decoders;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod linalg;
pub mod mmse_dfe;
pub mod validate;

pub use error::{Error, Result};
