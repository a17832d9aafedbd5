//! Lattice decoders operating on the triangular model `y' = R z + e'`.
//!
//! Layers are numbered the way the search proceeds: layer `k` holds the
//! partial vectors made of the last `k` coordinates of `z`, so the
//! depth-first search starts at layer 1 (coordinate `m - 1`) and finishes at
//! layer `m` (coordinate 0). `layer_counts[k - 1]` is the number of nodes
//! visited at layer `k`.

mod babai;
mod cvp;
mod lll;
mod reference;
mod sequential;
mod sphere;

use serde::{Deserialize, Serialize};

pub use babai::babai_nearest_plane;
pub use cvp::closest_point;
pub use lll::{lll_reduce, orthogonality_defect, LllOutcome};
pub use reference::{brute_force_cvp, layer_count_enumeration, sufficient_box_bound, BRUTE_FORCE_MAX_DIM};
pub use sequential::stack_sequential_decode;
pub use sphere::sphere_decode;

/// How a search terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodeStatus {
    Found,
    EmptySphere,
    TimedOut,
}

impl DecodeStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            DecodeStatus::Found => "found",
            DecodeStatus::EmptySphere => "empty-sphere",
            DecodeStatus::TimedOut => "timed-out",
        }
    }
}

/// Result of one decoding attempt with its complexity instrumentation.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    /// Estimated integer coefficient vector, absent on erasure.
    pub z_hat: Option<Vec<i64>>,
    /// Visited nodes per layer; `layer_counts[k - 1]` is `C_k`.
    pub layer_counts: Vec<u64>,
    /// Total number of visited nodes `C`.
    pub total_count: u64,
    pub status: DecodeStatus,
}

impl DecodeOutcome {
    pub(crate) fn new(m: usize) -> Self {
        Self {
            z_hat: None,
            layer_counts: vec![0; m],
            total_count: 0,
            status: DecodeStatus::EmptySphere,
        }
    }
}

/// Sphere radius and time-out policy of the Fincke-Pohst decoder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereConfig {
    /// Radius growth parameter: `R_s^2 = MT (1 + zeta ln rho)`.
    pub zeta: f64,
    /// Node budget `L0`; `None` searches the whole sphere.
    pub timeout: Option<u64>,
    /// Fixed radius replacing the default policy.
    pub radius_override: Option<f64>,
}

impl SphereConfig {
    pub fn new(zeta: f64) -> Self {
        Self {
            zeta,
            timeout: None,
            radius_override: None,
        }
    }

    /// Radius used for an `M x T` code at normalized SNR `rho`.
    pub fn radius(&self, antennas: usize, blocklength: usize, rho: f64) -> f64 {
        self.radius_override
            .unwrap_or_else(|| default_radius(antennas, blocklength, rho, self.zeta))
    }
}

/// `sqrt(MT (1 + zeta ln rho))`.
pub fn default_radius(antennas: usize, blocklength: usize, rho: f64, zeta: f64) -> f64 {
    ((antennas * blocklength) as f64 * (1.0 + zeta * rho.ln())).sqrt()
}
