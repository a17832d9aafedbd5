use thiserror::Error;

/// Errors produced by lattice construction, decoding and experiment runs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular lattice: {0}")]
    SingularLattice(String),

    #[error("rate {rate_bpcu} bpcu over T={blocklength} is infeasible with primes up to {max_prime} and k <= {dimension}")]
    RateInfeasible {
        rate_bpcu: f64,
        blocklength: usize,
        dimension: usize,
        max_prime: u64,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("oracle scale exceeded: {0}")]
    OracleScaleExceeded(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
