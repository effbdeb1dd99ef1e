use serde::Serialize;
use thiserror::Error;

/// A spectrum eigenvalue that sits on (or too close to) a Dirichlet eigenvalue
/// of the disc. Indices follow the report conventions: `j` is 1-based into the
/// spectrum, `m` is the Fourier mode, `n` the 1-based radial index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub j: usize,
    pub m: u32,
    pub n: u32,
    pub mu: f64,
    pub eigenvalue: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {what} (limit {limit})")]
    Capacity { what: &'static str, limit: usize },

    #[error("non-degeneracy violated at {} (j, m, n) triple(s)", .0.len())]
    Degenerate(Vec<Violation>),

    #[error("critical point is not isolated near alpha = {alpha}: {reason}")]
    NonIsolated { alpha: f64, reason: String },

    #[error("unsupported Burnside product: {0}")]
    UnsupportedProduct(String),

    #[error("integer overflow in Burnside coefficient arithmetic")]
    Overflow,

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("invalid input: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
