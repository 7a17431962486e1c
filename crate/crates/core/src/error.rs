use thiserror::Error;

use crate::plane::C64;

#[derive(Debug, Error)]
pub enum QcError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Beltrami coefficient bound violated at z = {z}: |mu| = {modulus} exceeds {bound}")]
    BoundExceeded { z: C64, modulus: f64, bound: f64 },

    #[error("singular point at z = {0}: |f_z| vanishes")]
    Singular(C64),

    #[error("non-finite integrand at node {node} (theta = {theta})")]
    NonFinite { node: usize, theta: f64 },

    #[error("orientation violated at z = {z}: jacobian {jacobian} < 0")]
    NegativeJacobian { z: C64, jacobian: f64 },

    #[error("degenerate image: {0}")]
    Degenerate(String),

    #[error("no admissible circle in the analysis domain")]
    EmptyDomain,

    #[error("samples must be sorted by strictly increasing radius")]
    Unsorted,

    #[error("cross-oracle mismatch for {quantity} at t = {t}: {first} vs {second}")]
    Inconsistent {
        quantity: &'static str,
        t: f64,
        first: f64,
        second: f64,
    },

    #[error("matrix is not symmetric: a12 = {a12}, a21 = {a21}")]
    Asymmetric { a12: f64, a21: f64 },

    #[error("ellipticity violated at z = {z}: eigenvalues ({lo}, {hi}) outside [1/{k}, {k}]")]
    Ellipticity { z: C64, lo: f64, hi: f64, k: f64 },

    #[error("det A = {det} at z = {z}; normalize the coefficient matrix to determinant 1")]
    NotDetNormalized { z: C64, det: f64 },

    #[error("unknown map `{name}`; available: {available}")]
    UnknownMap { name: String, available: String },

    #[error("malformed map spec `{0}`")]
    BadSpec(String),

    #[error("field file: {0}")]
    FieldFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = QcError> = std::result::Result<T, E>;
