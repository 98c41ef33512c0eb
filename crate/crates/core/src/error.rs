use thiserror::Error;

use crate::dirac_algebra::Basis;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basis mismatch: {0:?} vs {1:?}")]
    BasisMismatch(Basis, Basis),

    #[error("unknown basis tag `{0}`")]
    UnknownBasis(String),

    #[error("invalid H-connection: {0}")]
    InvalidHConnection(String),

    #[error("degenerate tetrad (|det| = {0:e})")]
    DegenerateTetrad(f64),

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("non-timelike tangent at s = {s}: g(v, v) = {norm}")]
    NonTimelike { s: f64, norm: f64 },

    #[error("step must be positive, got {0}")]
    InvalidStep(f64),

    #[error("dimension mismatch: expected {expected} components, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("zero mass: the energy splitting needs m > 0")]
    ZeroMass,

    #[error("momentum off the mass shell (relative residual {0:e})")]
    OffShell(f64),

    #[error("momentum is not future-pointing")]
    PastPointing,

    #[error("point at radius {radius} is at or inside the horizon radius {horizon}")]
    InsideHorizon { radius: f64, horizon: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name: name.to_string(), reason: reason.into() }
    }
}
