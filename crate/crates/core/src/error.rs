use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

/// Everything that can go wrong while evaluating a formula or a lattice sum.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("non-finite input to {0}")]
    NonFinite(&'static str),

    #[error("modular parameter rejected: Im(tau) = {im} (minimum {min})")]
    BadTau { im: f64, min: f64 },

    #[error("truncation budget exhausted: tail bound {tail:e} above tolerance {tol:e} at {n_terms} terms")]
    Truncation { tail: f64, tol: f64, n_terms: usize },

    #[error("derivative order {0} not supported (0..=3)")]
    DerivativeOrder(usize),

    #[error("pole proximity in {what}: |theta| = {value:e}")]
    PoleProximity { what: String, value: f64 },

    #[error("coincident parameters in {0}")]
    Coincident(String),

    #[error("argument outside the admissible strip: {0}")]
    OutsideStrip(String),

    #[error("degenerate interpolation nodes: {0}")]
    DegenerateNodes(String),

    #[error("{method}: n = {n} exceeds cap {cap}")]
    SizeCap { method: &'static str, n: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

impl LabError {
    pub fn pole(what: impl Into<String>, value: f64) -> Self {
        LabError::PoleProximity {
            what: what.into(),
            value,
        }
    }
}
