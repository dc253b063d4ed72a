use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time window too small: {0}")]
    WindowTooSmall(String),

    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("susceptibility pole at omega = {omega} (|denominator| = {magnitude:e})")]
    Pole { omega: f64, magnitude: f64 },

    #[error("closed forms require Raman resonance, got delta_p = {delta_p}, delta_c = {delta_c}")]
    RamanCondition { delta_p: f64, delta_c: f64 },

    #[error("control Rabi frequency |omega_c| = {0:e} is too small")]
    ZeroControl(f64),

    #[error("density matrix invariant violated at tau = {tau}: {what}")]
    InvariantViolation { tau: f64, what: String },

    #[error("field blow-up at depth {depth}: peak |omega_p| = {peak:e} exceeds 10x input peak {input_peak:e}")]
    BlowUp {
        depth: f64,
        peak: f64,
        input_peak: f64,
    },

    #[error("need at least 2 peaks, found {0}")]
    InsufficientPeaks(usize),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("empty propagation record")]
    EmptyRecord,
}

impl Error {
    /// Stable machine-readable category, used by the command-line front-end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::WindowTooSmall(_) => "window-too-small",
            Error::NotPowerOfTwo(_) => "grid",
            Error::Pole { .. } => "pole",
            Error::RamanCondition { .. } => "raman-condition",
            Error::ZeroControl(_) => "zero-control",
            Error::InvariantViolation { .. } => "invariant-violation",
            Error::BlowUp { .. } => "blow-up",
            Error::InsufficientPeaks(_) => "insufficient-peaks",
            Error::GridMismatch(_) => "grid-mismatch",
            Error::EmptyRecord => "empty-record",
        }
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
