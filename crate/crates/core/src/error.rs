use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates a domain invariant (non-positive capacitance, ...).
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    /// Missing or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("matrix construction failed: {0}")]
    Construction(String),

    #[error("capacitance matrix is not positive definite (eigenvalue {eigenvalue:e} at index {index})")]
    NotPositiveDefinite { index: usize, eigenvalue: f64 },

    #[error("mode index {index} is invalid: {reason}")]
    InvalidMode { index: usize, reason: String },

    #[error("phase {phase} rad is outside (-pi/2, pi/2); the junction inductance diverges")]
    PhaseDomain { phase: f64 },

    #[error("bistable operating point: stable roots n_low = {n_low}, n_high = {n_high}")]
    Bistable { n_low: f64, n_high: f64 },

    #[error("operating point n = {n} is unstable; choose another branch policy or reduce the drive")]
    UnstableOperatingPoint { n: f64 },

    #[error("parametric oscillation threshold: |det M| = {det:e}")]
    OscillationThreshold { det: f64 },

    #[error("integration diverged at t = {time:e} s (|a| = {amplitude:e})")]
    Divergence { time: f64, amplitude: f64 },

    #[error("record too short: {periods:.2} beat periods available, {required} required")]
    InsufficientRecord { periods: f64, required: usize },

    #[error("step size underflow at t = {time:e}")]
    StepUnderflow { time: f64 },

    #[error("invalid scan resolution {0}; need at least 2 points per axis")]
    Resolution(usize),

    #[error("{0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
