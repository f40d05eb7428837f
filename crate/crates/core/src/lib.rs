//! Josephson parametric amplifier modeling.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`quantizer`] builds the capacitance and inverse-inductance matrices of
//!    a circuit, solves the generalized eigenproblem and reduces one mode to an
//!    effective LC oscillator.
//! 2. [`nonlinearity`] supplies the Kerr coefficient of the architecture.
//! 3. [`pump`] solves the steady-state pump cubic and classifies stability.
//! 4. [`response`] linearizes around the pumped state and evaluates the 2x2
//!    signal/idler scattering matrix, gain spectra and compression.
//!
//! [`oracle`] integrates the classical Langevin equation in the time domain
//! and is used to cross-check the analytic stages.
//!
//! All internal quantities use angular-frequency units (rad/s) with the
//! reduced Planck constant set to one; [`config`] converts from lab units.

pub mod config;
pub mod device;
pub mod error;
pub mod model;
pub mod nonlinearity;
pub mod ode;
pub mod oracle;
pub mod pump;
pub mod quantizer;
pub mod reference;
pub mod response;
pub mod units;

pub use config::Config;
pub use device::Amplifier;
pub use error::{Error, Result};
pub use model::{Architecture, Drive, DriveStrength, Environment, JunctionSpec, Probe};
pub use nonlinearity::{DisplacedFrame, KerrSpec};
pub use pump::{BranchPolicy, PumpOperatingPoint, Stability};
pub use quantizer::{CircuitMatrices, EffectiveOscillator, ModeSet};
pub use response::{GainCurve, ScatterMatrix};

/// Version string written into every CSV header.
pub const SCHEMA_VERSION: u32 = 1;
