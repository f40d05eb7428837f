//! A fully resolved amplifier: circuit, selected mode, Kerr coefficient and
//! normalized pump point, with the analyses that need all of them.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::model::{self, Architecture, Drive, DriveStrength, Environment, Probe, PumpStrength, ValidationReport};
use crate::nonlinearity::{self, KerrSpec};
use crate::ode::Tolerance;
use crate::oracle::{self, OracleCompression, OscillatorParams};
use crate::pump::{self, BranchPolicy, PumpOperatingPoint};
use crate::quantizer::{self, CircuitMatrices, EffectiveOscillator, ModeSet};
use crate::response::{self, CombMode, Compression, GainCurve, ReflectionPoint};
use crate::units;

/// Probe detuning used by compression when no probe is configured.
pub const DEFAULT_PROBE_DETUNING: f64 = 0.02;

/// How the pump frequency is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpTuning {
    /// Absolute frequency (rad/s).
    Frequency(f64),
    /// `(omega_p - omega_eff) / kappa` of the selected mode.
    Detuning(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplifierSpec {
    pub architecture: Architecture,
    pub environment: Environment,
    pub strength: DriveStrength,
    pub transduction: Option<f64>,
    pub tuning: PumpTuning,
    pub pump_phase: f64,
    pub probe: Option<Probe>,
    pub branch: BranchPolicy,
    /// Mode to amplify; the lowest nonzero mode when absent.
    pub mode_index: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Amplifier {
    pub spec: AmplifierSpec,
    pub matrices: CircuitMatrices,
    pub modes: ModeSet,
    pub oscillator: EffectiveOscillator,
    pub kerr: KerrSpec,
    pub drive: Drive,
    pub validation: ValidationReport,
    pub delta: f64,
    pub zeta: f64,
    /// Pump photon flux (photons/s); `None` for a zero Kerr coefficient
    /// driven by `zeta` directly.
    pub pump_flux: Option<f64>,
}

/// Branch-participation weight of a mode shape: the quartic sum of the
/// flux drops over every inductive branch.
fn quartic_participation(m: &CircuitMatrices, psi: &DVector<f64>) -> f64 {
    let n = m.node_count();
    let scale = m.inv_ind_norm().max(f64::MIN_POSITIVE);
    let mut q = 0.0;
    for a in 0..n {
        let row_sum: f64 = (0..n).map(|b| m.inv_ind[(a, b)]).sum();
        if row_sum.abs() > 1e-12 * scale {
            q += psi[a].powi(4);
        }
        for b in a + 1..n {
            if m.inv_ind[(a, b)].abs() > 1e-12 * scale {
                q += (psi[a] - psi[b]).powi(4);
            }
        }
    }
    q
}

impl Amplifier {
    pub fn build(spec: AmplifierSpec) -> Result<Self> {
        let matrices = quantizer::build_matrices(&spec.architecture)?;
        let modes = quantizer::solve_modes(&matrices)?;
        let index = match spec.mode_index {
            Some(i) => i,
            None => modes.fundamental().ok_or_else(|| Error::InvalidMode {
                index: 0,
                reason: "circuit has no nonzero mode".into(),
            })?,
        };
        let oscillator = quantizer::effective_params(&modes, &matrices, index, &spec.environment)?;
        let kerr = nonlinearity::kerr_coefficient(&spec.architecture);
        let kappa = oscillator.kappa;
        let pump_freq = match spec.tuning {
            PumpTuning::Frequency(w) => w,
            PumpTuning::Detuning(d) => oscillator.omega_eff + d * kappa,
        };
        let drive = Drive {
            pump_freq,
            pump_phase: spec.pump_phase,
            strength: spec.strength,
            transduction: spec.transduction,
        };
        let validation = model::validate(&spec.architecture, &spec.environment, &drive).into_result()?;
        let delta = (pump_freq - oscillator.omega_eff) / kappa;
        let (zeta, pump_flux) = match model::drive_to_flux(&drive, &spec.environment, pump_freq)? {
            PumpStrength::Flux(f) => (pump::normalize(&kerr, kappa, f, pump_freq, oscillator.omega_eff).1, Some(f)),
            PumpStrength::Zeta(z) if kerr.is_zero() => (z, None),
            PumpStrength::Zeta(z) => (z, Some(z * kappa * kappa / kerr.kerr)),
        };
        if pump_flux.is_some_and(|f| f < 0.0) {
            return Err(Error::invalid(
                "drive.zeta",
                format!("sign must match the Kerr coefficient ({:e} rad/s)", kerr.kerr),
            ));
        }
        Ok(Amplifier {
            spec,
            matrices,
            modes,
            oscillator,
            kerr,
            drive,
            validation,
            delta,
            zeta,
            pump_flux,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.oscillator.kappa
    }

    pub fn pump_freq(&self) -> f64 {
        self.drive.pump_freq
    }

    pub fn architecture_tag(&self) -> &'static str {
        self.spec.architecture.tag()
    }

    /// Same device with the normalized drive replaced.
    pub fn with_zeta(&self, zeta: f64) -> Self {
        let mut out = self.clone();
        out.zeta = zeta;
        out.pump_flux = (!self.kerr.is_zero()).then(|| zeta * self.kappa() * self.kappa() / self.kerr.kerr);
        out.drive.strength = DriveStrength::NormalizedZeta(zeta);
        out
    }

    /// Photon flux for a normalized strength of this device.
    pub fn zeta_to_flux(&self, zeta: f64) -> Result<f64> {
        if self.kerr.is_zero() {
            return Err(Error::invalid("kerr", "zero Kerr coefficient; zeta does not map to a power"));
        }
        Ok(zeta * self.kappa() * self.kappa() / self.kerr.kerr)
    }

    pub fn flux_to_zeta(&self, flux: f64) -> f64 {
        self.kerr.kerr * flux / (self.kappa() * self.kappa())
    }

    pub fn pump_power_dbm(&self) -> Option<f64> {
        self.pump_flux.map(|f| units::flux_to_dbm(f, self.pump_freq()))
    }

    pub fn steady_states(&self) -> Vec<PumpOperatingPoint> {
        pump::steady_state_with_phase(self.delta, self.zeta, self.spec.pump_phase)
    }

    pub fn operating_point(&self) -> Result<PumpOperatingPoint> {
        pump::select_branch(&self.steady_states(), self.spec.branch)
    }

    /// Probe detuning (units of kappa) of the configured probe, or the default.
    pub fn probe_detuning(&self) -> f64 {
        self.spec
            .probe
            .map_or(DEFAULT_PROBE_DETUNING, |p| p.detuning(self.pump_freq(), self.kappa()))
    }

    /// Probe frequency (rad/s) for a normalized detuning.
    pub fn probe_freq(&self, detuning: f64) -> f64 {
        self.pump_freq() + detuning * self.kappa()
    }

    /// Modes entering the gain comb: every nonzero mode in `[lo, hi]`
    /// (rad/s), each pumped at this device's `(delta, zeta)`. The weight is
    /// the mode's quartic participation relative to the selected mode and
    /// is reported for inspection only.
    pub fn comb_modes(&self, lo: f64, hi: f64) -> Vec<CombMode> {
        let norm = |i: usize| {
            let psi = &self.modes.shapes[i];
            psi / psi.norm()
        };
        let q_main = quartic_participation(&self.matrices, &norm(self.oscillator.mode_index));
        self.modes
            .in_band(lo, hi)
            .into_iter()
            .map(|i| {
                let weight = if q_main > 0.0 {
                    quartic_participation(&self.matrices, &norm(i)) / q_main
                } else {
                    1.0
                };
                let omega = self.modes.frequencies[i];
                CombMode {
                    mode_index: i,
                    omega,
                    kappa: self.spec.environment.kappa(omega),
                    weight,
                    delta: self.delta,
                    zeta: self.zeta,
                }
            })
            .collect()
    }

    /// Signal and idler gain at absolute frequencies (rad/s); `x` of each
    /// point is the frequency in GHz. Modified-BJPA devices superpose every
    /// mode inside the requested range.
    pub fn gain_spectrum(&self, freqs: &[f64]) -> Result<GainCurve> {
        let tag = self.architecture_tag();
        if let Architecture::ModifiedBjpa(_) = self.spec.architecture {
            let lo = freqs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = freqs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            return response::comb_spectrum(&self.comb_modes(lo, hi), freqs, self.spec.branch, tag);
        }
        let op = self.operating_point()?;
        let probes: Vec<f64> = freqs.iter().map(|w| (w - self.pump_freq()) / self.kappa()).collect();
        let mut curve = response::gain_curve(&op, &probes, tag)?;
        for (p, w) in curve.points.iter_mut().zip(freqs) {
            p.x = units::rad_to_ghz(*w);
        }
        Ok(curve)
    }

    /// Pump-off reflection of the selected mode.
    pub fn linear_response(&self, freqs: &[f64]) -> Vec<ReflectionPoint> {
        response::linear_response(self.oscillator.omega_eff, self.kappa(), freqs)
    }

    /// Total-flux compression at the configured probe. Signal strengths
    /// span `span_db` below the pump in `points` log steps.
    pub fn compression(&self, span_db: f64, points: usize) -> Result<Compression> {
        let ratios = log_grid(span_db, points);
        let zetas: Vec<f64> = ratios.iter().map(|r| r * self.zeta).collect();
        response::compression(self.delta, self.zeta, self.probe_detuning(), &zetas, self.spec.branch)
    }

    /// Analytic input 1 dB compression point (dBm at the probe frequency).
    pub fn p1db(&self) -> Result<f64> {
        let c = self.compression(80.0, 161)?;
        let z = c
            .p1db_zeta
            .ok_or_else(|| Error::Numerical("no compression in range".into()))?;
        Ok(units::flux_to_dbm(self.zeta_to_flux(z)?, self.probe_freq(self.probe_detuning())))
    }

    pub fn oracle_params(&self) -> OscillatorParams {
        OscillatorParams { delta: self.delta, zeta: self.zeta }
    }

    /// Two-tone time-domain compression over probe-to-pump flux ratios
    /// spanning `span_db` (at least 30 dB).
    pub fn oracle_compression(&self, span_db: f64, points: usize, periods: usize, tol: Tolerance) -> Result<OracleCompression> {
        oracle::p1db_oracle(
            self.oracle_params(),
            self.spec.pump_phase,
            self.probe_detuning(),
            &log_grid(span_db, points),
            periods,
            tol,
        )
    }

    /// Oracle input 1 dB compression point (dBm at the probe frequency).
    pub fn p1db_oracle(&self, periods: usize, tol: Tolerance) -> Result<f64> {
        let c = self.oracle_compression(60.0, 31, periods, tol)?;
        let r = c
            .p1db_flux_ratio
            .ok_or_else(|| Error::Numerical("no compression in range".into()))?;
        Ok(units::flux_to_dbm(r * self.zeta_to_flux(self.zeta)?, self.probe_freq(self.probe_detuning())))
    }
}

/// Ascending flux ratios from `-span_db` to 0 dB.
fn log_grid(span_db: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points)
        .map(|k| 10f64.powf((-span_db + span_db * k as f64 / (points - 1) as f64) / 10.0))
        .collect()
}
