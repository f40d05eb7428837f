//! Circuit, environment and drive descriptions plus their validation.
//!
//! Energies and rates are angular frequencies (rad/s, hbar = 1). Capacitance is
//! in farad, inductance in henry.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::units;

/// Relative tolerance for agreement between the energy and circuit
/// representations of a junction.
pub const JUNCTION_CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionSpec {
    pub e_j: f64,
    pub e_c: f64,
    pub l_j0: Option<f64>,
    pub c_j: Option<f64>,
}

impl JunctionSpec {
    pub fn from_energies(e_j: f64, e_c: f64) -> Self {
        Self {
            e_j,
            e_c,
            l_j0: None,
            c_j: None,
        }
    }

    /// Derives both energies from the zero-phase inductance and capacitance.
    pub fn from_circuit(l_j0: f64, c_j: f64) -> Self {
        Self {
            e_j: units::josephson_energy(l_j0),
            e_c: units::charging_energy(c_j),
            l_j0: Some(l_j0),
            c_j: Some(c_j),
        }
    }

    pub fn inductance(&self) -> f64 {
        self.l_j0
            .unwrap_or_else(|| units::inductance_from_josephson(self.e_j))
    }

    pub fn capacitance(&self) -> f64 {
        self.c_j
            .unwrap_or_else(|| units::capacitance_from_charging(self.e_c))
    }

    fn check(&self, prefix: &str, report: &mut ValidationReport) {
        report.positive(&format!("{prefix}.e_j"), self.e_j);
        report.positive(&format!("{prefix}.e_c"), self.e_c);
        if let Some(l) = self.l_j0 {
            if report.positive(&format!("{prefix}.l_j0"), l) && self.e_j > 0.0 {
                let ej = units::josephson_energy(l);
                if ((ej - self.e_j) / self.e_j).abs() > JUNCTION_CONSISTENCY_TOL {
                    report.fail(
                        format!("{prefix}.e_j"),
                        format!("e_j = {:e} disagrees with l_j0 (implies {ej:e})", self.e_j),
                    );
                }
            }
        }
        if let Some(c) = self.c_j {
            if report.positive(&format!("{prefix}.c_j"), c) && self.e_c > 0.0 {
                let ec = units::charging_energy(c);
                if ((ec - self.e_c) / self.e_c).abs() > JUNCTION_CONSISTENCY_TOL {
                    report.fail(
                        format!("{prefix}.e_c"),
                        format!("e_c = {:e} disagrees with e^2/2C = {ec:e}", self.e_c),
                    );
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Architecture {
    SingleJunction {
        junction: JunctionSpec,
    },
    SeriesArray {
        n: usize,
        junction: JunctionSpec,
        c_ground: f64,
        c_out: f64,
    },
    Blochnium {
        n_quartons: usize,
        m_slaves: usize,
        alpha_c: f64,
        slave_junction: JunctionSpec,
        c_ground: f64,
    },
    ModifiedBjpa(ModifiedBjpa),
}

/// Parameters of the two-Quarton modified BJPA unit cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModifiedBjpa {
    pub n_cells: usize,
    pub c_g: f64,
    pub c_j: f64,
    pub c_m: f64,
    pub c_1: f64,
    pub c_2: f64,
    pub c_s: f64,
    pub l_js: f64,
    pub l_jm: f64,
    pub l_s: f64,
    pub e_js: f64,
    pub e_jm: f64,
    pub n_primary: usize,
}

impl Architecture {
    pub fn tag(&self) -> &'static str {
        match self {
            Architecture::SingleJunction { .. } => "single_junction",
            Architecture::SeriesArray { .. } => "series_array",
            Architecture::Blochnium { .. } => "blochnium",
            Architecture::ModifiedBjpa(_) => "modified_bjpa",
        }
    }

    fn check(&self, report: &mut ValidationReport) {
        match self {
            Architecture::SingleJunction { junction } => junction.check("junction", report),
            Architecture::SeriesArray {
                n,
                junction,
                c_ground,
                c_out,
            } => {
                report.count("n", *n);
                junction.check("junction", report);
                report.positive("c_ground", *c_ground);
                report.positive("c_out", *c_out);
            }
            Architecture::Blochnium {
                n_quartons,
                m_slaves,
                alpha_c,
                slave_junction,
                c_ground,
            } => {
                report.count("n_quartons", *n_quartons);
                report.count("m_slaves", *m_slaves);
                if !alpha_c.is_finite() || *alpha_c < 0.0 {
                    report.fail("alpha_c", format!("must be finite and >= 0, got {alpha_c}"));
                } else if *alpha_c == 1.0 {
                    report.warn("alpha_c", "Kerr coefficient is zero at alpha_c = 1; no gain");
                }
                slave_junction.check("slave_junction", report);
                report.positive("c_ground", *c_ground);
            }
            Architecture::ModifiedBjpa(cell) => {
                report.count("n_cells", cell.n_cells);
                report.count("n_primary", cell.n_primary);
                for (name, v) in [
                    ("c_g", cell.c_g),
                    ("c_j", cell.c_j),
                    ("c_m", cell.c_m),
                    ("c_1", cell.c_1),
                    ("c_2", cell.c_2),
                    ("c_s", cell.c_s),
                    ("l_js", cell.l_js),
                    ("l_jm", cell.l_jm),
                    ("l_s", cell.l_s),
                    ("e_js", cell.e_js),
                    ("e_jm", cell.e_jm),
                ] {
                    report.positive(name, v);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    DirectKappa(f64),
    QualityFactor(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    pub coupling: Coupling,
    /// Line impedance in ohm.
    pub z_line: f64,
}

impl Environment {
    pub const DEFAULT_Z_LINE: f64 = 50.0;

    pub fn with_kappa(kappa: f64) -> Self {
        Self {
            coupling: Coupling::DirectKappa(kappa),
            z_line: Self::DEFAULT_Z_LINE,
        }
    }

    pub fn with_quality_factor(q: f64) -> Self {
        Self {
            coupling: Coupling::QualityFactor(q),
            z_line: Self::DEFAULT_Z_LINE,
        }
    }

    /// Coupling rate for a mode at `omega`.
    pub fn kappa(&self, omega: f64) -> f64 {
        match self.coupling {
            Coupling::DirectKappa(k) => k,
            Coupling::QualityFactor(q) => omega / q,
        }
    }

    fn check(&self, report: &mut ValidationReport) {
        match self.coupling {
            Coupling::DirectKappa(k) => report.positive("environment.kappa", k),
            Coupling::QualityFactor(q) => report.positive("environment.q_eff", q),
        };
        report.positive("environment.z_line", self.z_line);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveStrength {
    NormalizedZeta(f64),
    /// |alpha_in|^2 in photons/s.
    PhotonFlux(f64),
    PowerDbm(f64),
    CurrentMicroamp(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drive {
    pub pump_freq: f64,
    pub pump_phase: f64,
    pub strength: DriveStrength,
    /// Current-to-power transduction efficiency; required for `CurrentMicroamp`.
    pub transduction: Option<f64>,
}

impl Drive {
    pub fn new(pump_freq: f64, strength: DriveStrength) -> Self {
        Self {
            pump_freq,
            pump_phase: 0.0,
            strength,
            transduction: Some(1.0),
        }
    }

    fn check(&self, report: &mut ValidationReport) {
        report.positive("drive.pump_freq", self.pump_freq);
        if !self.pump_phase.is_finite() {
            report.fail("drive.pump_phase", "must be finite");
        }
        match self.strength {
            DriveStrength::PhotonFlux(f) if !(f >= 0.0 && f.is_finite()) => {
                report.fail("drive.photon_flux", format!("must be finite and >= 0, got {f}"))
            }
            DriveStrength::NormalizedZeta(z) | DriveStrength::PowerDbm(z) if !z.is_finite() => {
                report.fail("drive.strength", "must be finite")
            }
            DriveStrength::CurrentMicroamp(i) => {
                if !i.is_finite() {
                    report.fail("drive.current_microamp", "must be finite");
                }
                match self.transduction {
                    None => report.fail("drive.transduction", "required for a current drive"),
                    Some(eta) => {
                        report.positive("drive.transduction", eta);
                    }
                }
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbePoint {
    /// Absolute signal frequency (rad/s).
    Frequency(f64),
    /// Normalized detuning (omega_s - omega_p) / kappa.
    Detuning(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub point: ProbePoint,
    pub signal_power_dbm: f64,
}

impl Probe {
    /// Normalized signal detuning for a pump at `pump_freq` and coupling `kappa`.
    pub fn detuning(&self, pump_freq: f64, kappa: f64) -> f64 {
        match self.point {
            ProbePoint::Frequency(w) => (w - pump_freq) / kappa,
            ProbePoint::Detuning(d) => d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Pass,
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub field: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Pass => "pass",
            Severity::Warn => "warn",
            Severity::Fail => "fail",
        };
        write!(f, "{tag}: {}: {}", self.field, self.message)
    }
}

/// Outcome of [`validate`]; collects every violated invariant.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn status(&self) -> Severity {
        self.findings
            .iter()
            .map(|f| f.severity)
            .max()
            .unwrap_or(Severity::Pass)
    }

    pub fn is_ok(&self) -> bool {
        self.status() != Severity::Fail
    }

    pub fn failures(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Fail)
    }

    /// Converts a failing report into an error naming every failure.
    pub fn into_result(self) -> Result<Self> {
        if self.is_ok() {
            return Ok(self);
        }
        let msg = self
            .failures()
            .map(|f| format!("{}: {}", f.field, f.message))
            .collect::<Vec<_>>()
            .join("; ");
        Err(Error::Config(msg))
    }

    fn warn(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.findings.push(Finding {
            severity: Severity::Warn,
            field: field.into(),
            message: message.into(),
        });
    }

    fn fail(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.findings.push(Finding {
            severity: Severity::Fail,
            field: field.into(),
            message: message.into(),
        });
    }

    fn positive(&mut self, field: &str, value: f64) -> bool {
        if value > 0.0 && value.is_finite() {
            return true;
        }
        let leaf = field.rsplit('.').next().unwrap_or(field);
        let what = if leaf.starts_with("c_") {
            "capacitance"
        } else if leaf.starts_with("l_") {
            "inductance"
        } else {
            "value"
        };
        self.fail(field, format!("{what} must be strictly positive, got {value}"));
        false
    }

    fn count(&mut self, field: &str, value: usize) {
        if value == 0 {
            self.fail(field, "count must be >= 1");
        }
    }
}

pub fn validate(architecture: &Architecture, env: &Environment, drive: &Drive) -> ValidationReport {
    let mut report = ValidationReport::default();
    architecture.check(&mut report);
    env.check(&mut report);
    drive.check(&mut report);
    report
}

/// Pump strength after unit conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpStrength {
    /// Photon flux |alpha_in|^2 (photons/s).
    Flux(f64),
    /// Already-normalized nonlinearity strength; flux is not applicable.
    Zeta(f64),
}

/// Converts a drive into photon flux at `carrier_freq` (rad/s).
///
/// Powers map through |alpha_in|^2 = P / (hbar omega). A current `I` delivers
/// `eta I^2 Z0 / 2` into the line.
pub fn drive_to_flux(drive: &Drive, env: &Environment, carrier_freq: f64) -> Result<PumpStrength> {
    if !(carrier_freq > 0.0) {
        return Err(Error::invalid("carrier_freq", "must be > 0"));
    }
    Ok(match drive.strength {
        DriveStrength::NormalizedZeta(z) => PumpStrength::Zeta(z),
        DriveStrength::PhotonFlux(f) => PumpStrength::Flux(f),
        DriveStrength::PowerDbm(p) => PumpStrength::Flux(units::dbm_to_flux(p, carrier_freq)),
        DriveStrength::CurrentMicroamp(i) => {
            let eta = drive.transduction.ok_or_else(|| {
                Error::Config("drive.transduction is required for a current drive".into())
            })?;
            let amps = i * units::MICRO;
            let watts = eta * amps * amps * env.z_line / 2.0;
            PumpStrength::Flux(units::watts_to_flux(watts, carrier_freq))
        }
    })
}
