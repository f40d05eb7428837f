//! TOML configuration in lab units.
//!
//! | quantity        | unit |
//! |-----------------|------|
//! | frequency, energy (E/h) | GHz |
//! | capacitance     | fF   |
//! | inductance      | pH   |
//! | coupling rate kappa/2pi | MHz |
//! | pump current    | uA   |
//! | power           | dBm  |
//!
//! Unknown keys are rejected everywhere. Fields that do not belong to the
//! selected architecture `kind` are rejected too.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::device::{Amplifier, AmplifierSpec, PumpTuning};
use crate::error::{Error, Result};
use crate::model::{Architecture, DriveStrength, Environment, JunctionSpec, ModifiedBjpa, Probe, ProbePoint};
use crate::nonlinearity::tuned_inductance;
use crate::pump::BranchPolicy;
use crate::units::{self, FEMTO, PICO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchitectureKind {
    SingleJunction,
    SeriesArray,
    Blochnium,
    ModifiedBjpa,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JunctionConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_j0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_j: Option<f64>,
    /// Static phase bias; the inductance becomes `l_j0 / cos(flux_phase)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux_phase: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchitectureConfig {
    pub kind: ArchitectureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub junction: Option<JunctionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_ground: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_out: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_quartons: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_slaves: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slave_junction: Option<JunctionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_cells: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_js: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_jm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_js: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_jm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_primary: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    /// kappa / 2pi in MHz.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_eff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_line: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    /// Absolute pump frequency (GHz).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump_freq: Option<f64>,
    /// Pump detuning `(omega_p - omega_eff) / kappa`; for a mode comb every
    /// mode is pumped at this detuning.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump_detuning: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump_phase: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub photon_flux: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_dbm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub current_ua: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transduction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<BranchPolicy>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    /// Signal frequency (GHz).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal_freq: Option<f64>,
    /// Signal detuning from the pump in units of kappa.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal_power: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    #[default]
    Cartesian,
    Zipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// Dotted path into this configuration, e.g. `drive.power_dbm`.
    pub path: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub axes: Vec<SweepAxis>,
    #[serde(default)]
    pub mode: SweepMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub formats: Vec<String>,
}

/// One sweep point: the override applied on each axis.
pub type SweepPoint = Vec<(String, f64)>;

impl SweepPlan {
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        if self.axes.is_empty() {
            return Err(Error::Config("sweep.axes must not be empty".into()));
        }
        for a in &self.axes {
            if a.values.is_empty() {
                return Err(Error::Config(format!("sweep axis `{}` has no values", a.path)));
            }
        }
        match self.mode {
            SweepMode::Zipped => {
                let len = self.axes[0].values.len();
                if let Some(a) = self.axes.iter().find(|a| a.values.len() != len) {
                    return Err(Error::Config(format!(
                        "zipped sweep axis `{}` has {} values, expected {len}",
                        a.path,
                        a.values.len()
                    )));
                }
                Ok((0..len)
                    .map(|i| self.axes.iter().map(|a| (a.path.clone(), a.values[i])).collect())
                    .collect())
            }
            SweepMode::Cartesian => {
                let mut points: Vec<SweepPoint> = vec![vec![]];
                for a in &self.axes {
                    points = points
                        .into_iter()
                        .flat_map(|p| {
                            a.values.iter().map(move |&v| {
                                let mut q = p.clone();
                                q.push((a.path.clone(), v));
                                q
                            })
                        })
                        .collect();
                }
                Ok(points)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub architecture: ArchitectureConfig,
    pub environment: EnvironmentConfig,
    pub drive: DriveConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepPlan>,
}

fn require<T: Copy>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing field `{field}`")))
}

fn exactly_one(section: &str, present: &[(&str, bool)]) -> Result<()> {
    let set: Vec<&str> = present.iter().filter(|p| p.1).map(|p| p.0).collect();
    match set.len() {
        1 => Ok(()),
        0 => Err(Error::Config(format!(
            "{section}: one of {} is required",
            present.iter().map(|p| format!("`{}`", p.0)).collect::<Vec<_>>().join(", ")
        ))),
        _ => Err(Error::Config(format!("{section}: fields {} are mutually exclusive", set.join(", ")))),
    }
}

impl JunctionConfig {
    fn to_spec(&self, field: &str) -> Result<JunctionSpec> {
        let phase = self.flux_phase.unwrap_or(0.0);
        let inductance = match (self.l_j0, self.e_j) {
            (Some(l), _) => Some(tuned_inductance(l * PICO, phase)?),
            (None, Some(_)) => None,
            (None, None) => return Err(Error::Config(format!("{field}: one of `e_j`, `l_j0` is required"))),
        };
        let capacitance = match (self.c_j, self.e_c) {
            (Some(c), _) => Some(c * FEMTO),
            (None, Some(_)) => None,
            (None, None) => return Err(Error::Config(format!("{field}: one of `e_c`, `c_j` is required"))),
        };
        let e_j = match self.e_j {
            Some(e) => {
                let e = units::ghz_to_rad(e) * phase.cos();
                if phase.abs() >= std::f64::consts::FRAC_PI_2 {
                    return Err(Error::PhaseDomain { phase });
                }
                e
            }
            None => units::josephson_energy(inductance.unwrap_or(f64::NAN)),
        };
        let e_c = match self.e_c {
            Some(e) => units::ghz_to_rad(e),
            None => units::charging_energy(capacitance.unwrap_or(f64::NAN)),
        };
        Ok(JunctionSpec {
            e_j,
            e_c,
            l_j0: inductance,
            c_j: capacitance,
        })
    }
}

impl ArchitectureConfig {
    fn allowed(&self) -> &'static [&'static str] {
        match self.kind {
            ArchitectureKind::SingleJunction => &["junction"],
            ArchitectureKind::SeriesArray => &["n", "junction", "c_ground", "c_out"],
            ArchitectureKind::Blochnium => &["n_quartons", "m_slaves", "alpha_c", "slave_junction", "c_ground"],
            ArchitectureKind::ModifiedBjpa => &[
                "n_cells", "c_g", "c_j", "c_m", "c_1", "c_2", "c_s", "l_js", "l_jm", "l_s", "e_js", "e_jm", "n_primary",
            ],
        }
    }

    fn present(&self) -> Vec<&'static str> {
        let mut out = vec![];
        macro_rules! mark {
            ($($f:ident),*) => {
                $(if self.$f.is_some() { out.push(stringify!($f)); })*
            };
        }
        mark!(
            junction, n, c_ground, c_out, n_quartons, m_slaves, alpha_c, slave_junction, n_cells, c_g, c_j, c_m, c_1, c_2,
            c_s, l_js, l_jm, l_s, e_js, e_jm, n_primary
        );
        out
    }

    pub fn to_architecture(&self) -> Result<Architecture> {
        let allowed = self.allowed();
        if let Some(extra) = self.present().into_iter().find(|f| !allowed.contains(f)) {
            return Err(Error::Config(format!(
                "architecture.{extra} is not a field of kind `{}`",
                serde_plain_kind(self.kind)
            )));
        }
        let f = |v: Option<f64>, name: &str, scale: f64| require(v, &format!("architecture.{name}")).map(|x| x * scale);
        Ok(match self.kind {
            ArchitectureKind::SingleJunction => Architecture::SingleJunction {
                junction: self
                    .junction
                    .as_ref()
                    .ok_or_else(|| Error::Config("missing field `architecture.junction`".into()))?
                    .to_spec("architecture.junction")?,
            },
            ArchitectureKind::SeriesArray => Architecture::SeriesArray {
                n: require(self.n, "architecture.n")?,
                junction: self
                    .junction
                    .as_ref()
                    .ok_or_else(|| Error::Config("missing field `architecture.junction`".into()))?
                    .to_spec("architecture.junction")?,
                c_ground: f(self.c_ground, "c_ground", FEMTO)?,
                c_out: f(self.c_out, "c_out", FEMTO)?,
            },
            ArchitectureKind::Blochnium => Architecture::Blochnium {
                n_quartons: require(self.n_quartons, "architecture.n_quartons")?,
                m_slaves: require(self.m_slaves, "architecture.m_slaves")?,
                alpha_c: require(self.alpha_c, "architecture.alpha_c")?,
                slave_junction: self
                    .slave_junction
                    .as_ref()
                    .ok_or_else(|| Error::Config("missing field `architecture.slave_junction`".into()))?
                    .to_spec("architecture.slave_junction")?,
                c_ground: f(self.c_ground, "c_ground", FEMTO)?,
            },
            ArchitectureKind::ModifiedBjpa => {
                let l_js = f(self.l_js, "l_js", PICO)?;
                let l_jm = f(self.l_jm, "l_jm", PICO)?;
                Architecture::ModifiedBjpa(ModifiedBjpa {
                    n_cells: require(self.n_cells, "architecture.n_cells")?,
                    c_g: f(self.c_g, "c_g", FEMTO)?,
                    c_j: f(self.c_j, "c_j", FEMTO)?,
                    c_m: f(self.c_m, "c_m", FEMTO)?,
                    c_1: f(self.c_1, "c_1", FEMTO)?,
                    c_2: f(self.c_2, "c_2", FEMTO)?,
                    c_s: f(self.c_s, "c_s", FEMTO)?,
                    l_js,
                    l_jm,
                    l_s: f(self.l_s, "l_s", PICO)?,
                    e_js: self.e_js.map_or_else(|| units::josephson_energy(l_js), units::ghz_to_rad),
                    e_jm: self.e_jm.map_or_else(|| units::josephson_energy(l_jm), units::ghz_to_rad),
                    n_primary: require(self.n_primary, "architecture.n_primary")?,
                })
            }
        })
    }
}

fn serde_plain_kind(kind: ArchitectureKind) -> &'static str {
    match kind {
        ArchitectureKind::SingleJunction => "single_junction",
        ArchitectureKind::SeriesArray => "series_array",
        ArchitectureKind::Blochnium => "blochnium",
        ArchitectureKind::ModifiedBjpa => "modified_bjpa",
    }
}

impl EnvironmentConfig {
    pub fn to_environment(&self) -> Result<Environment> {
        exactly_one("environment", &[("kappa", self.kappa.is_some()), ("q_eff", self.q_eff.is_some())])?;
        let mut env = match (self.kappa, self.q_eff) {
            (Some(k), _) => Environment::with_kappa(std::f64::consts::TAU * k * 1e6),
            (_, Some(q)) => Environment::with_quality_factor(q),
            _ => unreachable!(),
        };
        if let Some(z) = self.z_line {
            env.z_line = z;
        }
        Ok(env)
    }
}

impl DriveConfig {
    pub fn strength(&self) -> Result<DriveStrength> {
        exactly_one(
            "drive",
            &[
                ("zeta", self.zeta.is_some()),
                ("photon_flux", self.photon_flux.is_some()),
                ("power_dbm", self.power_dbm.is_some()),
                ("current_ua", self.current_ua.is_some()),
            ],
        )?;
        Ok(if let Some(z) = self.zeta {
            DriveStrength::NormalizedZeta(z)
        } else if let Some(f) = self.photon_flux {
            DriveStrength::PhotonFlux(f)
        } else if let Some(p) = self.power_dbm {
            DriveStrength::PowerDbm(p)
        } else {
            DriveStrength::CurrentMicroamp(self.current_ua.unwrap_or_default())
        })
    }

    pub fn tuning(&self) -> Result<PumpTuning> {
        exactly_one(
            "drive",
            &[("pump_freq", self.pump_freq.is_some()), ("pump_detuning", self.pump_detuning.is_some())],
        )?;
        Ok(match (self.pump_freq, self.pump_detuning) {
            (Some(f), _) => PumpTuning::Frequency(units::ghz_to_rad(f)),
            (_, Some(d)) => PumpTuning::Detuning(d),
            _ => unreachable!(),
        })
    }
}

impl ProbeConfig {
    pub fn to_probe(&self) -> Result<Probe> {
        exactly_one(
            "probe",
            &[("signal_freq", self.signal_freq.is_some()), ("detuning", self.detuning.is_some())],
        )?;
        let point = match (self.signal_freq, self.detuning) {
            (Some(f), _) => ProbePoint::Frequency(units::ghz_to_rad(f)),
            (_, Some(d)) => ProbePoint::Detuning(d),
            _ => unreachable!(),
        };
        Ok(Probe {
            point,
            signal_power_dbm: self.signal_power.unwrap_or(-140.0),
        })
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Copy with numeric fields replaced; every path must name a field that
    /// is present in this configuration.
    pub fn with_overrides(&self, overrides: &[(String, f64)]) -> Result<Self> {
        let mut tree = toml::Value::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        for (path, value) in overrides {
            let slot = path
                .split('.')
                .try_fold(&mut tree, |node, key| node.get_mut(key))
                .ok_or_else(|| Error::Config(format!("sweep path `{path}` does not name a field of this config")))?;
            *slot = match slot {
                toml::Value::Integer(_) => {
                    if value.fract() != 0.0 || *value < 0.0 {
                        return Err(Error::Config(format!("sweep path `{path}` needs a non-negative integer, got {value}")));
                    }
                    toml::Value::Integer(*value as i64)
                }
                toml::Value::Float(_) => toml::Value::Float(*value),
                _ => return Err(Error::Config(format!("sweep path `{path}` is not numeric"))),
            };
        }
        tree.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))
    }

    pub fn spec(&self) -> Result<AmplifierSpec> {
        Ok(AmplifierSpec {
            architecture: self.architecture.to_architecture()?,
            environment: self.environment.to_environment()?,
            strength: self.drive.strength()?,
            transduction: Some(self.drive.transduction.unwrap_or(1.0)),
            tuning: self.drive.tuning()?,
            pump_phase: self.drive.pump_phase.unwrap_or(0.0),
            probe: self.probe.as_ref().map(ProbeConfig::to_probe).transpose()?,
            branch: self.drive.branch.unwrap_or_default(),
            mode_index: self.architecture.mode_index,
        })
    }

    pub fn build(&self) -> Result<Amplifier> {
        Amplifier::build(self.spec()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ARRAY: &str = r#"
[architecture]
kind = "series_array"
n = 16
c_ground = 0.5
c_out = 100.0
junction = { l_j0 = 50.0, c_j = 1000.0 }

[environment]
q_eff = 300

[drive]
pump_detuning = 0.5
zeta = 0.1

[probe]
detuning = 0.2
"#;

    #[test]
    fn parses_and_converts_units() {
        let cfg = Config::from_toml_str(ARRAY).unwrap();
        let arch = cfg.architecture.to_architecture().unwrap();
        match arch {
            Architecture::SeriesArray { n, junction, c_ground, c_out } => {
                assert_eq!(n, 16);
                assert!((c_ground - 0.5e-15).abs() < 1e-30);
                assert!((c_out - 100e-15).abs() < 1e-28);
                assert!((junction.inductance() - 50e-12).abs() < 1e-25);
                assert!((junction.e_c - units::charging_energy(1e-12)).abs() < 1e-6);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(cfg.drive.tuning().unwrap(), PumpTuning::Detuning(0.5));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = ARRAY.replace("q_eff = 300", "q_eff = 300\nq_factor = 2");
        let err = Config::from_toml_str(&bad).unwrap_err().to_string();
        assert!(err.contains("q_factor"), "{err}");
        let bad = ARRAY.replace("n = 16", "n = 16\nalpha_c = 0.2");
        let err = Config::from_toml_str(&bad).unwrap().build().unwrap_err().to_string();
        assert!(err.contains("alpha_c"), "{err}");
    }

    #[test]
    fn exclusive_fields_are_named() {
        let bad = ARRAY.replace("zeta = 0.1", "zeta = 0.1\npower_dbm = -120");
        let err = Config::from_toml_str(&bad).unwrap().spec().unwrap_err().to_string();
        assert!(err.contains("zeta") && err.contains("power_dbm"), "{err}");
        let bad = ARRAY.replace("q_eff = 300", "");
        let err = Config::from_toml_str(&bad).unwrap().spec().unwrap_err().to_string();
        assert!(err.contains("kappa") && err.contains("q_eff"), "{err}");
        let bad = ARRAY.replace("c_out = 100.0", "");
        let err = Config::from_toml_str(&bad).unwrap().spec().unwrap_err().to_string();
        assert!(err.contains("architecture.c_out"), "{err}");
    }

    #[test]
    fn round_trip() {
        let cfg = Config::from_toml_str(ARRAY).unwrap();
        let again = Config::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn overrides_follow_paths() {
        let cfg = Config::from_toml_str(ARRAY).unwrap();
        let o = cfg
            .with_overrides(&[("drive.zeta".into(), 0.3), ("architecture.n".into(), 32.0)])
            .unwrap();
        assert_eq!(o.drive.zeta, Some(0.3));
        assert_eq!(o.architecture.n, Some(32));
        assert!(cfg.with_overrides(&[("drive.power_dbm".into(), -100.0)]).is_err());
        assert!(cfg.with_overrides(&[("architecture.n".into(), 2.5)]).is_err());
        assert!(cfg.with_overrides(&[("architecture.kind".into(), 1.0)]).is_err());
    }

    #[test]
    fn sweep_points() {
        let plan = SweepPlan {
            axes: vec![
                SweepAxis { path: "a".into(), values: vec![1.0, 2.0] },
                SweepAxis { path: "b".into(), values: vec![3.0, 4.0] },
            ],
            mode: SweepMode::Cartesian,
            out: None,
            formats: vec![],
        };
        assert_eq!(plan.points().unwrap().len(), 4);
        let zipped = SweepPlan { mode: SweepMode::Zipped, ..plan.clone() };
        let pts = zipped.points().unwrap();
        assert_eq!(pts, vec![vec![("a".to_string(), 1.0), ("b".to_string(), 3.0)], vec![("a".to_string(), 2.0), ("b".to_string(), 4.0)]]);
        let mut ragged = zipped;
        ragged.axes[1].values.push(5.0);
        assert!(ragged.points().is_err());
    }

    #[test]
    fn flux_phase_tunes_inductance() {
        let j = JunctionConfig { l_j0: Some(100.0), c_j: Some(50.0), flux_phase: Some(std::f64::consts::FRAC_PI_3), ..Default::default() };
        let spec = j.to_spec("j").unwrap();
        assert!((spec.inductance() / 200e-12 - 1.0).abs() < 1e-12);
        let j = JunctionConfig { flux_phase: Some(2.0), ..j };
        assert!(matches!(j.to_spec("j"), Err(Error::PhaseDomain { .. })));
    }
}
