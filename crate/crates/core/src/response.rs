//! Linearized signal/idler scattering around a pumped steady state.
//!
//! Gains are computed by explicit inversion of the 2x2 fluctuation matrix,
//! never from typeset closed forms.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nonlinearity::DisplacedFrame;
use crate::pump::{self, BranchPolicy, PumpOperatingPoint};

/// Below this |det M| the linearized system is at the oscillation threshold.
pub const DET_THRESHOLD: f64 = 1e-14;

/// Gain reported for a vanishing idler (`10 log10(0)`).
pub const FLOOR_DB: f64 = f64::NEG_INFINITY;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterMatrix {
    pub s: [[Complex64; 2]; 2],
    pub probe_detuning: f64,
}

impl ScatterMatrix {
    pub fn s11(&self) -> Complex64 {
        self.s[0][0]
    }

    pub fn s12(&self) -> Complex64 {
        self.s[0][1]
    }

    pub fn signal_gain(&self) -> f64 {
        self.s11().norm_sqr()
    }

    pub fn idler_gain(&self) -> f64 {
        self.s12().norm_sqr()
    }

    pub fn signal_gain_db(&self) -> f64 {
        10.0 * self.signal_gain().log10()
    }

    pub fn idler_gain_db(&self) -> f64 {
        10.0 * self.idler_gain().log10()
    }

    /// `|s11|^2 - |s12|^2 - 1`; zero for lossless two-mode scattering.
    pub fn symplectic_defect(&self) -> f64 {
        self.signal_gain() - self.idler_gain() - 1.0
    }
}

fn invert(m: [[Complex64; 2]; 2], scale: f64, threshold: f64) -> Result<[[Complex64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.norm() < threshold {
        return Err(Error::OscillationThreshold { det: det.norm() });
    }
    let k = scale / det;
    Ok([
        [m[1][1] * k - 1.0, -m[0][1] * k],
        [-m[1][0] * k, m[0][0] * k - 1.0],
    ])
}

/// Normalized fluctuation matrix at probe detuning `probe` (units of kappa).
pub fn system_matrix(op: &PumpOperatingPoint, probe: f64) -> [[Complex64; 2]; 2] {
    let (d, y) = (op.delta, op.zeta_n());
    let pump = Complex64::from_polar(y, 2.0 * op.phase);
    [
        [0.5 + I * (-d - probe + 2.0 * y), I * pump],
        [-I * pump.conj(), 0.5 + I * (d - probe - 2.0 * y)],
    ]
}

/// `S = M^-1 - I` for the normalized engine.
pub fn scattering(op: &PumpOperatingPoint, probe: f64) -> Result<ScatterMatrix> {
    let s = invert(system_matrix(op, probe), 1.0, DET_THRESHOLD)?;
    Ok(ScatterMatrix {
        s,
        probe_detuning: probe,
    })
}

/// `S = kappa M^-1 - I` for the single-junction displaced-frame engine.
/// `omega` is the fluctuation frequency in rad/s.
pub fn single_jj_scattering(frame: &DisplacedFrame, kappa: f64, omega: f64) -> Result<ScatterMatrix> {
    let (d0, lam) = (frame.delta0, frame.lambda1);
    let m = [
        [kappa / 2.0 - I * (omega + d0), I * lam],
        [-I * lam.conj(), kappa / 2.0 + I * (omega - d0)],
    ];
    let s = invert(m, kappa, DET_THRESHOLD * kappa * kappa)?;
    Ok(ScatterMatrix {
        s,
        probe_detuning: omega / kappa,
    })
}

/// Displaced frame whose single-junction matrix equals the normalized
/// matrix of `op` at `probe`, scaled by `kappa`.
///
/// The two printed matrices coincide under `omega/kappa = delta - 2 zeta n`,
/// `Delta_0/kappa = Delta` and `lambda_1/kappa = zeta n e^{2 i phi}`.
pub fn equivalent_frame(op: &PumpOperatingPoint, probe: f64, kappa: f64) -> (DisplacedFrame, f64) {
    let pump = Complex64::from_polar(op.zeta_n() * kappa, 2.0 * op.phase);
    let frame = DisplacedFrame {
        delta0: probe * kappa,
        lambda1: pump,
        mu0: pump,
    };
    (frame, (op.delta - 2.0 * op.zeta_n()) * kappa)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainPoint {
    /// Probe detuning (units of kappa) or frequency (GHz), per the curve.
    pub x: f64,
    pub signal_gain_db: f64,
    pub idler_gain_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeGain {
    pub mode_index: usize,
    pub freq_ghz: f64,
    pub delta: f64,
    pub zeta: f64,
    pub signal_gain_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainCurve {
    pub points: Vec<GainPoint>,
    #[serde(skip)]
    pub operating_point: Option<PumpOperatingPoint>,
    pub architecture: String,
    /// Per-mode traces when the curve is a comb superposition.
    pub modes: Vec<ModeGain>,
}

impl GainCurve {
    pub fn peak(&self) -> Option<GainPoint> {
        self.points
            .iter()
            .copied()
            .max_by(|a, b| a.signal_gain_db.total_cmp(&b.signal_gain_db))
    }

    /// Gain bands: maximal runs of points whose signal gain exceeds
    /// `min_db`, each reported by its highest point. The two lobes that a
    /// detuned mode shows at `+-Delta` belong to the same band.
    pub fn gain_bands(&self, min_db: f64) -> Vec<GainPoint> {
        let mut bands = vec![];
        let mut current: Option<GainPoint> = None;
        for p in &self.points {
            if p.signal_gain_db > min_db {
                current = Some(match current {
                    Some(c) if c.signal_gain_db >= p.signal_gain_db => c,
                    _ => *p,
                });
            } else if let Some(c) = current.take() {
                bands.push(c);
            }
        }
        bands.extend(current);
        bands
    }
}

/// Gain spectrum of one operating point over normalized probe detunings.
pub fn gain_curve(op: &PumpOperatingPoint, probes: &[f64], architecture: &str) -> Result<GainCurve> {
    if !op.is_stable() {
        return Err(Error::UnstableOperatingPoint { n: op.n });
    }
    let points = probes
        .par_iter()
        .map(|&x| {
            let s = scattering(op, x)?;
            Ok(GainPoint {
                x,
                signal_gain_db: s.signal_gain_db(),
                idler_gain_db: s.idler_gain_db(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GainCurve {
        points,
        operating_point: Some(*op),
        architecture: architecture.to_string(),
        modes: vec![],
    })
}

/// One mode of a comb: its own normalized pump point and frequency map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CombMode {
    pub mode_index: usize,
    /// Mode frequency (rad/s).
    pub omega: f64,
    /// Coupling rate of this mode (rad/s).
    pub kappa: f64,
    /// Relative Kerr participation.
    pub weight: f64,
    pub delta: f64,
    pub zeta: f64,
}

impl CombMode {
    pub fn pump_freq(&self) -> f64 {
        self.omega + self.delta * self.kappa
    }
}

/// Superposed comb response on a frequency grid (rad/s).
///
/// Each mode contributes its excess gain `|s11|^2 - 1`; the envelope is
/// `10 log10(1 + sum of excesses)`, and the idler likewise sums `|s12|^2`.
pub fn comb_spectrum(modes: &[CombMode], freqs: &[f64], policy: BranchPolicy, architecture: &str) -> Result<GainCurve> {
    let mut traces = Vec::with_capacity(modes.len());
    for m in modes {
        let pts = pump::steady_state(m.delta, m.zeta);
        let op = pump::select_branch(&pts, policy)?;
        let gains = freqs
            .par_iter()
            .map(|&w| {
                let s = scattering(&op, (w - m.pump_freq()) / m.kappa)?;
                Ok((s.signal_gain(), s.idler_gain()))
            })
            .collect::<Result<Vec<_>>>()?;
        traces.push((m, gains));
    }
    let points = freqs
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let excess: f64 = traces.iter().map(|t| t.1[k].0 - 1.0).sum();
            let idler: f64 = traces.iter().map(|t| t.1[k].1).sum();
            GainPoint {
                x: crate::units::rad_to_ghz(w),
                signal_gain_db: 10.0 * (1.0 + excess).log10(),
                idler_gain_db: 10.0 * idler.log10(),
            }
        })
        .collect();
    let modes = traces
        .iter()
        .map(|(m, g)| ModeGain {
            mode_index: m.mode_index,
            freq_ghz: crate::units::rad_to_ghz(m.omega),
            delta: m.delta,
            zeta: m.zeta,
            signal_gain_db: g.iter().map(|v| 10.0 * v.0.log10()).collect(),
        })
        .collect();
    Ok(GainCurve {
        points,
        operating_point: None,
        architecture: architecture.to_string(),
        modes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReflectionPoint {
    /// Probe frequency (GHz).
    pub freq_ghz: f64,
    pub magnitude: f64,
    /// `arg(-s11)`: zero off resonance, pi on resonance.
    pub phase: f64,
}

/// Pump-off reflection of a single mode at `omega_eff` with coupling `kappa`.
pub fn linear_response(omega_eff: f64, kappa: f64, freqs: &[f64]) -> Vec<ReflectionPoint> {
    let frame = DisplacedFrame {
        delta0: 0.0,
        lambda1: Complex64::new(0.0, 0.0),
        mu0: Complex64::new(0.0, 0.0),
    };
    freqs
        .iter()
        .map(|&w| {
            // lambda1 = 0 keeps det M away from zero for every omega.
            let s = single_jj_scattering(&frame, kappa, w - omega_eff).expect("pump-off matrix is regular");
            ReflectionPoint {
                freq_ghz: crate::units::rad_to_ghz(w),
                magnitude: s.s11().norm(),
                phase: (-s.s11()).arg(),
            }
        })
        .collect()
}

/// Total phase advance along a trace, summing wrapped increments.
pub fn phase_winding(trace: &[ReflectionPoint]) -> f64 {
    use std::f64::consts::{PI, TAU};
    trace
        .windows(2)
        .map(|w| (w[1].phase - w[0].phase + PI).rem_euclid(TAU) - PI)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompressionPoint {
    /// Normalized signal strength `K F_s / kappa^2` added to the pump.
    pub signal_zeta: f64,
    pub gain_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Compression {
    pub reference_gain_db: f64,
    pub curve: Vec<CompressionPoint>,
    /// Signal strength at which the gain is 1 dB below the reference, or
    /// `None` when the gain never compresses in range.
    pub p1db_zeta: Option<f64>,
}

/// Small-signal gain at `probe` with the signal flux added to the pump flux.
pub fn total_flux_gain(delta: f64, pump_zeta: f64, signal_zeta: f64, probe: f64, policy: BranchPolicy) -> Result<f64> {
    let pts = pump::steady_state(delta, pump_zeta + signal_zeta);
    let op = pump::select_branch(&pts, policy)?;
    Ok(scattering(&op, probe)?.signal_gain_db())
}

/// Total-flux compression scan over signal strengths (ascending).
///
/// The reference gain is taken at the first entry; the 1 dB point is
/// bracketed on the grid and refined by bisection in log signal power
/// to 0.01 dB.
pub fn compression(delta: f64, pump_zeta: f64, probe: f64, signal_zetas: &[f64], policy: BranchPolicy) -> Result<Compression> {
    let gain = |z: f64| total_flux_gain(delta, pump_zeta, z, probe, policy);
    let curve = signal_zetas
        .par_iter()
        .map(|&z| {
            Ok(CompressionPoint {
                signal_zeta: z,
                gain_db: gain(z)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let reference = curve.first().ok_or_else(|| Error::invalid("signal_powers", "empty"))?.gain_db;
    let target = reference - 1.0;
    let p1db_zeta = match curve.iter().position(|p| p.gain_db <= target) {
        None | Some(0) => None,
        Some(k) => {
            let (mut lo, mut hi) = (curve[k - 1].signal_zeta.abs().ln(), curve[k].signal_zeta.abs().ln());
            let sign = curve[k].signal_zeta.signum();
            let step = 0.01 / 10.0 * std::f64::consts::LN_10;
            while hi - lo > step {
                let mid = 0.5 * (lo + hi);
                if gain(sign * mid.exp())? <= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Some(sign * (0.5 * (lo + hi)).exp())
        }
    };
    Ok(Compression {
        reference_gain_db: reference,
        curve,
        p1db_zeta,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub zeta: f64,
    pub bistable: bool,
    /// Present when the selected branch is stable.
    pub curve: Option<GainCurve>,
    pub diagnostic: Option<String>,
}

impl SweepEntry {
    pub fn peak_gain_db(&self) -> Option<f64> {
        self.curve.as_ref()?.peak().map(|p| p.signal_gain_db)
    }
}

/// One gain spectrum per pump strength; bistable or failing drives are
/// flagged rather than dropped.
pub fn pump_drive_sweep(delta: f64, pump_phase: f64, zetas: &[f64], probes: &[f64], policy: BranchPolicy, architecture: &str) -> Vec<SweepEntry> {
    zetas
        .par_iter()
        .map(|&zeta| {
            let pts = pump::steady_state_with_phase(delta, zeta, pump_phase);
            let bistable = pts.len() >= 3;
            let result = pump::select_branch(&pts, policy).and_then(|op| gain_curve(&op, probes, architecture));
            match result {
                Ok(curve) => SweepEntry {
                    zeta,
                    bistable,
                    curve: Some(curve),
                    diagnostic: None,
                },
                Err(e) => SweepEntry {
                    zeta,
                    bistable,
                    curve: None,
                    diagnostic: Some(e.to_string()),
                },
            }
        })
        .collect()
}
