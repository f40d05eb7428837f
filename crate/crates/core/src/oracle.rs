//! Time-domain integration of the classical driven Kerr oscillator, used as
//! an independent check on the steady-state and gain engines.
//!
//! The equation is integrated in the pump frame and in normalized units,
//! `tau = kappa t` and `a = sqrt(F_p / kappa) b`:
//!
//! ```text
//! db/dtau = (i delta - 1/2 - i zeta |b|^2) b + sum_j A_j exp(-i Delta_j tau + i phi_j)
//! ```
//!
//! so a unit-amplitude resonant tone is the pump of strength `zeta`, and
//! `|b|^2` is directly the normalized photon number `n` of the steady-state
//! cubic. The output field is `b_out = b - b_in`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::ode::{self, Stats, Tolerance};
use crate::pump;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorParams {
    /// `(omega_p - omega_eff) / kappa`.
    pub delta: f64,
    /// `K F_p / kappa^2` for a unit-amplitude tone.
    pub zeta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tone {
    /// Amplitude relative to the pump (`sqrt` of the flux ratio).
    pub amplitude: f64,
    /// Detuning from the pump in units of kappa.
    pub detuning: f64,
    pub phase: f64,
}

impl Tone {
    pub fn pump(phase: f64) -> Self {
        Tone { amplitude: 1.0, detuning: 0.0, phase }
    }

    fn at(&self, tau: f64) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase - self.detuning * tau)
    }
}

/// Uniform sampling window after a transient; the endpoint is excluded so
/// a periodic record covers whole periods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Record {
    pub transient: f64,
    pub duration: f64,
    pub samples: usize,
}

impl Record {
    fn times(&self) -> Vec<f64> {
        let dt = self.duration / self.samples as f64;
        (0..self.samples).map(|k| self.transient + dt * k as f64).collect()
    }
}

/// Minimum record length accepted by [`integrate`] (units of 1/kappa).
pub const MIN_SPAN: f64 = 20.0;
/// Minimum number of beat periods for tone extraction.
pub const MIN_PERIODS: usize = 10;
pub const SAMPLES_PER_PERIOD: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Normalized times `kappa t`.
    pub tau: Vec<f64>,
    pub amplitude: Vec<Complex64>,
    pub input: Vec<Complex64>,
    /// Index of the first sample after the transient.
    pub transient_cut: usize,
    pub params: OscillatorParams,
    pub tones: Vec<Tone>,
    pub stats: Stats,
}

impl Trajectory {
    /// Times in seconds for a given coupling rate.
    pub fn times(&self, kappa: f64) -> Vec<f64> {
        self.tau.iter().map(|t| t / kappa).collect()
    }

    pub fn output(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.amplitude.iter().zip(&self.input).map(|(a, i)| a - i)
    }

    /// Complex amplitude of the `exp(-i detuning tau)` component of the
    /// output, averaged over the steady part of the record.
    pub fn project(&self, detuning: f64) -> Complex64 {
        let steady = &self.tau[self.transient_cut..];
        let sum: Complex64 = self
            .output()
            .skip(self.transient_cut)
            .zip(steady)
            .map(|(b, t)| b * Complex64::from_polar(1.0, detuning * t))
            .sum();
        sum / steady.len() as f64
    }

    /// Mean `|b|^2` over the steady part.
    pub fn mean_photons(&self) -> f64 {
        let tail = &self.amplitude[self.transient_cut..];
        tail.iter().map(|b| b.norm_sqr()).sum::<f64>() / tail.len() as f64
    }
}

/// Integrates from `b(0) = initial` and samples the window `record`.
pub fn integrate(params: OscillatorParams, tones: &[Tone], initial: Complex64, record: Record, tol: Tolerance) -> Result<Trajectory> {
    if record.transient + record.duration < MIN_SPAN {
        return Err(Error::invalid("t_span", format!("must cover at least {MIN_SPAN}/kappa")));
    }
    if record.samples == 0 {
        return Err(Error::invalid("samples", "must be positive"));
    }
    let drive: f64 = tones.iter().map(|t| t.amplitude.abs()).sum();
    let n_max = pump::steady_state(params.delta, params.zeta * drive * drive)
        .iter()
        .map(|p| p.n)
        .fold(0.0, f64::max);
    let limit = 1e6 * (n_max.sqrt() * drive.max(1e-300) + initial.norm());
    let OscillatorParams { delta, zeta } = params;
    let rhs = |tau: f64, b: Complex64| {
        let detune = Complex64::new(-0.5, delta - zeta * b.norm_sqr());
        let input: Complex64 = tones.iter().map(|t| t.at(tau)).sum();
        detune * b + input
    };
    let mut times = vec![];
    if record.transient > 0.0 {
        times.push(record.transient);
    }
    times.extend(record.times());
    times.dedup();
    let skip = times.len() - record.samples;
    let (mut amps, stats) = ode::integrate(rhs, 0.0, initial, &times, tol, limit)?;
    amps.drain(..skip);
    let tau = record.times();
    let input = tau.iter().map(|&t| tones.iter().map(|tone| tone.at(t)).sum()).collect();
    Ok(Trajectory {
        tau,
        amplitude: amps,
        input,
        transient_cut: 0,
        params,
        tones: tones.to_vec(),
        stats,
    })
}

/// Slowest relaxation rate (units of kappa) of the pump-only low branch.
pub fn relaxation_rate(params: OscillatorParams) -> f64 {
    let pts = pump::steady_state(params.delta, params.zeta);
    pts.iter()
        .filter(|p| p.is_stable())
        .map(|p| p.drift_eigenvalues.iter().map(|e| -e.re).fold(f64::INFINITY, f64::min))
        .fold(f64::INFINITY, f64::min)
        .min(0.5)
}

/// Transient length that damps the initial condition by about `e^-30`.
pub fn settle_time(params: OscillatorParams) -> f64 {
    let rate = relaxation_rate(params);
    if rate.is_finite() && rate > 0.0 {
        (30.0 / rate).max(MIN_SPAN)
    } else {
        MIN_SPAN * 50.0
    }
}

/// Steady `|b|^2` under the pump alone, started from rest.
pub fn steady_photon_number(params: OscillatorParams, tol: Tolerance) -> Result<f64> {
    let settle = settle_time(params);
    let record = Record { transient: settle, duration: 1.0, samples: 8 };
    let traj = integrate(params, &[Tone::pump(0.0)], Complex64::new(0.0, 0.0), record, tol)?;
    Ok(traj.mean_photons())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeResult {
    pub probe_detuning: f64,
    pub signal_gain: f64,
    pub idler_gain: f64,
}

impl ProbeResult {
    pub fn signal_gain_db(&self) -> f64 {
        10.0 * self.signal_gain.log10()
    }

    pub fn idler_gain_db(&self) -> f64 {
        10.0 * self.idler_gain.log10()
    }
}

/// Steady periodic record of pump plus probe over `periods` beat periods.
pub fn two_tone_record(params: OscillatorParams, pump: Tone, probe: Tone, periods: usize, tol: Tolerance) -> Result<Trajectory> {
    if periods < MIN_PERIODS {
        return Err(Error::InsufficientRecord { periods: periods as f64, required: MIN_PERIODS });
    }
    let beat = (probe.detuning - pump.detuning).abs();
    if beat == 0.0 {
        return Err(Error::invalid("probe_detuning", "probe must differ from the pump"));
    }
    let period = TAU / beat;
    // Whole number of beat periods for the transient keeps the phase of
    // the record independent of the settle estimate.
    let settle = (settle_time(params) / period).ceil() * period;
    let record = Record {
        transient: settle,
        duration: period * periods as f64,
        samples: SAMPLES_PER_PERIOD * periods,
    };
    integrate(params, &[pump, probe], Complex64::new(0.0, 0.0), record, tol)
}

fn gains(traj: &Trajectory, pump: &Tone, probe: &Tone) -> ProbeResult {
    let input = probe.amplitude * probe.amplitude;
    let idler_detuning = 2.0 * pump.detuning - probe.detuning;
    ProbeResult {
        probe_detuning: probe.detuning,
        signal_gain: traj.project(probe.detuning).norm_sqr() / input,
        idler_gain: traj.project(idler_detuning).norm_sqr() / input,
    }
}

/// Linear-response gain at the probe and its idler from a two-tone run.
pub fn probe_gain(params: OscillatorParams, pump: Tone, probe: Tone, periods: usize, tol: Tolerance) -> Result<ProbeResult> {
    if probe.amplitude.abs() > 1e-3 * pump.amplitude.abs() {
        return Err(Error::invalid("probe_amplitude", "must be at most 1e-3 of the pump amplitude"));
    }
    let traj = two_tone_record(params, pump, probe, periods, tol)?;
    Ok(gains(&traj, &pump, &probe))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OraclePoint {
    /// Probe-to-pump flux ratio.
    pub flux_ratio: f64,
    pub gain_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCompression {
    pub reference_gain_db: f64,
    pub curve: Vec<OraclePoint>,
    /// Flux ratio at the 1 dB point, interpolated in dB.
    pub p1db_flux_ratio: Option<f64>,
}

/// Full nonlinear two-tone compression measurement over probe-to-pump flux
/// ratios (ascending, spanning at least 30 dB).
pub fn p1db_oracle(params: OscillatorParams, pump_phase: f64, probe_detuning: f64, flux_ratios: &[f64], periods: usize, tol: Tolerance) -> Result<OracleCompression> {
    let (first, last) = match (flux_ratios.first(), flux_ratios.last()) {
        (Some(a), Some(b)) if *a > 0.0 => (*a, *b),
        _ => return Err(Error::invalid("probe_powers", "need positive, ascending flux ratios")),
    };
    if 10.0 * (last / first).log10() < 30.0 {
        return Err(Error::invalid("probe_powers", "must span at least 30 dB"));
    }
    let pump = Tone::pump(pump_phase);
    let curve = flux_ratios
        .par_iter()
        .map(|&r| {
            let probe = Tone { amplitude: r.sqrt(), detuning: probe_detuning, phase: 0.0 };
            let traj = two_tone_record(params, pump, probe, periods, tol)?;
            Ok(OraclePoint { flux_ratio: r, gain_db: gains(&traj, &pump, &probe).signal_gain_db() })
        })
        .collect::<Result<Vec<_>>>()?;
    let reference = curve[0].gain_db;
    let target = reference - 1.0;
    let p1db_flux_ratio = curve.iter().position(|p| p.gain_db <= target).filter(|&k| k > 0).map(|k| {
        let (a, b) = (&curve[k - 1], &curve[k]);
        let (xa, xb) = (a.flux_ratio.log10(), b.flux_ratio.log10());
        let s = (target - a.gain_db) / (b.gain_db - a.gain_db);
        10f64.powf(xa + s * (xb - xa))
    });
    Ok(OracleCompression { reference_gain_db: reference, curve, p1db_flux_ratio })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Harmonic {
    /// Pump multiplicity.
    pub m: i32,
    /// Probe multiplicity; `m + k = 1` for tones near the carrier.
    pub k: i32,
    pub order: u32,
    pub detuning: f64,
    /// Power relative to the first-order probe tone (dBc).
    pub power_db: f64,
}

/// Output powers at the mixing products `m delta_p + k delta_s` with
/// `m + k = 1` (the only ones a Kerr oscillator radiates near the carrier)
/// and `|m| + |k| <= max_order`.
pub fn harmonic_powers(traj: &Trajectory, pump_detuning: f64, probe_detuning: f64, max_order: u32) -> Vec<Harmonic> {
    let reference = traj.project(probe_detuning).norm_sqr();
    let reach = max_order as i32;
    (-reach..=reach)
        .filter_map(|k| {
            let m = 1 - k;
            let order = (m.unsigned_abs() + k.unsigned_abs()) as u32;
            (order <= max_order).then(|| {
                let detuning = m as f64 * pump_detuning + k as f64 * probe_detuning;
                let p = traj.project(detuning).norm_sqr();
                Harmonic { m, k, order, detuning, power_db: 10.0 * (p / reference).log10() }
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response;

    fn params(delta: f64, zeta: f64) -> OscillatorParams {
        OscillatorParams { delta, zeta }
    }

    #[test]
    fn linear_resonant_cavity_holds_four_photons() {
        let n = steady_photon_number(params(0.0, 0.0), Tolerance::default()).unwrap();
        assert!((n - 4.0).abs() < 1e-8, "{n}");
    }

    #[test]
    fn free_decay() {
        let b0 = Complex64::new(0.6, -0.8);
        let rec = Record { transient: 0.0, duration: 20.0, samples: 200 };
        let t = integrate(params(0.3, 0.0), &[], b0, rec, Tolerance::default()).unwrap();
        for (tau, b) in t.tau.iter().zip(&t.amplitude) {
            assert!((b.norm() - b0.norm() * (-tau / 2.0).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn short_span_is_rejected() {
        let rec = Record { transient: 1.0, duration: 2.0, samples: 10 };
        assert!(integrate(params(0.0, 0.0), &[], Complex64::new(1.0, 0.0), rec, Tolerance::default()).is_err());
    }

    #[test]
    fn matches_cubic_on_monostable_points() {
        for (d, z) in [(0.0, 0.3), (0.5, -0.4), (-1.0, 0.2), (1.2, 0.05)] {
            let expected = pump::steady_state(d, z);
            assert_eq!(expected.len(), 1);
            let n = steady_photon_number(params(d, z), Tolerance::default()).unwrap();
            assert!((n / expected[0].n - 1.0).abs() < 1e-6, "({d},{z}) {n} {}", expected[0].n);
        }
    }

    #[test]
    fn pump_off_probe_is_all_pass() {
        for det in [0.3, -1.1, 2.5] {
            let probe = Tone { amplitude: 1e-4, detuning: det, phase: 0.4 };
            let r = probe_gain(params(0.2, 0.0), Tone::pump(0.0), probe, 10, Tolerance::default()).unwrap();
            assert!(r.signal_gain_db().abs() < 0.01);
            assert!(r.idler_gain < 1e-16);
        }
    }

    #[test]
    fn probe_gain_matches_scattering() {
        let (d, z, det) = (0.6, 0.25, 0.2);
        let op = pump::steady_state(d, z)[0];
        let s = response::scattering(&op, det).unwrap();
        let probe = Tone { amplitude: 1e-4, detuning: det, phase: 0.0 };
        let r = probe_gain(params(d, z), Tone::pump(0.0), probe, 10, Tolerance::default()).unwrap();
        assert!((r.signal_gain / s.signal_gain() - 1.0).abs() < 0.01, "{} {}", r.signal_gain, s.signal_gain());
        assert!((r.idler_gain / s.idler_gain() - 1.0).abs() < 0.02);
    }

    #[test]
    fn record_length_is_enforced() {
        let probe = Tone { amplitude: 1e-4, detuning: 0.5, phase: 0.0 };
        let r = probe_gain(params(0.0, 0.1), Tone::pump(0.0), probe, 5, Tolerance::default());
        assert!(matches!(r, Err(Error::InsufficientRecord { .. })));
    }

    #[test]
    fn linear_cavity_has_no_mixing() {
        let probe = Tone { amplitude: 0.1, detuning: 0.4, phase: 0.0 };
        let t = two_tone_record(params(0.3, 0.0), Tone::pump(0.0), probe, 10, Tolerance::default()).unwrap();
        let h = harmonic_powers(&t, 0.0, 0.4, 5);
        for x in h.iter().filter(|h| h.order > 1) {
            assert!(x.power_db < -120.0, "{x:?}");
        }
    }

    #[test]
    fn intermod_grows_quadratically_with_probe() {
        let slope = |pump_scale: f64| {
            let power = |a: f64| {
                let pump = Tone { amplitude: pump_scale, detuning: 0.0, phase: 0.0 };
                let probe = Tone { amplitude: a, detuning: 0.7, phase: 0.0 };
                let t = two_tone_record(params(0.0, 1e-3), pump, probe, 10, Tolerance::default()).unwrap();
                10.0 * t.project(1.4).norm_sqr().log10()
            };
            (power(0.3) - power(0.03)) / 20.0
        };
        assert!((slope(1.0) - 2.0).abs() < 0.05);
    }

    #[test]
    fn weak_kerr_keeps_power_in_first_order() {
        let probe = Tone { amplitude: 0.01, detuning: 0.5, phase: 0.0 };
        let t = two_tone_record(params(0.2, 0.02), Tone::pump(0.0), probe, 10, Tolerance::default()).unwrap();
        let h = harmonic_powers(&t, 0.0, 0.5, 3);
        let third: Vec<_> = h.iter().filter(|x| x.order == 3).collect();
        assert_eq!(third.len(), 2);
        assert!(third.iter().all(|x| x.power_db < -10.0), "{third:?}");
    }
}
