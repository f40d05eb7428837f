//! Adaptive Dormand-Prince 5(4) for a complex scalar ODE, sampled on a
//! prescribed time grid.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rtol: 1e-10, atol: 1e-12 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns `y` at every entry
/// of `samples` (ascending, each `>= t0`). Steps are clipped so that every
/// sample time is hit exactly.
///
/// `limit` aborts with [`Error::Divergence`] once `|y|` exceeds it.
pub fn integrate<F>(f: F, t0: f64, y0: Complex64, samples: &[f64], tol: Tolerance, limit: f64) -> Result<(Vec<Complex64>, Stats)>
where
    F: Fn(f64, Complex64) -> Complex64,
{
    let mut out = Vec::with_capacity(samples.len());
    let mut stats = Stats::default();
    let (mut t, mut y) = (t0, y0);
    let mut k1 = f(t, y);
    let span = samples.last().map_or(0.0, |s| s - t0);
    let mut h = (span * 1e-3).clamp(1e-6, 1e-2);
    let mut k = [Complex64::new(0.0, 0.0); 7];
    for &target in samples {
        while t < target {
            let last = t + h >= target;
            let step = if last { target - t } else { h };
            if step <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepUnderflow { time: t });
            }
            k[0] = k1;
            for s in 1..7 {
                let mut acc = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += *kj * (A[s][j] * step);
                }
                k[s] = f(t + C[s] * step, acc);
            }
            let mut y_new = y;
            for (j, kj) in k.iter().enumerate().take(6) {
                y_new += *kj * (A[6][j] * step);
            }
            let mut err = Complex64::new(0.0, 0.0);
            for (e, kj) in E.iter().zip(&k) {
                err += *kj * (e * step);
            }
            let scale = tol.atol + tol.rtol * y.norm().max(y_new.norm());
            let ratio = err.norm() / scale;
            if ratio <= 1.0 {
                t = if last { target } else { t + step };
                y = y_new;
                k1 = k[6];
                stats.accepted += 1;
                if !(y.norm() <= limit) {
                    return Err(Error::Divergence { time: t, amplitude: y.norm() });
                }
                let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
                // Keep the free step size when only clipped to the sample.
                if !last || step >= h {
                    h = step * grow;
                }
            } else {
                stats.rejected += 1;
                h = step * (0.9 * ratio.powf(-0.2)).max(0.1);
            }
        }
        out.push(y);
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_with_rotation() {
        let lam = Complex64::new(-0.5, 3.0);
        let ts: Vec<f64> = (1..=100).map(|i| i as f64 * 0.2).collect();
        let (ys, stats) = integrate(|_, y| lam * y, 0.0, Complex64::new(1.0, 0.5), &ts, Tolerance::default(), 1e9).unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            let exact = Complex64::new(1.0, 0.5) * (lam * t).exp();
            assert!((y - exact).norm() < 1e-8, "{t}");
        }
        assert!(stats.accepted > 0);
    }

    #[test]
    fn forced_oscillator_reaches_steady_state() {
        let ts = [40.0];
        let (ys, _) = integrate(|_, y| -0.5 * y + 1.0, 0.0, Complex64::new(0.0, 0.0), &ts, Tolerance::default(), 1e9).unwrap();
        assert!((ys[0] - 2.0).norm() < 1e-8);
    }

    #[test]
    fn divergence_is_caught() {
        let r = integrate(|_, y| y * y, 0.0, Complex64::new(1.0, 0.0), &[2.0], Tolerance::default(), 1e6);
        assert!(matches!(r, Err(Error::Divergence { .. }) | Err(Error::StepUnderflow { .. })));
    }

    #[test]
    fn sample_times_are_hit_exactly() {
        // y' = 1 is integrated exactly, so any drift would come from time bookkeeping.
        let ts: Vec<f64> = (0..50).map(|i| 0.37 * i as f64).collect();
        let (ys, _) = integrate(|_, _| Complex64::new(1.0, 0.0), 0.0, Complex64::new(0.0, 0.0), &ts, Tolerance::default(), 1e9).unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert!((y.re - t).abs() < 1e-12);
        }
    }
}
