//! Steady state of the driven Kerr oscillator.
//!
//! In normalized units the intracavity photon number `n` solves
//!
//! ```text
//! zeta^2 n^3 - 2 delta zeta n^2 + (delta^2 + 1/4) n - 1 = 0
//! ```
//!
//! with `delta = (omega_p - omega_eff) / kappa` and
//! `zeta = K |alpha_in|^2 / kappa^2`. Writing `y = zeta n` turns this into
//! `g(y) = y ((y - delta)^2 + 1/4) - zeta = 0`; every real root of `g` has the
//! sign of `zeta`, so every real root is a physical (positive) `n`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::nonlinearity::KerrSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpOperatingPoint {
    pub delta: f64,
    pub zeta: f64,
    pub n: f64,
    /// Phase of the intracavity amplitude (rad).
    pub phase: f64,
    pub stability: Stability,
    /// Position among the coexisting roots, ascending in `n`.
    pub branch: usize,
    /// Eigenvalues of the linearized drift matrix (units of kappa).
    pub drift_eigenvalues: [Complex64; 2],
}

impl PumpOperatingPoint {
    /// `zeta * n`, the normalized Kerr shift.
    pub fn zeta_n(&self) -> f64 {
        self.zeta * self.n
    }

    pub fn is_stable(&self) -> bool {
        self.stability == Stability::Stable
    }
}

/// `(delta, zeta)` from physical quantities; `kappa` and frequencies in rad/s.
pub fn normalize(kerr: &KerrSpec, kappa: f64, pump_flux: f64, pump_freq: f64, omega_eff: f64) -> (f64, f64) {
    let delta = (pump_freq - omega_eff) / kappa;
    let zeta = kerr.kerr * pump_flux / (kappa * kappa);
    (delta, zeta)
}

pub fn cubic_residual(delta: f64, zeta: f64, n: f64) -> f64 {
    ((zeta * zeta * n - 2.0 * delta * zeta) * n + delta * delta + 0.25) * n - 1.0
}

fn cubic_derivative(delta: f64, zeta: f64, n: f64) -> f64 {
    (3.0 * zeta * zeta * n - 4.0 * delta * zeta) * n + delta * delta + 0.25
}

/// Depressed-cubic coefficients `(p, q)` of `g(y)` after `y = t + 2 delta / 3`.
fn depressed(delta: f64, zeta: f64) -> (f64, f64) {
    let p = 0.25 - delta * delta / 3.0;
    let q = (2.0 * delta * delta * delta + 4.5 * delta) / 27.0 - zeta;
    (p, q)
}

/// Cubic discriminant in `y`; positive means three distinct real roots.
pub fn discriminant(delta: f64, zeta: f64) -> f64 {
    let (p, q) = depressed(delta, zeta);
    -(4.0 * p * p * p + 27.0 * q * q)
}

/// Relative width of the band treated as a double root.
const DEGENERATE_BAND: f64 = 1e-12;

pub fn is_bistable(delta: f64, zeta: f64) -> bool {
    zeta != 0.0 && discriminant(delta, zeta) > 0.0
}

fn real_roots_y(delta: f64, zeta: f64) -> Vec<f64> {
    let (p, q) = depressed(delta, zeta);
    let shift = 2.0 * delta / 3.0;
    let scale = 4.0 * p.abs().powi(3) + 27.0 * q * q;
    let disc = -(4.0 * p * p * p + 27.0 * q * q);
    if disc > -DEGENERATE_BAND * scale && p < 0.0 {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let mut roots: Vec<f64> = (0..3)
            .map(|k| r * (theta - TAU * k as f64 / 3.0).cos() + shift)
            .collect();
        roots.sort_by(f64::total_cmp);
        if disc <= DEGENERATE_BAND * scale {
            // Double root: merge the closest pair.
            let (i, _) = roots
                .windows(2)
                .map(|w| w[1] - w[0])
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            let merged = 0.5 * (roots[i] + roots[i + 1]);
            roots.splice(i..=i + 1, [merged]);
        }
        roots
    } else {
        let s = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
        let a = -q.signum() * (q.abs() / 2.0 + s).cbrt();
        let t = if a == 0.0 { 0.0 } else { a - p / (3.0 * a) };
        vec![t + shift]
    }
}

fn polish(delta: f64, zeta: f64, n0: f64) -> f64 {
    let mut best = n0;
    let mut best_res = cubic_residual(delta, zeta, n0).abs();
    let mut n = n0;
    for _ in 0..4 {
        let d = cubic_derivative(delta, zeta, n);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        n -= cubic_residual(delta, zeta, n) / d;
        let r = cubic_residual(delta, zeta, n).abs();
        if n > 0.0 && r < best_res {
            best = n;
            best_res = r;
        }
    }
    best
}

/// Eigenvalues of the linearized drift matrix at probe detuning zero.
pub fn drift_eigenvalues(delta: f64, zeta_n: f64) -> [Complex64; 2] {
    let y = zeta_n;
    let detuning = 2.0 * y - delta;
    let root = Complex64::new(y * y - detuning * detuning, 0.0).sqrt();
    [-(0.5 + root), -(0.5 - root)]
}

/// All positive real roots, ascending in `n`, with stability and phase.
pub fn steady_state(delta: f64, zeta: f64) -> Vec<PumpOperatingPoint> {
    steady_state_with_phase(delta, zeta, 0.0)
}

pub fn steady_state_with_phase(delta: f64, zeta: f64, pump_phase: f64) -> Vec<PumpOperatingPoint> {
    let mut ns: Vec<f64> = if zeta == 0.0 {
        vec![1.0 / (delta * delta + 0.25)]
    } else {
        real_roots_y(delta, zeta)
            .into_iter()
            .map(|y| polish(delta, zeta, y / zeta))
            .collect()
    };
    ns.sort_by(f64::total_cmp);
    ns.into_iter()
        .enumerate()
        .map(|(branch, n)| {
            let y = zeta * n;
            let drift = drift_eigenvalues(delta, y);
            let stable = drift.iter().all(|e| e.re < 0.0);
            PumpOperatingPoint {
                delta,
                zeta,
                n,
                phase: pump_phase + (delta - y).atan2(0.5),
                stability: if stable { Stability::Stable } else { Stability::Unstable },
                branch,
                drift_eigenvalues: drift,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchPolicy {
    /// Smallest stable root, as reached by ramping the pump up from zero.
    #[default]
    Low,
    High,
    /// Refuse to choose when the point is bistable.
    Error,
}

pub fn select_branch(points: &[PumpOperatingPoint], policy: BranchPolicy) -> Result<PumpOperatingPoint> {
    let stable: Vec<&PumpOperatingPoint> = points.iter().filter(|p| p.is_stable()).collect();
    let (Some(low), Some(high)) = (stable.first(), stable.last()) else {
        return match points.first() {
            Some(p) => Err(Error::UnstableOperatingPoint { n: p.n }),
            None => Err(Error::Numerical("no steady-state roots".into())),
        };
    };
    match policy {
        BranchPolicy::Low => Ok(**low),
        BranchPolicy::High => Ok(**high),
        BranchPolicy::Error if points.len() >= 3 => Err(Error::Bistable {
            n_low: low.n,
            n_high: high.n,
        }),
        BranchPolicy::Error => Ok(**low),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub delta: f64,
    /// Bistable zeta interval at this detuning (grid resolution).
    pub zeta_lo: f64,
    pub zeta_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BistabilityMap {
    pub boundary: Vec<BoundaryPoint>,
    /// Bistable point of smallest |zeta| (the cusp), refined by zooming.
    pub cusp: Option<(f64, f64)>,
    pub bistable_points: usize,
    pub total_points: usize,
}

fn grid(range: (f64, f64), resolution: usize) -> Vec<f64> {
    let step = (range.1 - range.0) / (resolution - 1) as f64;
    (0..resolution).map(|i| range.0 + step * i as f64).collect()
}

/// Scans a `(delta, zeta)` grid and classifies each point by the discriminant.
///
/// Columns are independent, so the scan is parallel; the result does not
/// depend on how columns are scheduled.
pub fn bistability_boundary(
    delta_range: (f64, f64),
    zeta_range: (f64, f64),
    resolution: usize,
) -> Result<BistabilityMap> {
    if resolution < 2 {
        return Err(Error::Resolution(resolution));
    }
    let deltas = grid(delta_range, resolution);
    let zetas = grid(zeta_range, resolution);
    let columns: Vec<(Option<BoundaryPoint>, usize, Option<(f64, f64)>)> = deltas
        .par_iter()
        .map(|&d| scan_column(d, &zetas))
        .collect();
    let bistable_points = columns.iter().map(|c| c.1).sum();
    let boundary = columns.iter().filter_map(|c| c.0).collect();
    let mut cusp = min_abs_zeta(columns.iter().filter_map(|c| c.2));
    if let Some(c) = cusp {
        cusp = Some(refine_cusp(c, (deltas[1] - deltas[0]).abs(), (zetas[1] - zetas[0]).abs(), resolution));
    }
    Ok(BistabilityMap {
        boundary,
        cusp,
        bistable_points,
        total_points: resolution * resolution,
    })
}

fn scan_column(delta: f64, zetas: &[f64]) -> (Option<BoundaryPoint>, usize, Option<(f64, f64)>) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut count = 0;
    let mut best: Option<(f64, f64)> = None;
    for &z in zetas {
        if is_bistable(delta, z) {
            count += 1;
            lo = lo.min(z);
            hi = hi.max(z);
            if best.map_or(true, |b| z.abs() < b.1.abs()) {
                best = Some((delta, z));
            }
        }
    }
    let point = (count > 0).then_some(BoundaryPoint {
        delta,
        zeta_lo: lo,
        zeta_hi: hi,
    });
    (point, count, best)
}

fn min_abs_zeta(points: impl Iterator<Item = (f64, f64)>) -> Option<(f64, f64)> {
    points.min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(a.0.abs().total_cmp(&b.0.abs())))
}

/// Re-scans shrinking windows around the coarse minimum. The bistable wedge
/// opens away from the origin, so each window extends mostly toward smaller
/// |delta| and |zeta|.
fn refine_cusp(start: (f64, f64), d_step: f64, z_step: f64, resolution: usize) -> (f64, f64) {
    let mut best = start;
    let (mut dd, mut dz) = (d_step, z_step);
    for _ in 0..2 {
        let (sd, sz) = (best.0.signum(), best.1.signum());
        let d_range = (best.0 - sd * 12.0 * dd, best.0 + sd * 2.0 * dd);
        let z_range = (best.1 - sz * 12.0 * dz, best.1 + sz * 2.0 * dz);
        let deltas = grid(d_range, resolution);
        let zetas = grid(z_range, resolution);
        let found = min_abs_zeta(deltas.par_iter().filter_map(|&d| scan_column(d, &zetas).2).collect::<Vec<_>>().into_iter());
        match found {
            Some(p) if p.1.abs() <= best.1.abs() => best = p,
            _ => break,
        }
        dd = (d_range.1 - d_range.0).abs() / (resolution - 1) as f64;
        dz = (z_range.1 - z_range.0).abs() / (resolution - 1) as f64;
    }
    best
}

/// Exact cusp of the bifurcation set: `|delta*| = sqrt(3)/2`, `|zeta*| = 1/sqrt(27)`.
pub fn exact_cusp() -> (f64, f64) {
    (3f64.sqrt() / 2.0, 1.0 / 27f64.sqrt())
}

#[allow(dead_code)]
fn wrap_phase(phi: f64) -> f64 {
    (phi + PI).rem_euclid(TAU) - PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::{KerrSpec, SignConvention};
    use proptest::prelude::*;

    /// Brute-force oracle: sign changes of the cubic on a fine log grid,
    /// refined by bisection.
    fn scan_roots(delta: f64, zeta: f64, n_max: f64) -> Vec<f64> {
        let pts = 400_000;
        let (lo, hi) = (1e-6f64.ln(), n_max.ln());
        let xs: Vec<f64> = (0..=pts).map(|i| (lo + (hi - lo) * i as f64 / pts as f64).exp()).collect();
        let mut roots = vec![];
        for w in xs.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            let (fa, fb) = (cubic_residual(delta, zeta, a), cubic_residual(delta, zeta, b));
            if fa == 0.0 {
                roots.push(a);
                continue;
            }
            if fa.signum() == fb.signum() {
                continue;
            }
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if cubic_residual(delta, zeta, m).signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        roots
    }

    #[test]
    fn linear_cavity_at_resonance() {
        let pts = steady_state(0.0, 0.0);
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].n, 4.0);
        assert!(pts[0].is_stable());
    }

    #[test]
    fn roots_match_brute_force_scan() {
        for (d, z) in [(2.0, 1.0), (-2.0, -1.0), (2.0, 0.3), (2.0, -1.0), (1.5, 0.25), (-3.0, 0.05), (0.3, -0.7)] {
            let fast: Vec<f64> = steady_state(d, z).iter().map(|p| p.n).collect();
            let slow = scan_roots(d, z, 1e4);
            assert_eq!(fast.len(), slow.len(), "({d},{z}) {fast:?} vs {slow:?}");
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-9 * b.max(1.0), "({d},{z}) {a} vs {b}");
            }
        }
    }

    #[test]
    fn three_roots_middle_unstable() {
        // delta * zeta > 0 past the cusp.
        let pts = steady_state(2.0, 0.8);
        assert_eq!(pts.len(), 3);
        assert!(pts[0].is_stable());
        assert!(!pts[1].is_stable());
        assert!(pts[2].is_stable());
        assert_eq!(pts.iter().map(|p| p.branch).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn cusp_roots_coincide() {
        for (d, z) in [(0.8660, 0.19245), (-0.8660, -0.19245)] {
            let pts = steady_state(d, z);
            let ns: Vec<f64> = pts.iter().map(|p| p.n).collect();
            let spread = ns.iter().cloned().fold(f64::MIN, f64::max) - ns.iter().cloned().fold(f64::MAX, f64::min);
            assert!(spread < 1e-3 * ns[0].max(1.0) || ns.len() == 1, "{ns:?}");
            for n in ns {
                assert!(cubic_residual(d, z, n).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn opposite_signs_are_monostable() {
        for d in [1.0, 3.0, 10.0] {
            for z in [-0.01, -0.2, -2.0] {
                assert!(!is_bistable(d, z));
                assert!(!is_bistable(-d, -z));
                assert_eq!(steady_state(d, z).len(), 1);
            }
        }
        assert!(!is_bistable(5.0, 0.0));
    }

    #[test]
    fn phase_of_linear_cavity() {
        let p = steady_state_with_phase(0.0, 0.0, 0.3)[0];
        assert!((p.phase - 0.3).abs() < 1e-15);
        let p = steady_state(0.5, 0.0)[0];
        assert!((p.phase - 1f64.atan()).abs() < 1e-15);
    }

    #[test]
    fn normalize_cases() {
        let k = KerrSpec { kerr: -3.0, sign_convention: SignConvention::QuartonLangevin, source_arch: "blochnium" };
        assert_eq!(normalize(&k, 2.0, 5.0, 7.0, 7.0), (0.0, -3.75));
        assert_eq!(normalize(&k, 2.0, 0.0, 9.0, 7.0), (1.0, 0.0));
    }

    #[test]
    fn branch_policies() {
        let single = steady_state(0.0, 0.1);
        for policy in [BranchPolicy::Low, BranchPolicy::High, BranchPolicy::Error] {
            assert_eq!(select_branch(&single, policy).unwrap(), single[0]);
        }
        let three = steady_state(2.0, 0.8);
        assert_eq!(select_branch(&three, BranchPolicy::Low).unwrap().n, three[0].n);
        assert_eq!(select_branch(&three, BranchPolicy::High).unwrap().n, three[2].n);
        match select_branch(&three, BranchPolicy::Error) {
            Err(Error::Bistable { n_low, n_high }) => {
                assert_eq!(n_low, three[0].n);
                assert_eq!(n_high, three[2].n);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scan_finds_the_cusp() {
        let map = bistability_boundary((0.0, 2.0), (-0.5, 0.5), 2000).unwrap();
        let (d, z) = map.cusp.unwrap();
        let (d_star, z_star) = exact_cusp();
        assert!((d.abs() - d_star).abs() < 1e-3, "{d}");
        assert!((z.abs() - z_star).abs() < 1e-3, "{z}");
        assert!(map.boundary.iter().all(|b| b.zeta_lo > 0.0));
    }

    #[test]
    fn scan_rejects_bad_resolution() {
        assert!(matches!(bistability_boundary((0.0, 1.0), (0.0, 1.0), 1), Err(Error::Resolution(1))));
    }

    #[test]
    fn zeta_zero_row_is_monostable() {
        let map = bistability_boundary((-3.0, 3.0), (0.0, 0.0), 50).unwrap();
        assert_eq!(map.bistable_points, 0);
        assert!(map.cusp.is_none());
    }

    proptest! {
        #[test]
        fn residual_and_root_count(d in -4.0f64..4.0, z in -2.0f64..2.0) {
            let pts = steady_state(d, z);
            prop_assert!(matches!(pts.len(), 1..=3));
            for p in &pts {
                prop_assert!(p.n > 0.0);
                prop_assert!(cubic_residual(d, z, p.n).abs() <= 1e-10, "res {}", cubic_residual(d, z, p.n));
            }
            if pts.len() == 3 {
                prop_assert!(pts[1].stability == Stability::Unstable);
            }
        }

        #[test]
        fn weak_nonlinearity_limit(d in -4.0f64..4.0, z in -1e-6f64..1e-6) {
            let n = steady_state(d, z)[0].n;
            let linear = 1.0 / (d * d + 0.25);
            prop_assert!((n / linear - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn discriminant_agrees_with_root_counting() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 10_000 {
            let d: f64 = rng.gen_range(-4.0..4.0);
            let z: f64 = rng.gen_range(-1.5..1.5);
            let disc = discriminant(d, z);
            let (p, q) = depressed(d, z);
            if disc.abs() < 1e-9 * (4.0 * p.abs().powi(3) + 27.0 * q * q) {
                continue;
            }
            let count = steady_state(d, z).len();
            assert_eq!(count == 3, is_bistable(d, z), "({d},{z})");
            checked += 1;
        }
    }
}
