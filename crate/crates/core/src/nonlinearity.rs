//! Kerr coefficients, bare frequencies and the displaced-frame parameters of
//! a pumped single junction.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::model::{Architecture, JunctionSpec};
use crate::units;

/// Secondary junctions per modified-BJPA cell (two Quartons of four).
pub const BJPA_SECONDARY_PER_CELL: usize = 8;

/// Which printed formula (and therefore which sign) a Kerr value follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConvention {
    /// Lambda = -E_c / 2 in the (a + a^dag)^4 / 6 expansion.
    SingleJunctionLambda,
    /// K = +E_c / 3N in the Langevin equation of a series array.
    ArrayLangevin,
    /// K = -E_c (1 - alpha_c) / 6NM for a Quarton array.
    QuartonLangevin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrSpec {
    pub kerr: f64,
    pub sign_convention: SignConvention,
    pub source_arch: &'static str,
}

impl KerrSpec {
    pub fn is_zero(&self) -> bool {
        self.kerr == 0.0
    }
}

/// `sqrt(8 E_c E_J)`.
pub fn bare_frequency(junction: &JunctionSpec) -> f64 {
    (8.0 * junction.e_c * junction.e_j).sqrt()
}

/// Quarton-array Kerr coefficient `-E_c (1/M - alpha_c/M) / 6N`.
pub fn quarton_kerr(e_c: f64, n: usize, m: usize, alpha_c: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    -e_c * (1.0 - alpha_c) / (6.0 * n * m)
}

pub fn array_kerr(e_c: f64, n: usize) -> f64 {
    e_c / (3.0 * n as f64)
}

pub fn kerr_coefficient(architecture: &Architecture) -> KerrSpec {
    let source_arch = architecture.tag();
    let (kerr, sign_convention) = match architecture {
        Architecture::SingleJunction { junction } => {
            (-junction.e_c / 2.0, SignConvention::SingleJunctionLambda)
        }
        Architecture::SeriesArray { n, junction, .. } => {
            (array_kerr(junction.e_c, *n), SignConvention::ArrayLangevin)
        }
        Architecture::Blochnium {
            n_quartons,
            m_slaves,
            alpha_c,
            slave_junction,
            ..
        } => (
            quarton_kerr(slave_junction.e_c, *n_quartons, *m_slaves, *alpha_c),
            SignConvention::QuartonLangevin,
        ),
        Architecture::ModifiedBjpa(cell) => {
            let m = BJPA_SECONDARY_PER_CELL;
            let alpha_c = m as f64 * cell.e_jm / cell.e_js;
            let e_c = units::charging_energy(cell.c_j);
            (
                quarton_kerr(e_c, cell.n_primary * cell.n_cells, m, alpha_c),
                SignConvention::QuartonLangevin,
            )
        }
    };
    KerrSpec {
        kerr,
        sign_convention,
        source_arch,
    }
}

/// Flux-tuned junction inductance `L_J0 / cos(phase)`.
pub fn tuned_inductance(l_j0: f64, phase: f64) -> Result<f64> {
    if !(phase.abs() < FRAC_PI_2) {
        return Err(Error::PhaseDomain { phase });
    }
    Ok(l_j0 / phase.cos())
}

/// Single-junction Hamiltonian in the frame displaced by the pump condensate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacedFrame {
    /// Shifted detuning `omega_0 + 4|alpha|^2 Lambda - omega_p`.
    pub delta0: f64,
    /// Parametric pump strength `2 alpha^2 Lambda`.
    pub lambda1: Complex64,
    /// Cubic correction coefficient as printed (`2 alpha^2 Lambda`); it is
    /// carried for inspection only and never enters the gain.
    pub mu0: Complex64,
}

pub fn displaced_frame(alpha: Complex64, junction: &JunctionSpec, pump_freq: f64) -> DisplacedFrame {
    let lambda = -junction.e_c / 2.0;
    let omega0 = bare_frequency(junction);
    let pump_term = 2.0 * alpha * alpha * lambda;
    DisplacedFrame {
        delta0: omega0 + 4.0 * alpha.norm_sqr() * lambda - pump_freq,
        lambda1: pump_term,
        mu0: pump_term,
    }
}
