//! Physical constants and lab-unit conversions.

use std::f64::consts::TAU;

/// Reduced Planck constant (J s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge (C), exact in SI.
pub const E_CHARGE: f64 = 1.602_176_634e-19;

pub const FEMTO: f64 = 1e-15;
pub const PICO: f64 = 1e-12;
pub const MICRO: f64 = 1e-6;
pub const GIGA: f64 = 1e9;

/// Ordinary frequency in GHz to angular frequency in rad/s.
pub fn ghz_to_rad(f_ghz: f64) -> f64 {
    TAU * f_ghz * GIGA
}

pub fn rad_to_ghz(omega: f64) -> f64 {
    omega / (TAU * GIGA)
}

pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    10f64.powf(p_dbm / 10.0) * 1e-3
}

pub fn watts_to_dbm(p_w: f64) -> f64 {
    10.0 * (p_w / 1e-3).log10()
}

/// Photon flux (photons/s) carried by power `p_w` at angular frequency `omega`.
pub fn watts_to_flux(p_w: f64, omega: f64) -> f64 {
    p_w / (HBAR * omega)
}

pub fn flux_to_watts(flux: f64, omega: f64) -> f64 {
    flux * HBAR * omega
}

pub fn dbm_to_flux(p_dbm: f64, omega: f64) -> f64 {
    watts_to_flux(dbm_to_watts(p_dbm), omega)
}

pub fn flux_to_dbm(flux: f64, omega: f64) -> f64 {
    watts_to_dbm(flux_to_watts(flux, omega))
}

/// Charging energy e^2/2C expressed as an angular frequency.
pub fn charging_energy(capacitance: f64) -> f64 {
    E_CHARGE * E_CHARGE / (2.0 * capacitance * HBAR)
}

/// Capacitance whose charging energy (rad/s) is `e_c`.
pub fn capacitance_from_charging(e_c: f64) -> f64 {
    E_CHARGE * E_CHARGE / (2.0 * e_c * HBAR)
}

/// Josephson energy (Phi0/2pi)^2 / L expressed as an angular frequency.
pub fn josephson_energy(inductance: f64) -> f64 {
    HBAR / (4.0 * E_CHARGE * E_CHARGE * inductance)
}

pub fn inductance_from_josephson(e_j: f64) -> f64 {
    HBAR / (4.0 * E_CHARGE * E_CHARGE * e_j)
}

/// Power gain in dB from a complex amplitude ratio.
pub fn power_db(amplitude: f64) -> f64 {
    10.0 * (amplitude * amplitude).log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charging_and_josephson_energies_reproduce_lc_frequency() {
        let c = 500.0 * FEMTO;
        let l = 1.0e-9;
        let ec = charging_energy(c);
        let ej = josephson_energy(l);
        let w_lc = 1.0 / (l * c).sqrt();
        assert!(((8.0 * ec * ej).sqrt() / w_lc - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conversions_invert() {
        let c = 37.0 * FEMTO;
        assert!((capacitance_from_charging(charging_energy(c)) / c - 1.0).abs() < 1e-14);
        let l = 120.0 * PICO;
        assert!((inductance_from_josephson(josephson_energy(l)) / l - 1.0).abs() < 1e-14);
        assert!((rad_to_ghz(ghz_to_rad(7.24)) - 7.24).abs() < 1e-14);
    }
}
