//! Physical constants (CODATA 2018) and boundary unit conversions.
//!
//! Everything inside the crate is SI. Public entry points that take µm, nm,
//! °C or ps²/m convert through the helpers here.

use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Room temperature of the bundled MgO:LN model, °C.
pub const ROOM_TEMPERATURE_C: f64 = 24.5;

pub const UM: f64 = 1e-6;
pub const NM: f64 = 1e-9;
pub const MM: f64 = 1e-3;
pub const PM_PER_V: f64 = 1e-12;
/// 1 ps²/m in s²/m.
pub const PS2_PER_M: f64 = 1e-24;
pub const THZ: f64 = 1e12;

/// Vacuum wavelength (µm) to angular frequency (rad/s).
pub fn omega_from_um(lambda_um: f64) -> f64 {
    2.0 * PI * C / (lambda_um * UM)
}

/// Angular frequency (rad/s) to vacuum wavelength (µm).
pub fn um_from_omega(omega: f64) -> f64 {
    2.0 * PI * C / omega / UM
}

/// Angular frequency (rad/s) to linear frequency (THz).
pub fn thz_from_omega(omega: f64) -> f64 {
    omega / (2.0 * PI) / THZ
}

pub fn omega_from_thz(f_thz: f64) -> f64 {
    2.0 * PI * f_thz * THZ
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavelength_frequency_round_trip() {
        let w = omega_from_um(1.55);
        assert!((um_from_omega(w) - 1.55).abs() < 1e-14);
        assert!((thz_from_omega(w) - 193.414_489).abs() < 1e-5);
    }
}
