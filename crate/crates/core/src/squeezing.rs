//! Squeezing budget: pump pulse parameters, optimal focusing, PDC
//! efficiency and per-mode squeezing from a Schmidt decomposition.

use std::f64::consts::{E, LN_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jsa::{self, GridSpec, PumpPulse, SchmidtDecomposition};
use crate::phasematch::PdcConfig;
use crate::units::{C, EPSILON_0, HBAR, NM, UM};

/// Above this squeezing (dB) the model without space ordering is no longer
/// quantitatively reliable.
pub const VALIDITY_LIMIT_DB: f64 = 12.0;

/// Pump intensity FWHM duration of a transform-limited Gaussian pulse, s.
pub fn pulse_duration(pump: &PumpPulse) -> f64 {
    let lambda = pump.wavelength_um() * UM;
    2.0 * LN_2 * lambda * lambda / (PI * C * pump.bandwidth_nm() * NM)
}

pub fn pulse_energy(pump: &PumpPulse) -> f64 {
    pump.mean_power_w() / pump.repetition_rate_hz()
}

pub fn peak_power(pump: &PumpPulse) -> f64 {
    pump.mean_power_w() / (pump.repetition_rate_hz() * pulse_duration(pump))
}

/// Waist for a Rayleigh range of `L/2`: `w₀ = √(cL/(n_p ω_p))`, m.
pub fn beam_waist(config: &PdcConfig) -> Result<f64> {
    let n_p = config.crystal().refractive_index(
        config.pump_axis(),
        config.pump_wavelength_um(),
        config.temperature_c(),
    )?;
    Ok((C * config.length_m() / (n_p * config.pump_omega())).sqrt())
}

/// `η_PDC = (4 d_eff ω_s / (π c² n_s))² · ω_p L / (2π ε₀) · η_JSA`, W⁻¹.
pub fn pdc_efficiency(config: &PdcConfig, eta_jsa: f64) -> Result<f64> {
    let n_s = config.crystal().refractive_index(
        config.signal_axis(),
        config.signal_wavelength_um(),
        config.temperature_c(),
    )?;
    let coupling = 4.0 * config.crystal().d_eff() * config.signal_omega() / (PI * C * C * n_s);
    Ok(
        coupling * coupling * config.pump_omega() * config.length_m() / (2.0 * PI * EPSILON_0)
            * eta_jsa,
    )
}

/// `S = 20·r·log₁₀ e`.
pub fn squeezing_db(r: f64) -> f64 {
    20.0 * r * E.log10()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SqueezingResult {
    pub length_m: f64,
    pub schmidt_number: f64,
    pub eta_jsa: f64,
    /// W⁻¹
    pub eta_pdc: f64,
    /// W
    pub peak_power: f64,
    /// s
    pub pulse_duration: f64,
    /// m
    pub beam_waist: f64,
    /// Gain parameter `p_b`.
    pub gain: f64,
    pub singular_values: Vec<f64>,
    pub r: Vec<f64>,
    pub s_db: Vec<f64>,
    /// `sinh² r_n`
    pub mean_photons: Vec<f64>,
    pub pump_photons_per_pulse: f64,
    /// Set when `S_db[0]` exceeds [`VALIDITY_LIMIT_DB`].
    pub exceeds_validity: bool,
}

impl SqueezingResult {
    /// Combine a Schmidt decomposition and shape efficiency with the pump
    /// and crystal into physical squeezing.
    pub fn assemble(
        config: &PdcConfig,
        pump: &PumpPulse,
        decomp: &SchmidtDecomposition,
        eta_jsa: f64,
    ) -> Result<Self> {
        let eta_pdc = pdc_efficiency(config, eta_jsa)?;
        let peak_power = peak_power(pump);
        let r0 = (eta_pdc * peak_power).sqrt();
        let s0 = decomp.singular_values[0];
        let r: Vec<f64> = decomp.singular_values.iter().map(|s| r0 * s / s0).collect();
        let s_db: Vec<f64> = r.iter().map(|&r| squeezing_db(r)).collect();
        let mean_photons = r.iter().map(|r| r.sinh().powi(2)).collect();
        let exceeds_validity = s_db[0] > VALIDITY_LIMIT_DB;
        Ok(SqueezingResult {
            length_m: config.length_m(),
            schmidt_number: decomp.schmidt_number,
            eta_jsa,
            eta_pdc,
            peak_power,
            pulse_duration: pulse_duration(pump),
            beam_waist: beam_waist(config)?,
            gain: r0 * r0 / (4.0 * s0 * s0),
            singular_values: decomp.singular_values.clone(),
            r,
            s_db,
            mean_photons,
            pump_photons_per_pulse: pulse_energy(pump) / (HBAR * config.pump_omega()),
            exceeds_validity,
        })
    }

    pub fn r0(&self) -> f64 {
        self.r[0]
    }

    pub fn s0_db(&self) -> f64 {
        self.s_db[0]
    }
}

fn check_pump(config: &PdcConfig, pump: &PumpPulse) -> Result<()> {
    let (a, b) = (config.pump_wavelength_um(), pump.wavelength_um());
    if (a - b).abs() > 1e-12 * a {
        return Err(Error::invalid(
            "pump",
            format!("pump wavelength {b} µm differs from configured {a} µm"),
        ));
    }
    Ok(())
}

/// Full pipeline on the default grid.
pub fn squeezing_spectrum(config: &PdcConfig, pump: &PumpPulse) -> Result<SqueezingResult> {
    squeezing_spectrum_with(config, pump, &GridSpec::default())
}

pub fn squeezing_spectrum_with(
    config: &PdcConfig,
    pump: &PumpPulse,
    grid: &GridSpec,
) -> Result<SqueezingResult> {
    check_pump(config, pump)?;
    let grid = grid.resolve(config, pump)?;
    let jsa = jsa::compute_jsa(config, pump, &grid)?;
    let decomp = jsa::schmidt_decompose(&jsa)?;
    let eta = jsa::jsa_efficiency(&jsa, &decomp);
    SqueezingResult::assemble(config, pump, &decomp, eta)
}

/// Re-run the whole pipeline (fresh grid, JSA and decomposition) at each
/// crystal length. Results come back in input order.
pub fn length_scan(
    template: &PdcConfig,
    pump: &PumpPulse,
    lengths_m: &[f64],
    grid: &GridSpec,
) -> Result<Vec<(f64, SqueezingResult)>> {
    lengths_m
        .par_iter()
        .map(|&l| {
            let config = template.clone().with_length_m(l)?;
            Ok((l, squeezing_spectrum_with(&config, pump, grid)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{CrystalModel, OpticalAxis};
    use crate::phasematch::PdcType;
    use std::sync::Arc;

    fn cgvm_config(l_m: f64) -> PdcConfig {
        PdcConfig::new(
            Arc::new(CrystalModel::mgo_ln()),
            PdcType::TypeI,
            OpticalAxis::Extraordinary,
            OpticalAxis::Ordinary,
            0.775,
            11.0,
            l_m,
        )
        .unwrap()
    }

    #[test]
    fn pulse_durations() {
        let p = PumpPulse::new(0.740, 4.0, 0.012, 1e8).unwrap();
        assert!((pulse_duration(&p) / 201e-15 - 1.0).abs() < 0.01);
        let p = PumpPulse::new(0.775, 4.0, 0.012, 1e8).unwrap();
        let tau = pulse_duration(&p);
        // 2 ln2 (775 nm)² / (π c · 4 nm) = 220.9 fs
        assert!((tau / 220.9e-15 - 1.0).abs() < 0.01, "{tau}");
        let half = p.with_bandwidth_nm(2.0).unwrap();
        assert_eq!(pulse_duration(&half), 2.0 * tau);
    }

    #[test]
    fn peak_power_and_energy() {
        let p = PumpPulse::new(0.775, 4.0, 0.012, 1e8).unwrap();
        assert!(
            (peak_power(&p) / 543.0 - 1.0).abs() < 0.01,
            "{}",
            peak_power(&p)
        );
        assert!((pulse_energy(&p) - 0.12e-9).abs() < 1e-15);
        let fast = p.with_repetition_rate_hz(2e8).unwrap();
        assert_eq!(peak_power(&fast), peak_power(&p) / 2.0);
    }

    #[test]
    fn beam_waist_scaling() {
        let c = cgvm_config(0.08);
        let w = beam_waist(&c).unwrap();
        let n_p = c
            .crystal()
            .refractive_index(OpticalAxis::Extraordinary, 0.775, 11.0)
            .unwrap();
        let hand = (0.08 * 0.775e-6 / (2.0 * PI * n_p)).sqrt();
        assert!((w / hand - 1.0).abs() < 1e-12);
        assert!((w - 67e-6).abs() < 1e-6, "{w}");
        let w4 = beam_waist(&c.with_length_m(0.32).unwrap()).unwrap();
        assert!((w4 - 2.0 * w).abs() < 1e-18);
    }

    #[test]
    fn pdc_efficiency_linear() {
        let c = cgvm_config(0.08);
        let e1 = pdc_efficiency(&c, 0.75).unwrap();
        let e2 = pdc_efficiency(&c.clone().with_length_m(0.16).unwrap(), 0.75).unwrap();
        assert!((e2 / e1 - 2.0).abs() < 1e-14);
        assert_eq!(pdc_efficiency(&c, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_pump_wavelength() {
        let c = cgvm_config(0.01);
        let p = PumpPulse::new(0.78, 4.0, 0.012, 1e8).unwrap();
        assert!(squeezing_spectrum(&c, &p).is_err());
    }

    #[test]
    fn empty_scan() {
        let c = cgvm_config(0.01);
        let p = PumpPulse::new(0.775, 4.0, 0.012, 1e8).unwrap();
        assert!(length_scan(&c, &p, &[], &GridSpec::default())
            .unwrap()
            .is_empty());
        assert!(length_scan(&c, &p, &[-1.0], &GridSpec::default()).is_err());
    }

    #[test]
    fn db_conversion() {
        assert!((squeezing_db(1.0) - 8.685_889_638).abs() < 1e-9);
    }
}
