//! Modelling of pulsed, frequency-degenerate type-I / type-0 parametric
//! downconversion in periodically poled crystals.
//!
//! The pipeline runs
//! [`dispersion`] → [`phasematch`] → [`jsa`] → [`squeezing`]:
//! Sellmeier data give wavevectors and their derivatives, which fix the
//! poling period and complete group-velocity-matching (cGVM) points; the
//! joint spectral amplitude on a detuning grid is Schmidt-decomposed into
//! squeezing modes, and the pump/crystal parameters turn mode weights into
//! squeezing parameters and dB values.

pub mod dispersion;
pub mod error;
pub mod jsa;
pub mod phasematch;
mod root;
pub mod squeezing;
pub mod units;

pub use dispersion::{load_crystal, CrystalModel, OpticalAxis, SellmeierSet};
pub use error::{Error, Result};
pub use jsa::{
    compute_jsa, default_grid, double_gaussian_analytics, double_gaussian_jsa, jsa_efficiency,
    schmidt_decompose, FrequencyGrid, GridSpec, JsaGrid, PhaseReference, PumpPulse,
    SchmidtDecomposition,
};
pub use phasematch::{
    phase_mismatch, phasematch_hyperbola, poling_period, solve_cgvm, solve_cgvm_temperature,
    taylor_dispersion, walkoff_time, AxisPairing, PdcConfig, PdcType, TaylorDispersion,
};
pub use squeezing::{
    beam_waist, length_scan, pdc_efficiency, peak_power, pulse_duration, squeezing_spectrum,
    SqueezingResult,
};
