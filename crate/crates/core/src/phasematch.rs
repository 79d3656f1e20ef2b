//! Collinear frequency-degenerate QPM: phase mismatch, poling period,
//! second-order Taylor coefficients, perfect-phase-matching hyperbolas,
//! walk-off and complete group-velocity-matching (cGVM) solvers.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dispersion::{CrystalModel, OpticalAxis, WaveDispersion};
use crate::error::{Error, Result};
use crate::root;
use crate::units::{self, UM};

const CGVM_WAVELENGTH_TOL_UM: f64 = 1e-10;
const CGVM_TEMPERATURE_TOL_C: f64 = 1e-4;
const CGVM_MAX_RESIDUAL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PdcType {
    #[serde(rename = "type-0")]
    Type0,
    #[serde(rename = "type-I")]
    TypeI,
}

/// One degenerate PDC source design. The signal is always at `2·λ_p`.
///
/// Only the −1 QPM order is modelled. The grating vector carries whatever
/// sign cancels the central mismatch, so `Λ` is always reported positive.
#[derive(Clone, Debug)]
pub struct PdcConfig {
    crystal: Arc<CrystalModel>,
    pdc_type: PdcType,
    pump_axis: OpticalAxis,
    signal_axis: OpticalAxis,
    pump_wavelength_um: f64,
    temperature_c: f64,
    length_m: f64,
    poling_period_um: Option<f64>,
}

impl PdcConfig {
    pub fn new(
        crystal: Arc<CrystalModel>,
        pdc_type: PdcType,
        pump_axis: OpticalAxis,
        signal_axis: OpticalAxis,
        pump_wavelength_um: f64,
        temperature_c: f64,
        length_m: f64,
    ) -> Result<Self> {
        match pdc_type {
            PdcType::Type0 if pump_axis != signal_axis => {
                return Err(Error::invalid(
                    "pdc config",
                    "type-0 needs pump_axis = signal_axis",
                ))
            }
            PdcType::TypeI if pump_axis == signal_axis => {
                return Err(Error::invalid(
                    "pdc config",
                    "type-I needs pump_axis ≠ signal_axis",
                ))
            }
            _ => {}
        }
        for axis in [pump_axis, signal_axis] {
            if !crystal.has_axis(axis) {
                return Err(Error::UnknownAxis(axis.label().to_string()));
            }
        }
        if !(pump_wavelength_um.is_finite() && pump_wavelength_um > 0.0) {
            return Err(Error::invalid(
                "pdc config",
                format!("pump wavelength {pump_wavelength_um} µm"),
            ));
        }
        if !temperature_c.is_finite() {
            return Err(Error::invalid("pdc config", "temperature is not finite"));
        }
        let config = PdcConfig {
            crystal,
            pdc_type,
            pump_axis,
            signal_axis,
            pump_wavelength_um,
            temperature_c,
            length_m: 1.0,
            poling_period_um: None,
        };
        config.with_length_m(length_m)
    }

    pub fn with_length_m(mut self, length_m: f64) -> Result<Self> {
        if !(length_m.is_finite() && length_m > 0.0) {
            return Err(Error::invalid(
                "pdc config",
                format!("crystal length {length_m} m must be > 0"),
            ));
        }
        self.length_m = length_m;
        Ok(self)
    }

    pub fn with_poling_period_um(mut self, period_um: f64) -> Result<Self> {
        if !(period_um.is_finite() && period_um > 0.0) {
            return Err(Error::invalid(
                "pdc config",
                format!("poling period {period_um} µm must be > 0"),
            ));
        }
        self.poling_period_um = Some(period_um);
        Ok(self)
    }

    pub fn with_temperature_c(mut self, temperature_c: f64) -> Result<Self> {
        if !temperature_c.is_finite() {
            return Err(Error::invalid("pdc config", "temperature is not finite"));
        }
        self.temperature_c = temperature_c;
        Ok(self)
    }

    pub fn crystal(&self) -> &CrystalModel {
        &self.crystal
    }

    pub fn crystal_arc(&self) -> Arc<CrystalModel> {
        Arc::clone(&self.crystal)
    }

    pub fn pdc_type(&self) -> PdcType {
        self.pdc_type
    }

    pub fn pump_axis(&self) -> OpticalAxis {
        self.pump_axis
    }

    pub fn signal_axis(&self) -> OpticalAxis {
        self.signal_axis
    }

    pub fn pump_wavelength_um(&self) -> f64 {
        self.pump_wavelength_um
    }

    pub fn signal_wavelength_um(&self) -> f64 {
        2.0 * self.pump_wavelength_um
    }

    pub fn temperature_c(&self) -> f64 {
        self.temperature_c
    }

    pub fn length_m(&self) -> f64 {
        self.length_m
    }

    pub fn poling_period_override_um(&self) -> Option<f64> {
        self.poling_period_um
    }

    pub fn pump_omega(&self) -> f64 {
        units::omega_from_um(self.pump_wavelength_um)
    }

    pub fn signal_omega(&self) -> f64 {
        0.5 * self.pump_omega()
    }

    /// Pump wavevector at `ω_p + detuning`.
    pub fn pump_k(&self, detuning: f64) -> Result<f64> {
        self.crystal.wavevector(
            self.pump_axis,
            self.pump_omega() + detuning,
            self.temperature_c,
        )
    }

    /// Signal wavevector at `ω_s + detuning`.
    pub fn signal_k(&self, detuning: f64) -> Result<f64> {
        self.crystal.wavevector(
            self.signal_axis,
            self.signal_omega() + detuning,
            self.temperature_c,
        )
    }

    pub fn pump_dispersion(&self) -> Result<WaveDispersion> {
        self.crystal
            .wave_dispersion(self.pump_axis, self.pump_omega(), self.temperature_c)
    }

    pub fn signal_dispersion(&self) -> Result<WaveDispersion> {
        self.crystal
            .wave_dispersion(self.signal_axis, self.signal_omega(), self.temperature_c)
    }

    /// `k_p0 − 2k_s0`, evaluated in the same order as [`phase_mismatch`].
    pub fn central_mismatch(&self) -> Result<f64> {
        let ks = self.signal_k(0.0)?;
        Ok(self.pump_k(0.0)? - ks - ks)
    }

    /// Signed grating wavevector (rad/m) subtracted from the bare mismatch.
    pub fn grating_wavevector(&self) -> Result<f64> {
        let dk0 = self.central_mismatch()?;
        if !(dk0.is_finite() && dk0 != 0.0) {
            return Err(Error::QpmImpossible(dk0));
        }
        Ok(match self.poling_period_um {
            Some(period) => (2.0 * PI / (period * UM)).copysign(dk0),
            None => dk0,
        })
    }
}

/// Poling period (µm) that quasi-phase-matches the central frequencies.
/// Returns the override unchanged when the config carries one.
pub fn poling_period(config: &PdcConfig) -> Result<f64> {
    if let Some(p) = config.poling_period_um {
        return Ok(p);
    }
    let kg = config.grating_wavevector()?;
    Ok(2.0 * PI / kg.abs() / UM)
}

/// `Δ̃(Ω₁, Ω₂) = k_p(Ω₁+Ω₂) − k_s(Ω₁) − k_s(Ω₂) − K_g` in rad/m, full
/// Sellmeier dispersion.
pub fn phase_mismatch(config: &PdcConfig, omega1: f64, omega2: f64) -> Result<f64> {
    let kg = config.grating_wavevector()?;
    let kp = config.pump_k(omega1 + omega2)?;
    let ks1 = config.signal_k(omega1)?;
    let ks2 = config.signal_k(omega2)?;
    Ok(kp - ks1 - ks2 - kg)
}

/// Second-order expansion of the mismatch about the central frequencies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TaylorDispersion {
    /// `k_p′ − k_s′`, s/m
    pub dk1: f64,
    /// `k_p″`, s²/m
    pub kp2: f64,
    /// `k_s″`, s²/m
    pub ks2: f64,
    /// `−√2·dk1/(2k_p″ − k_s″)`, rad/s
    pub omega_d: f64,
}

impl TaylorDispersion {
    /// `√2·dk1·Ω₊ + (k_p″ − k_s″/2)·Ω₊² − (k_s″/2)·Ω₋²` with `Ω± = (Ω₁ ± Ω₂)/√2`.
    pub fn mismatch(&self, omega1: f64, omega2: f64) -> f64 {
        let plus = (omega1 + omega2) / SQRT_2;
        let minus = (omega1 - omega2) / SQRT_2;
        self.mismatch_rotated(plus, minus)
    }

    pub fn mismatch_rotated(&self, plus: f64, minus: f64) -> f64 {
        SQRT_2 * self.dk1 * plus + (self.kp2 - 0.5 * self.ks2) * plus * plus
            - 0.5 * self.ks2 * minus * minus
    }

    /// The two `Ω₊` values with vanishing Taylor mismatch at a given `Ω₋`.
    ///
    /// Vertices (Ω₋ = 0) sit at Ω₊ = 0 and Ω₊ = 2Ω_d.
    pub fn hyperbola(&self, omega_minus: f64) -> Result<[f64; 2]> {
        if !(self.ks2 > 0.0 && 2.0 * self.kp2 / self.ks2 > 1.0) {
            return Err(Error::Regime(format!(
                "need k_s'' > 0 and 2k_p''/k_s'' > 1, got k_p'' = {:e}, k_s'' = {:e}",
                self.kp2, self.ks2
            )));
        }
        let od = self.omega_d;
        let root = (od * od + omega_minus * omega_minus / (2.0 * self.kp2 / self.ks2 - 1.0)).sqrt();
        Ok([od + root, od - root])
    }
}

pub fn taylor_dispersion(config: &PdcConfig) -> Result<TaylorDispersion> {
    let p = config.pump_dispersion()?;
    let s = config.signal_dispersion()?;
    let dk1 = p.k1 - s.k1;
    let denom = 2.0 * p.k2 - s.k2;
    if denom.abs() <= 1e-12 * p.k2.abs().max(s.k2.abs()) {
        return Err(Error::ParabolicDegeneracy);
    }
    Ok(TaylorDispersion {
        dk1,
        kp2: p.k2,
        ks2: s.k2,
        omega_d: -SQRT_2 * dk1 / denom,
    })
}

pub fn phasematch_hyperbola(config: &PdcConfig, omega_minus: f64) -> Result<[f64; 2]> {
    taylor_dispersion(config)?.hyperbola(omega_minus)
}

/// Pump–signal walk-off `τ_w = (k_p′ − k_s′)·L/2` in seconds.
pub fn walkoff_time(config: &PdcConfig) -> Result<f64> {
    let p = config.pump_dispersion()?;
    let s = config.signal_dispersion()?;
    Ok((p.k1 - s.k1) * config.length_m / 2.0)
}

/// Pump and signal axes of a cGVM search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxisPairing {
    pub pump: OpticalAxis,
    pub signal: OpticalAxis,
}

impl AxisPairing {
    pub fn new(pump: OpticalAxis, signal: OpticalAxis) -> Self {
        AxisPairing { pump, signal }
    }
}

/// `m_pump(λ/2) − m_signal(λ)`.
pub fn group_index_mismatch(
    crystal: &CrystalModel,
    pairing: AxisPairing,
    signal_wavelength_um: f64,
    temperature_c: f64,
) -> Result<f64> {
    let mp = crystal.group_index(pairing.pump, signal_wavelength_um / 2.0, temperature_c)?;
    let ms = crystal.group_index(pairing.signal, signal_wavelength_um, temperature_c)?;
    Ok(mp - ms)
}

fn check_bracket(what: &'static str, (lo, hi): (f64, f64)) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(Error::invalid(
            what,
            format!("[{lo}, {hi}] is not a non-empty interval"),
        ))
    }
}

/// Signal wavelength (µm) in `bracket_um` at which pump (at λ/2) and signal
/// group velocities coincide.
pub fn solve_cgvm(
    crystal: &CrystalModel,
    pairing: AxisPairing,
    temperature_c: f64,
    bracket_um: (f64, f64),
) -> Result<f64> {
    check_bracket("wavelength bracket", bracket_um)?;
    let (lo, hi) = bracket_um;
    let g = |lambda: f64| group_index_mismatch(crystal, pairing, lambda, temperature_c);
    let lambda = root::brent(g, lo, hi, CGVM_WAVELENGTH_TOL_UM, |fa, fb| {
        Error::NoCgvm(format!(
            "m_{}(λ/2) − m_{}(λ) does not change sign on [{lo}, {hi}] µm at {temperature_c} °C ({fa:.3e}, {fb:.3e})",
            pairing.pump, pairing.signal
        ))
    })?;
    let residual = g(lambda)?;
    if residual.abs() >= CGVM_MAX_RESIDUAL {
        return Err(Error::NoCgvm(format!(
            "root refinement stalled at {lambda} µm with |Δm| = {:.3e}",
            residual.abs()
        )));
    }
    Ok(lambda)
}

/// Temperature (°C) at which the cGVM wavelength found in
/// `wavelength_bracket_um` equals `target_um`.
pub fn solve_cgvm_temperature(
    crystal: &CrystalModel,
    pairing: AxisPairing,
    target_um: f64,
    temperature_bracket_c: (f64, f64),
    wavelength_bracket_um: (f64, f64),
) -> Result<f64> {
    check_bracket("temperature bracket", temperature_bracket_c)?;
    let (lo, hi) = temperature_bracket_c;
    let h = |t: f64| Ok(solve_cgvm(crystal, pairing, t, wavelength_bracket_um)? - target_um);
    root::brent(h, lo, hi, CGVM_TEMPERATURE_TOL_C, |fa, fb| {
        Error::NoCgvm(format!(
            "cGVM wavelength cannot reach {target_um} µm on [{lo}, {hi}] °C (offsets {fa:.3e}, {fb:.3e} µm)"
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::ROOM_TEMPERATURE_C;
    use OpticalAxis::{Extraordinary as E, Ordinary as O};

    fn config(lambda_p: f64, t: f64, l_m: f64) -> PdcConfig {
        PdcConfig::new(
            Arc::new(CrystalModel::mgo_ln()),
            PdcType::TypeI,
            E,
            O,
            lambda_p,
            t,
            l_m,
        )
        .unwrap()
    }

    #[test]
    fn config_invariants() {
        let c = Arc::new(CrystalModel::mgo_ln());
        assert!(PdcConfig::new(c.clone(), PdcType::Type0, E, O, 0.775, 20.0, 0.01).is_err());
        assert!(PdcConfig::new(c.clone(), PdcType::TypeI, E, E, 0.775, 20.0, 0.01).is_err());
        assert!(PdcConfig::new(c.clone(), PdcType::TypeI, E, O, 0.775, 20.0, 0.0).is_err());
        assert!(PdcConfig::new(c.clone(), PdcType::Type0, E, E, 0.775, 20.0, 0.01).is_ok());
        let cfg = config(0.775, 11.0, 0.08);
        assert_eq!(cfg.signal_wavelength_um(), 1.55);
        assert!(cfg.clone().with_poling_period_um(-1.0).is_err());
    }

    #[test]
    fn poling_periods() {
        let p = poling_period(&config(0.740, ROOM_TEMPERATURE_C, 0.005)).unwrap();
        assert!((p / 20.5 - 1.0).abs() < 0.02, "{p}");
        let p = poling_period(&config(0.775, 11.0, 0.08)).unwrap();
        assert!((p / 19.2 - 1.0).abs() < 0.02, "{p}");
    }

    #[test]
    fn mismatch_vanishes_at_centre() {
        let cfg = config(0.775, 11.0, 0.08);
        assert_eq!(phase_mismatch(&cfg, 0.0, 0.0).unwrap(), 0.0);
        let cfg = config(0.74, 24.5, 0.005);
        assert_eq!(phase_mismatch(&cfg, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn override_period_is_used() {
        let cfg = config(0.775, 11.0, 0.08);
        let exact = poling_period(&cfg).unwrap();
        let off = cfg.with_poling_period_um(exact * 1.001).unwrap();
        assert_eq!(poling_period(&off).unwrap(), exact * 1.001);
        assert!(phase_mismatch(&off, 0.0, 0.0).unwrap().abs() > 1.0);
    }

    #[test]
    fn taylor_walkoff_design_values() {
        let cfg = config(0.740, ROOM_TEMPERATURE_C, 0.005);
        let t = taylor_dispersion(&cfg).unwrap();
        assert!((t.kp2 / 0.41e-24 - 1.0).abs() < 0.05);
        assert!((t.ks2 / 0.13e-24 - 1.0).abs() < 0.05);
        // 2·115 fs / 5 mm
        assert!((t.dk1 / 46e-12 - 1.0).abs() < 0.05, "{}", t.dk1);
        let tau = walkoff_time(&cfg).unwrap();
        assert!((tau / 115e-15 - 1.0).abs() < 0.05, "{tau}");
    }

    #[test]
    fn walkoff_is_linear_in_length() {
        let cfg = config(0.740, ROOM_TEMPERATURE_C, 0.005);
        let t1 = walkoff_time(&cfg).unwrap();
        let t2 = walkoff_time(&cfg.with_length_m(0.010).unwrap()).unwrap();
        assert_eq!(t2, 2.0 * t1);
    }

    #[test]
    fn hyperbola_vertices() {
        let cfg = config(0.740, ROOM_TEMPERATURE_C, 0.005);
        let t = taylor_dispersion(&cfg).unwrap();
        let [a, b] = phasematch_hyperbola(&cfg, 0.0).unwrap();
        let mut v = [a, b];
        v.sort_by(f64::total_cmp);
        let mut expect = [0.0, 2.0 * t.omega_d];
        expect.sort_by(f64::total_cmp);
        assert!((v[0] - expect[0]).abs() <= 1e-6 * t.omega_d.abs());
        assert!((v[1] - expect[1]).abs() <= 1e-6 * t.omega_d.abs());
    }

    #[test]
    fn hyperbola_zeroes_taylor_mismatch() {
        let cfg = config(0.740, ROOM_TEMPERATURE_C, 0.005);
        let t = taylor_dispersion(&cfg).unwrap();
        for i in -10..=10 {
            let minus = i as f64 * 2e13;
            for plus in t.hyperbola(minus).unwrap() {
                let typical = (SQRT_2 * t.dk1 * plus).abs()
                    + (0.5 * t.ks2 * minus * minus).abs()
                    + (t.kp2 * plus * plus).abs();
                assert!(t.mismatch_rotated(plus, minus).abs() <= 1e-9 * typical.max(1e-300));
            }
        }
    }

    #[test]
    fn hyperbola_regime_violation() {
        let t = TaylorDispersion {
            dk1: 0.0,
            kp2: 0.1e-24,
            ks2: 0.3e-24,
            omega_d: 0.0,
        };
        assert!(matches!(t.hyperbola(1e12), Err(Error::Regime(_))));
    }

    #[test]
    fn cgvm_point_is_walkoff_free() {
        let crystal = CrystalModel::mgo_ln();
        let pairing = AxisPairing::new(E, O);
        let lambda = solve_cgvm(&crystal, pairing, 11.0, (1.2, 2.0)).unwrap();
        let cfg = config(lambda / 2.0, 11.0, 0.1);
        assert!(walkoff_time(&cfg).unwrap().abs() < 0.1e-15);
        let t = taylor_dispersion(&cfg).unwrap();
        assert!(t.dk1.abs() < 1e-14);
        // branches mirror each other about Ω₊ = 0 up to the residual 2Ω_d
        assert!(t.omega_d.abs() < 1e8, "{}", t.omega_d);
        for minus in [-3e13, 0.0, 5e13] {
            let [a, b] = t.hyperbola(minus).unwrap();
            assert!((a + b).abs() < 2e8);
        }
    }

    #[test]
    fn cgvm_wavelengths() {
        let crystal = CrystalModel::mgo_ln();
        let t = ROOM_TEMPERATURE_C;
        let l1 = solve_cgvm(&crystal, AxisPairing::new(E, O), t, (1.2, 2.0)).unwrap();
        assert!((l1 - 1.566).abs() < 0.002, "{l1}");
        let l0 = solve_cgvm(&crystal, AxisPairing::new(E, E), t, (2.0, 3.5)).unwrap();
        assert!((l0 - 2.7).abs() < 0.03, "{l0}");
        assert!(
            group_index_mismatch(&crystal, AxisPairing::new(E, O), l1, t)
                .unwrap()
                .abs()
                < 1e-9
        );
    }

    #[test]
    fn cgvm_bracket_errors() {
        let crystal = CrystalModel::mgo_ln();
        let p = AxisPairing::new(E, O);
        assert!(solve_cgvm(&crystal, p, 24.5, (0.5, 0.6)).is_err());
        assert!(matches!(
            solve_cgvm(&crystal, p, 24.5, (2.0, 3.0)),
            Err(Error::NoCgvm(_))
        ));
        assert!(matches!(
            solve_cgvm(&crystal, p, 24.5, (2.0, 1.0)),
            Err(Error::Invalid { .. })
        ));
    }

    #[test]
    fn cgvm_bracket_refinement_is_stable() {
        let crystal = CrystalModel::mgo_ln();
        let p = AxisPairing::new(E, O);
        let wide = solve_cgvm(&crystal, p, 24.5, (1.2, 2.0)).unwrap();
        let narrow = solve_cgvm(&crystal, p, 24.5, (wide - 0.2, wide + 0.2)).unwrap();
        assert!((wide - narrow).abs() < 1e-5);
    }

    #[test]
    fn cgvm_temperature() {
        let crystal = CrystalModel::mgo_ln();
        let p = AxisPairing::new(E, O);
        let t = solve_cgvm_temperature(&crystal, p, 1.55, (-20.0, 60.0), (1.2, 2.0)).unwrap();
        assert!((t - 11.0).abs() < 2.0, "{t}");
        let lambda = solve_cgvm(&crystal, p, t, (1.2, 2.0)).unwrap();
        assert!((lambda - 1.55).abs() < 1e-4);

        let at_room = solve_cgvm(&crystal, p, 24.5, (1.2, 2.0)).unwrap();
        let back = solve_cgvm_temperature(&crystal, p, at_room, (-20.0, 60.0), (1.2, 2.0)).unwrap();
        assert!((back - 24.5).abs() < 0.1);

        assert!(solve_cgvm_temperature(&crystal, p, 3.0, (20.0, 30.0), (1.2, 2.0)).is_err());
    }
}
