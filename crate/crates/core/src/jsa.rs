//! Joint spectral amplitude of degenerate PDC on a square detuning grid,
//! its Schmidt decomposition, and the double-Gaussian reference model.
//!
//! Conventions:
//! - detunings `Ω` are angular (rad/s) and measured from `ω_s = ω_p/2`;
//! - the pump amplitude `α̃` is normalised to `∫α̃(Ω) dΩ/2π = 1`, i.e. unit
//!   peak envelope in time;
//! - integrals carry the `dΩ/2π` measure, so a mode satisfies
//!   `∫|ψ(Ω)|² dΩ/2π = 1`.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phasematch::{self, PdcConfig};
use crate::units::{self, C, NM, UM};

pub const DEFAULT_GRID_N: usize = 512;
pub const MIN_GRID_N: usize = 64;

/// Pump standard deviations (along Ω₊, scaled by √2) covered by the default grid.
const PUMP_EXTENT_SIGMAS: f64 = 4.0;
/// `|sinc| ≈ 0.05` envelope: `x = 1/0.05`.
const SINC_EXTENT_ARG: f64 = 20.0;
/// Fraction of the distance to the dispersion-model edge the grid may use.
const VALIDITY_MARGIN: f64 = 0.98;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PumpPulse {
    wavelength_um: f64,
    bandwidth_nm: f64,
    mean_power_w: f64,
    repetition_rate_hz: f64,
}

impl PumpPulse {
    /// `bandwidth_nm` is the FWHM of the pump intensity spectrum.
    pub fn new(
        wavelength_um: f64,
        bandwidth_nm: f64,
        mean_power_w: f64,
        repetition_rate_hz: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("wavelength", wavelength_um),
            ("bandwidth", bandwidth_nm),
            ("mean power", mean_power_w),
            ("repetition rate", repetition_rate_hz),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid("pump", format!("{name} = {v} must be > 0")));
            }
        }
        let pump = PumpPulse {
            wavelength_um,
            bandwidth_nm,
            mean_power_w,
            repetition_rate_hz,
        };
        if !pump.sigma_plus().is_finite() {
            return Err(Error::invalid("pump", "spectral width is not finite"));
        }
        Ok(pump)
    }

    pub fn wavelength_um(&self) -> f64 {
        self.wavelength_um
    }

    pub fn bandwidth_nm(&self) -> f64 {
        self.bandwidth_nm
    }

    pub fn mean_power_w(&self) -> f64 {
        self.mean_power_w
    }

    pub fn repetition_rate_hz(&self) -> f64 {
        self.repetition_rate_hz
    }

    pub fn with_mean_power_w(self, mean_power_w: f64) -> Result<Self> {
        PumpPulse::new(
            self.wavelength_um,
            self.bandwidth_nm,
            mean_power_w,
            self.repetition_rate_hz,
        )
    }

    pub fn with_repetition_rate_hz(self, repetition_rate_hz: f64) -> Result<Self> {
        PumpPulse::new(
            self.wavelength_um,
            self.bandwidth_nm,
            self.mean_power_w,
            repetition_rate_hz,
        )
    }

    pub fn with_bandwidth_nm(self, bandwidth_nm: f64) -> Result<Self> {
        PumpPulse::new(
            self.wavelength_um,
            bandwidth_nm,
            self.mean_power_w,
            self.repetition_rate_hz,
        )
    }

    /// FWHM of the intensity spectrum in angular frequency, rad/s.
    pub fn bandwidth_omega(&self) -> f64 {
        let lambda = self.wavelength_um * UM;
        2.0 * PI * C * self.bandwidth_nm * NM / (lambda * lambda)
    }

    /// Amplitude standard deviation of the JSA along `Ω₊`, rad/s.
    pub fn sigma_plus(&self) -> f64 {
        let lambda = self.wavelength_um * UM;
        PI * C * self.bandwidth_nm * NM / (lambda * lambda * (2.0 * 2f64.ln()).sqrt())
    }

    pub fn spectral_amplitude(&self, omega: f64) -> f64 {
        gaussian_amplitude(self.sigma_plus(), omega)
    }
}

/// `α̃(Ω) = (√π/σ)·exp(−Ω²/4σ²)`, which integrates to 2π.
fn gaussian_amplitude(sigma: f64, omega: f64) -> f64 {
    PI.sqrt() / sigma * (-omega * omega / (4.0 * sigma * sigma)).exp()
}

/// Normalised pump spectral amplitude `α̃(Ω)` in seconds.
pub fn pump_spectral_amplitude(pump: &PumpPulse, omega: f64) -> f64 {
    pump.spectral_amplitude(omega)
}

/// Symmetric detuning grid shared by both photon axes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    n: usize,
    omega_max: f64,
}

impl FrequencyGrid {
    pub fn new(n: usize, omega_max: f64) -> Result<Self> {
        if n < MIN_GRID_N {
            return Err(Error::invalid("grid", format!("N = {n} < {MIN_GRID_N}")));
        }
        if !(omega_max.is_finite() && omega_max > 0.0) {
            return Err(Error::invalid(
                "grid",
                format!("extent {omega_max} rad/s must be > 0"),
            ));
        }
        Ok(FrequencyGrid { n, omega_max })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn omega_min(&self) -> f64 {
        -self.omega_max
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn step(&self) -> f64 {
        2.0 * self.omega_max / (self.n - 1) as f64
    }

    /// Detuning of sample `i`; exactly antisymmetric about the centre.
    pub fn omega(&self, i: usize) -> f64 {
        self.offset(2 * i as isize - (self.n as isize - 1))
    }

    /// `Ω_i + Ω_j` indexed by `i + j`.
    pub fn sum_omega(&self, index_sum: usize) -> f64 {
        self.offset(2 * index_sum as isize - 2 * (self.n as isize - 1))
    }

    fn offset(&self, half_steps: isize) -> f64 {
        half_steps as f64 * self.omega_max / (self.n - 1) as f64
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.omega(i)).collect()
    }

    pub fn with_n(self, n: usize) -> Result<Self> {
        FrequencyGrid::new(n, self.omega_max)
    }

    /// Quadrature weight `δΩ/2π`.
    pub fn weight(&self) -> f64 {
        self.step() / (2.0 * PI)
    }
}

/// Grid covering the pump-limited band and the `|sinc| > 0.05` region
/// along `Ω₋`, clipped to the crystal's dispersion data.
pub fn default_grid(config: &PdcConfig, pump: &PumpPulse) -> Result<FrequencyGrid> {
    default_grid_n(config, pump, DEFAULT_GRID_N)
}

pub fn default_grid_n(config: &PdcConfig, pump: &PumpPulse, n: usize) -> Result<FrequencyGrid> {
    let pump_extent = PUMP_EXTENT_SIGMAS * SQRT_2 * pump.sigma_plus();
    let ks2 = config.signal_dispersion()?.k2.abs();
    // x = k_s″ Ω₋² L/4 reaches SINC_EXTENT_ARG at Ω₋ = √(4x/(k_s″L)); the grid
    // edge is that Ω₋ projected onto one photon axis.
    let sinc_extent = if ks2 > 0.0 {
        (4.0 * SINC_EXTENT_ARG / (ks2 * config.length_m())).sqrt() / SQRT_2
    } else {
        0.0
    };
    let extent = pump_extent.max(sinc_extent).min(validity_limit(config));
    FrequencyGrid::new(n, extent)
}

/// Grid size plus an optional fixed extent; without one the extent is
/// re-derived for every configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub omega_max: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n: DEFAULT_GRID_N,
            omega_max: None,
        }
    }
}

impl GridSpec {
    pub fn with_n(n: usize) -> Self {
        GridSpec { n, omega_max: None }
    }

    pub fn resolve(&self, config: &PdcConfig, pump: &PumpPulse) -> Result<FrequencyGrid> {
        match self.omega_max {
            Some(w) => FrequencyGrid::new(self.n, w),
            None => default_grid_n(config, pump, self.n),
        }
    }
}

/// Largest symmetric detuning keeping both waves inside the valid range.
fn validity_limit(config: &PdcConfig) -> f64 {
    let (lo, hi) = config.crystal().valid_range_um();
    let w_hi = units::omega_from_um(lo);
    let w_lo = units::omega_from_um(hi);
    let wp = config.pump_omega();
    let ws = config.signal_omega();
    let limits = [(w_hi - wp) / 2.0, (wp - w_lo) / 2.0, w_hi - ws, ws - w_lo];
    VALIDITY_MARGIN * limits.into_iter().fold(f64::INFINITY, f64::min)
}

/// Where the field operators are referenced along the crystal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseReference {
    /// Origin at the crystal centre, where the focused pump is transform
    /// limited. The JSA is the real product `α̃·sinc(Δ̃L/2)`.
    #[default]
    CrystalCenter,
    /// Origin at the entrance face: an extra factor `exp(iΔ̃L/2)`.
    EntranceFace,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum JsaSource {
    Pdc {
        pump_wavelength_um: f64,
        pump_bandwidth_nm: f64,
        temperature_c: f64,
        length_m: f64,
        poling_period_um: f64,
        phase_reference: PhaseReference,
    },
    DoubleGaussian {
        omega_p: f64,
        ratio: f64,
    },
}

#[derive(Clone, Debug)]
pub struct JsaGrid {
    /// `values[(i, j)] = J(Ω_i, Ω_j) / γL`, units of seconds.
    pub values: DMatrix<Complex64>,
    pub grid: FrequencyGrid,
    /// Central signal angular frequency the detunings refer to (0 for
    /// synthetic models).
    pub center_omega: f64,
    pub source: JsaSource,
}

impl JsaGrid {
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }
}

pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

pub fn compute_jsa(config: &PdcConfig, pump: &PumpPulse, grid: &FrequencyGrid) -> Result<JsaGrid> {
    compute_jsa_with(config, pump, grid, PhaseReference::default())
}

pub fn compute_jsa_with(
    config: &PdcConfig,
    pump: &PumpPulse,
    grid: &FrequencyGrid,
    reference: PhaseReference,
) -> Result<JsaGrid> {
    let n = grid.len();
    let kg = config.grating_wavevector()?;
    let half_length = config.length_m() / 2.0;

    let ks: Vec<f64> = (0..n)
        .map(|i| config.signal_k(grid.omega(i)))
        .collect::<Result<_>>()?;
    let sums: Vec<(f64, f64)> = (0..2 * n - 1)
        .map(|s| {
            let w = grid.sum_omega(s);
            Ok((config.pump_k(w)?, pump.spectral_amplitude(w)))
        })
        .collect::<Result<_>>()?;

    // upper triangle, row by row
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| {
                    let (kp, alpha) = sums[i + j];
                    let x = (kp - ks[i] - ks[j] - kg) * half_length;
                    let amp = alpha * sinc(x);
                    match reference {
                        PhaseReference::CrystalCenter => Complex64::new(amp, 0.0),
                        PhaseReference::EntranceFace => Complex64::from_polar(amp, x),
                    }
                })
                .collect()
        })
        .collect();

    let values = DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        rows[a][b - a]
    });
    if values
        .iter()
        .any(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(Error::invalid("jsa", "non-finite entry"));
    }
    Ok(JsaGrid {
        values,
        grid: *grid,
        center_omega: config.signal_omega(),
        source: JsaSource::Pdc {
            pump_wavelength_um: config.pump_wavelength_um(),
            pump_bandwidth_nm: pump.bandwidth_nm(),
            temperature_c: config.temperature_c(),
            length_m: config.length_m(),
            poling_period_um: phasematch::poling_period(config)?,
            phase_reference: reference,
        },
    })
}

#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// Descending, `Σ s_n² = 1`.
    pub singular_values: Vec<f64>,
    /// Column `n` is `ψ_n` sampled on the grid, `∫|ψ_n|² dΩ/2π = 1`.
    pub modes: DMatrix<Complex64>,
    /// Right singular functions (complex conjugate of the SVD's `V` rows).
    pub right_modes: DMatrix<Complex64>,
    pub schmidt_number: f64,
    /// `∬|J/γL|² dΩ₁dΩ₂/(2π)²`.
    pub raw_norm: f64,
    pub grid: FrequencyGrid,
}

impl SchmidtDecomposition {
    pub fn mode(&self, n: usize) -> Vec<Complex64> {
        self.modes.column(n).iter().copied().collect()
    }

    pub fn right_mode(&self, n: usize) -> Vec<Complex64> {
        self.right_modes.column(n).iter().copied().collect()
    }

    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// `G_ab = ∫ψ_a*(Ω) ψ_b(Ω) dΩ/2π` over the first `count` modes.
    pub fn gram(&self, count: usize) -> DMatrix<Complex64> {
        let w = self.grid.weight();
        let m = self.modes.columns(0, count);
        m.adjoint() * m * Complex64::new(w, 0.0)
    }
}

/// SVD of the quadrature-weighted JSA.
pub fn schmidt_decompose(jsa: &JsaGrid) -> Result<SchmidtDecomposition> {
    let w = jsa.grid.weight();
    if jsa.values.iter().all(|v| v.norm_sqr() == 0.0) {
        return Err(Error::ZeroJsa);
    }
    let (sigma, u, v) = if jsa.is_real() {
        let m = jsa.values.map(|v| v.re * w);
        let svd = m.svd(true, true);
        let u = svd.u.expect("u requested").map(|x| Complex64::new(x, 0.0));
        let v = svd
            .v_t
            .expect("v_t requested")
            .transpose()
            .map(|x| Complex64::new(x, 0.0));
        (svd.singular_values, u, v)
    } else {
        let m = jsa.values.map(|v| v * w);
        let svd = m.svd(true, true);
        let u = svd.u.expect("u requested");
        // M = U Σ Vᴴ; right singular vectors are the columns of V = (Vᴴ)ᴴ.
        // The symmetric form uses conj(V) as the second factor.
        let v = svd.v_t.expect("v_t requested").transpose();
        (svd.singular_values, u, v)
    };
    from_svd(sigma, u, v, jsa.grid)
}

fn from_svd(
    sigma: DVector<f64>,
    u: DMatrix<Complex64>,
    v: DMatrix<Complex64>,
    grid: FrequencyGrid,
) -> Result<SchmidtDecomposition> {
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));

    let raw_norm: f64 = sigma.iter().map(|s| s * s).sum();
    if !(raw_norm > 0.0 && raw_norm.is_finite()) {
        return Err(Error::ZeroJsa);
    }
    let scale = raw_norm.sqrt();
    let singular_values: Vec<f64> = order.iter().map(|&k| sigma[k] / scale).collect();
    let schmidt_number = 1.0 / singular_values.iter().map(|s| s.powi(4)).sum::<f64>();

    let rescale = Complex64::new((1.0 / grid.weight()).sqrt(), 0.0);
    let n = grid.len();
    let modes = DMatrix::from_fn(n, order.len(), |i, k| u[(i, order[k])] * rescale);
    let right_modes = DMatrix::from_fn(n, order.len(), |i, k| v[(i, order[k])] * rescale);

    Ok(SchmidtDecomposition {
        singular_values,
        modes,
        right_modes,
        schmidt_number,
        raw_norm,
        grid,
    })
}

/// `η_JSA = s₀²·∬|J/γL|² dΩ₁dΩ₂/(2π)²`.
pub fn jsa_efficiency(jsa: &JsaGrid, decomp: &SchmidtDecomposition) -> f64 {
    debug_assert_eq!(jsa.grid, decomp.grid);
    decomp.singular_values[0].powi(2) * decomp.raw_norm
}

/// Double-Gaussian JSA with amplitude std `omega_p` along `Ω₊` and
/// `ratio·omega_p` along `Ω₋`. The `Ω₊` factor is the normalised `α̃`.
pub fn double_gaussian_jsa(omega_p: f64, ratio: f64, grid: &FrequencyGrid) -> Result<JsaGrid> {
    check_ratio(ratio)?;
    if !(omega_p.is_finite() && omega_p > 0.0) {
        return Err(Error::invalid(
            "double gaussian",
            format!("Ω_p = {omega_p} must be > 0"),
        ));
    }
    let needed = 4.0 * ratio * omega_p;
    if grid.omega_max() < needed {
        return Err(Error::invalid(
            "double gaussian",
            format!(
                "grid extent {:e} rad/s below 4 standard deviations ({needed:e})",
                grid.omega_max()
            ),
        ));
    }
    let n = grid.len();
    let minus_width = ratio * omega_p;
    let values = DMatrix::from_fn(n, n, |i, j| {
        let plus = gaussian_amplitude(omega_p, grid.sum_omega(i + j));
        let d = grid.offset(2 * i.abs_diff(j) as isize);
        let minus_sq = d * d / 2.0;
        Complex64::new(
            plus * (-minus_sq / (2.0 * minus_width * minus_width)).exp(),
            0.0,
        )
    });
    Ok(JsaGrid {
        values,
        grid: *grid,
        center_omega: 0.0,
        source: JsaSource::DoubleGaussian { omega_p, ratio },
    })
}

/// Closed forms `(K, η_JSA) = ((1+R²)/2R, R²/(1+R)²)`.
pub fn double_gaussian_analytics(ratio: f64) -> Result<(f64, f64)> {
    check_ratio(ratio)?;
    Ok((
        (1.0 + ratio * ratio) / (2.0 * ratio),
        ratio * ratio / ((1.0 + ratio) * (1.0 + ratio)),
    ))
}

fn check_ratio(ratio: f64) -> Result<()> {
    if ratio.is_finite() && ratio >= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "double gaussian",
            format!("R = {ratio} must be ≥ 1"),
        ))
    }
}

/// Remove the global phase so that the mode is as real as possible
/// (`Σψ²` real positive), then orient it so its largest sample is positive.
pub fn real_dominant(mode: &[Complex64]) -> Vec<Complex64> {
    let sum_sq: Complex64 = mode.iter().map(|z| z * z).sum();
    let rot = Complex64::from_polar(1.0, -sum_sq.arg() / 2.0);
    let mut out: Vec<Complex64> = mode.iter().map(|z| z * rot).collect();
    let peak = out
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or_default();
    if peak.re < 0.0 {
        out.iter_mut().for_each(|z| *z = -*z);
    }
    out
}

/// Sign changes of `Re ψ`, ignoring samples whose magnitude is below
/// `rel_threshold` of the peak.
pub fn real_sign_changes(mode: &[Complex64], rel_threshold: f64) -> usize {
    let peak = mode.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    let floor = rel_threshold * peak;
    let mut last = 0.0f64;
    let mut changes = 0;
    for z in mode.iter().filter(|z| z.re.abs() > floor) {
        if last != 0.0 && z.re.signum() != last {
            changes += 1;
        }
        last = z.re.signum();
    }
    changes
}
