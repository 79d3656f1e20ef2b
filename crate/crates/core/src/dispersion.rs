//! Temperature-dependent refractive index, wavevector, group index and GVD
//! of QPM crystals described by Sellmeier data files.
//!
//! Every supported Sellmeier form is reduced to a pole expansion in
//! `u = λ²` (λ in µm):
//!
//! ```text
//! n²(u) = A + Σᵢ Bᵢ / (u − Cᵢ) + D·u
//! ```
//!
//! which has closed-form derivatives in λ. Frequency derivatives of
//! `k(ω) = n·ω/c` follow from the chain rule `λ = 2πc/ω`:
//!
//! ```text
//! k′  = (n − λ·dn/dλ) / c
//! k″  = λ³ / (2π c²) · d²n/dλ²
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{self, C, PS2_PER_M, UM};

const BUNDLED_MGO_LN: &str = include_str!("../data/mgo_cln_5pct.toml");

/// Temperatures (°C) at which crystal files are validated.
const VALIDATION_TEMPERATURES_C: [f64; 5] = [0.0, 50.0, 100.0, 150.0, 200.0];
const VALIDATION_SAMPLES: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OpticalAxis {
    #[serde(rename = "o")]
    Ordinary,
    #[serde(rename = "e")]
    Extraordinary,
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
    #[serde(rename = "z")]
    Z,
}

impl OpticalAxis {
    pub fn label(self) -> &'static str {
        match self {
            OpticalAxis::Ordinary => "o",
            OpticalAxis::Extraordinary => "e",
            OpticalAxis::X => "x",
            OpticalAxis::Y => "y",
            OpticalAxis::Z => "z",
        }
    }

    fn is_uniaxial_label(self) -> bool {
        matches!(self, OpticalAxis::Ordinary | OpticalAxis::Extraordinary)
    }
}

impl fmt::Display for OpticalAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for OpticalAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "o" | "ordinary" => Ok(OpticalAxis::Ordinary),
            "e" | "extraordinary" => Ok(OpticalAxis::Extraordinary),
            "x" => Ok(OpticalAxis::X),
            "y" => Ok(OpticalAxis::Y),
            "z" => Ok(OpticalAxis::Z),
            other => Err(Error::UnknownAxis(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrystalClass {
    Uniaxial,
    Biaxial,
}

/// Maps temperature to the scalar `f` that the thermal Sellmeier forms take.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TemperatureModel {
    /// Coefficients are temperature independent, `f = 0`.
    #[default]
    None,
    /// `f = (T − reference)(T + offset)`, T in °C.
    QuadraticOffset { reference_c: f64, offset_c: f64 },
}

impl TemperatureModel {
    pub fn factor(&self, temperature_c: f64) -> f64 {
        match *self {
            TemperatureModel::None => 0.0,
            TemperatureModel::QuadraticOffset {
                reference_c,
                offset_c,
            } => (temperature_c - reference_c) * (temperature_c + offset_c),
        }
    }
}

/// One axis worth of Sellmeier coefficients, λ in µm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SellmeierSet {
    /// Extended two-pole form with temperature-dependent coefficients:
    /// `n² = a1 + b1 f + (a2 + b2 f)/(λ² − (a3 + b3 f)²) + (a4 + b4 f)/(λ² − a5²) − a6 λ²`.
    TwoPoleThermal {
        a1: f64,
        a2: f64,
        a3: f64,
        a4: f64,
        a5: f64,
        a6: f64,
        b1: f64,
        b2: f64,
        b3: f64,
        b4: f64,
    },
    /// `n² = a + Σ bᵢ λ²/(λ² − cᵢ)` with `cᵢ` in µm². Temperature independent.
    Standard { a: f64, b: Vec<f64>, c: Vec<f64> },
    /// Dispersionless medium.
    Constant { n: f64 },
}

impl SellmeierSet {
    fn expansion(&self, f: f64) -> PoleExpansion {
        match self {
            SellmeierSet::TwoPoleThermal {
                a1,
                a2,
                a3,
                a4,
                a5,
                a6,
                b1,
                b2,
                b3,
                b4,
            } => {
                let p1 = a3 + b3 * f;
                PoleExpansion {
                    constant: a1 + b1 * f,
                    poles: vec![(a2 + b2 * f, p1 * p1), (a4 + b4 * f, a5 * a5)],
                    linear: -a6,
                }
            }
            SellmeierSet::Standard { a, b, c } => {
                let mut constant = *a;
                let mut poles = Vec::with_capacity(b.len());
                for (&bi, &ci) in b.iter().zip(c) {
                    // b λ²/(λ² − c) = b + b c/(λ² − c)
                    constant += bi;
                    poles.push((bi * ci, ci));
                }
                PoleExpansion {
                    constant,
                    poles,
                    linear: 0.0,
                }
            }
            SellmeierSet::Constant { n } => PoleExpansion {
                constant: n * n,
                poles: Vec::new(),
                linear: 0.0,
            },
        }
    }

    fn check_shape(&self) -> Result<()> {
        match self {
            SellmeierSet::Standard { b, c, .. } if b.len() != c.len() => {
                Err(Error::Schema(format!(
                    "standard form needs equal-length b and c, got {} and {}",
                    b.len(),
                    c.len()
                )))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
struct PoleExpansion {
    constant: f64,
    /// (strength, position in µm²)
    poles: Vec<(f64, f64)>,
    linear: f64,
}

/// n and its first two λ-derivatives (λ in µm).
#[derive(Clone, Copy, Debug)]
struct IndexDerivatives {
    n: f64,
    dn: f64,
    d2n: f64,
}

impl PoleExpansion {
    fn index_squared(&self, u: f64) -> f64 {
        self.constant + self.poles.iter().map(|&(b, c)| b / (u - c)).sum::<f64>() + self.linear * u
    }

    fn derivatives(&self, lambda_um: f64) -> IndexDerivatives {
        let u = lambda_um * lambda_um;
        let mut p = self.constant + self.linear * u;
        let mut dp = self.linear;
        let mut d2p = 0.0;
        for &(b, c) in &self.poles {
            let inv = 1.0 / (u - c);
            p += b * inv;
            dp -= b * inv * inv;
            d2p += 2.0 * b * inv * inv * inv;
        }
        let n = p.sqrt();
        // d(n²)/dλ = 2λ P′,  d²(n²)/dλ² = 2P′ + 4λ² P″
        let dn = lambda_um * dp / n;
        let d2n2 = 2.0 * dp + 4.0 * u * d2p;
        let d2n = (d2n2 - 2.0 * dn * dn) / (2.0 * n);
        IndexDerivatives { n, dn, d2n }
    }
}

/// Wavevector and its first two angular-frequency derivatives, SI.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveDispersion {
    /// rad/m
    pub k: f64,
    /// s/m
    pub k1: f64,
    /// s²/m
    pub k2: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CrystalFile {
    name: String,
    class: CrystalClass,
    #[serde(rename = "d_eff_pm_per_V")]
    d_eff_pm_per_v: f64,
    valid_range_um: [f64; 2],
    provenance: String,
    #[serde(default)]
    temperature_model: TemperatureModel,
    axes: BTreeMap<String, AxisEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisEntry {
    sellmeier: SellmeierSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrystalModel {
    name: String,
    class: CrystalClass,
    axes: BTreeMap<OpticalAxis, SellmeierSet>,
    temperature_model: TemperatureModel,
    d_eff_pm_per_v: f64,
    valid_range_um: (f64, f64),
    provenance: String,
}

/// Parse and validate a crystal data file.
pub fn load_crystal(data: &str) -> Result<CrystalModel> {
    let file: CrystalFile =
        toml::from_str(data).map_err(|e| Error::Schema(e.message().to_string()))?;
    CrystalModel::from_file(file)
}

impl CrystalModel {
    /// The 5% MgO-doped congruent lithium niobate model shipped with the crate.
    pub fn mgo_ln() -> CrystalModel {
        load_crystal(BUNDLED_MGO_LN).expect("bundled crystal file is valid")
    }

    pub fn bundled_source() -> &'static str {
        BUNDLED_MGO_LN
    }

    pub fn from_path(path: impl AsRef<Path>) -> std::io::Result<Result<CrystalModel>> {
        let text = std::fs::read_to_string(path)?;
        Ok(load_crystal(&text))
    }

    fn from_file(file: CrystalFile) -> Result<CrystalModel> {
        if file.name.trim().is_empty() {
            return Err(Error::Schema("crystal name is empty".into()));
        }
        if file.axes.is_empty() {
            return Err(Error::Schema("axes map is empty".into()));
        }
        let mut axes = BTreeMap::new();
        for (label, entry) in file.axes {
            let axis: OpticalAxis = label
                .parse()
                .map_err(|_| Error::Schema(format!("unknown axis label '{label}'")))?;
            let uniaxial = file.class == CrystalClass::Uniaxial;
            if axis.is_uniaxial_label() != uniaxial {
                return Err(Error::Schema(format!(
                    "axis '{label}' does not belong to a {:?} crystal",
                    file.class
                )));
            }
            entry.sellmeier.check_shape()?;
            axes.insert(axis, entry.sellmeier);
        }
        let [lo, hi] = file.valid_range_um;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
            return Err(Error::invalid(
                "valid_range_um",
                format!("[{lo}, {hi}] is not a non-empty positive interval"),
            ));
        }
        if !(file.d_eff_pm_per_v.is_finite() && file.d_eff_pm_per_v > 0.0) {
            return Err(Error::invalid(
                "d_eff",
                format!("{} pm/V must be positive", file.d_eff_pm_per_v),
            ));
        }
        let model = CrystalModel {
            name: file.name,
            class: file.class,
            axes,
            temperature_model: file.temperature_model,
            d_eff_pm_per_v: file.d_eff_pm_per_v,
            valid_range_um: (lo, hi),
            provenance: file.provenance,
        };
        model.validate_sellmeier()?;
        Ok(model)
    }

    fn validate_sellmeier(&self) -> Result<()> {
        let (lo, hi) = self.valid_range_um;
        for (axis, set) in &self.axes {
            for &t in &VALIDATION_TEMPERATURES_C {
                let exp = set.expansion(self.temperature_model.factor(t));
                for &(_, c) in &exp.poles {
                    if c >= lo * lo && c <= hi * hi {
                        return Err(Error::invalid(
                            "sellmeier",
                            format!(
                                "axis {axis}: pole at {:.4} µm inside valid range at {t} °C",
                                c.sqrt()
                            ),
                        ));
                    }
                }
                for i in 0..=VALIDATION_SAMPLES {
                    let lambda = lo + (hi - lo) * i as f64 / VALIDATION_SAMPLES as f64;
                    let n2 = exp.index_squared(lambda * lambda);
                    if !(n2.is_finite() && n2 > 1.0) {
                        return Err(Error::invalid(
                            "sellmeier",
                            format!("axis {axis}: n² = {n2} at {lambda} µm, {t} °C (need n > 1)"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn class(&self) -> CrystalClass {
        self.class
    }

    pub fn d_eff_pm_per_v(&self) -> f64 {
        self.d_eff_pm_per_v
    }

    /// d_eff in m/V.
    pub fn d_eff(&self) -> f64 {
        self.d_eff_pm_per_v * units::PM_PER_V
    }

    pub fn valid_range_um(&self) -> (f64, f64) {
        self.valid_range_um
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn temperature_model(&self) -> TemperatureModel {
        self.temperature_model
    }

    pub fn axes(&self) -> impl Iterator<Item = OpticalAxis> + '_ {
        self.axes.keys().copied()
    }

    pub fn has_axis(&self, axis: OpticalAxis) -> bool {
        self.axes.contains_key(&axis)
    }

    pub fn sellmeier(&self, axis: OpticalAxis) -> Result<&SellmeierSet> {
        self.axes
            .get(&axis)
            .ok_or_else(|| Error::UnknownAxis(axis.label().to_string()))
    }

    fn check_range(&self, lambda_um: f64, strict: bool) -> Result<()> {
        let (lo, hi) = self.valid_range_um;
        let inside = if strict {
            lambda_um > lo && lambda_um < hi
        } else {
            lambda_um >= lo && lambda_um <= hi
        };
        if inside {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                lambda_um,
                min_um: lo,
                max_um: hi,
            })
        }
    }

    fn index_derivatives(
        &self,
        axis: OpticalAxis,
        lambda_um: f64,
        temperature_c: f64,
        strict: bool,
    ) -> Result<IndexDerivatives> {
        let set = self.sellmeier(axis)?;
        self.check_range(lambda_um, strict)?;
        let f = self.temperature_model.factor(temperature_c);
        Ok(set.expansion(f).derivatives(lambda_um))
    }

    /// Refractive index at vacuum wavelength `lambda_um` and temperature `temperature_c`.
    pub fn refractive_index(
        &self,
        axis: OpticalAxis,
        lambda_um: f64,
        temperature_c: f64,
    ) -> Result<f64> {
        Ok(self
            .index_derivatives(axis, lambda_um, temperature_c, false)?
            .n)
    }

    /// Group index `m = c·dk/dω`.
    pub fn group_index(
        &self,
        axis: OpticalAxis,
        lambda_um: f64,
        temperature_c: f64,
    ) -> Result<f64> {
        let d = self.index_derivatives(axis, lambda_um, temperature_c, true)?;
        Ok(d.n - lambda_um * d.dn)
    }

    /// Group-velocity dispersion `d²k/dω²` in ps²/m.
    pub fn gvd(&self, axis: OpticalAxis, lambda_um: f64, temperature_c: f64) -> Result<f64> {
        let w = self.wave_dispersion_um(axis, lambda_um, temperature_c)?;
        Ok(w.k2 / PS2_PER_M)
    }

    fn wave_dispersion_um(
        &self,
        axis: OpticalAxis,
        lambda_um: f64,
        temperature_c: f64,
    ) -> Result<WaveDispersion> {
        let d = self.index_derivatives(axis, lambda_um, temperature_c, true)?;
        let lambda = lambda_um * UM;
        let omega = units::omega_from_um(lambda_um);
        let d2n_si = d.d2n / (UM * UM);
        Ok(WaveDispersion {
            k: d.n * omega / C,
            k1: (d.n - lambda_um * d.dn) / C,
            k2: lambda.powi(3) / (2.0 * std::f64::consts::PI * C * C) * d2n_si,
        })
    }

    /// `k(ω) = n(ω)·ω/c` in rad/m for angular frequency `omega` (rad/s).
    pub fn wavevector(&self, axis: OpticalAxis, omega: f64, temperature_c: f64) -> Result<f64> {
        let lambda_um = units::um_from_omega(omega);
        let n = self.refractive_index(axis, lambda_um, temperature_c)?;
        Ok(n * omega / C)
    }

    /// `k`, `dk/dω` and `d²k/dω²` at angular frequency `omega`, SI units.
    pub fn wave_dispersion(
        &self,
        axis: OpticalAxis,
        omega: f64,
        temperature_c: f64,
    ) -> Result<WaveDispersion> {
        self.wave_dispersion_um(axis, units::um_from_omega(omega), temperature_c)
    }
}
