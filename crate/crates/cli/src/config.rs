//! Run configuration: TOML with unit-suffixed keys; unknown keys are errors.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use cgvm_core::units::{omega_from_thz, MM};
use cgvm_core::{
    CrystalModel, GridSpec, OpticalAxis, PdcConfig, PdcType, PhaseReference, PumpPulse,
};
use clap::ValueEnum;
use serde::Deserialize;

use crate::error::{CliError, CliResult, Kind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub crystal_file: Option<PathBuf>,
    pub pdc: PdcSection,
    pub pump: PumpSection,
    pub grid: GridSection,
    pub output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PdcSection {
    #[serde(rename = "type")]
    pub pdc_type: PdcType,
    pub pump_axis: Option<OpticalAxis>,
    pub signal_axis: Option<OpticalAxis>,
    pub pump_wavelength_um: f64,
    pub temperature_c: f64,
    pub crystal_length_mm: f64,
    pub poling_period_um: Option<f64>,
    pub phase_reference: PhaseReference,
}

// Defaults describe the 80 mm group-velocity-matched design.
impl Default for PdcSection {
    fn default() -> Self {
        PdcSection {
            pdc_type: PdcType::TypeI,
            pump_axis: None,
            signal_axis: None,
            pump_wavelength_um: 0.775,
            temperature_c: 11.0,
            crystal_length_mm: 80.0,
            poling_period_um: None,
            phase_reference: PhaseReference::CrystalCenter,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PumpSection {
    pub bandwidth_nm: f64,
    pub mean_power_mw: f64,
    pub repetition_rate_mhz: f64,
}

impl Default for PumpSection {
    fn default() -> Self {
        PumpSection {
            bandwidth_nm: 4.0,
            mean_power_mw: 12.0,
            repetition_rate_mhz: 100.0,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
    /// Half-width of the detuning window in linear frequency.
    pub extent_thz: Option<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            n: cgvm_core::jsa::DEFAULT_GRID_N,
            extent_thz: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub format: Format,
    /// Significant digits in CSV cells.
    pub precision_digits: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: PathBuf::from("."),
            format: Format::Csv,
            precision_digits: 9,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::usage(format!("config: {}", e.message())))
    }

    /// Read a config file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
        let mut cfg = RunConfig::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(file) = &cfg.crystal_file {
            cfg.crystal_file = Some(base.join(file));
        }
        cfg.output.directory = base.join(&cfg.output.directory);
        Ok(cfg)
    }
}

/// Everything a subcommand needs, after command-line overrides.
pub struct Resolved {
    pub crystal: Arc<CrystalModel>,
    pub pdc: PdcSection,
    pub pump: PumpSection,
    pub grid: GridSection,
    pub out_dir: PathBuf,
    pub format: Format,
    pub digits: usize,
}

pub struct Overrides<'a> {
    pub crystal: Option<&'a Path>,
    pub out: Option<&'a Path>,
    pub format: Option<Format>,
    pub grid_n: Option<usize>,
}

pub fn load_crystal(path: Option<&Path>) -> CliResult<CrystalModel> {
    match path {
        None => Ok(CrystalModel::mgo_ln()),
        Some(p) => CrystalModel::from_path(p)
            .map_err(|e| CliError::io(p.display(), e))?
            .map_err(|e| CliError::new(Kind::Domain, format!("{}: {e}", p.display()))),
    }
}

impl Resolved {
    pub fn new(cfg: RunConfig, ov: Overrides<'_>) -> CliResult<Self> {
        let crystal_path = ov.crystal.map(Path::to_path_buf).or(cfg.crystal_file);
        let crystal = Arc::new(load_crystal(crystal_path.as_deref())?);
        let digits = cfg.output.precision_digits;
        if !(1..=17).contains(&digits) {
            return Err(CliError::usage(format!(
                "config: precision_digits = {digits} outside 1..=17"
            )));
        }
        let mut grid = cfg.grid;
        if let Some(n) = ov.grid_n {
            grid.n = n;
        }
        Ok(Resolved {
            crystal,
            pdc: cfg.pdc,
            pump: cfg.pump,
            grid,
            out_dir: ov
                .out
                .map(Path::to_path_buf)
                .unwrap_or(cfg.output.directory),
            format: ov.format.unwrap_or(cfg.output.format),
            digits,
        })
    }

    pub fn pump_axis(&self) -> OpticalAxis {
        self.pdc.pump_axis.unwrap_or(OpticalAxis::Extraordinary)
    }

    pub fn signal_axis(&self) -> OpticalAxis {
        self.pdc.signal_axis.unwrap_or(match self.pdc.pdc_type {
            PdcType::Type0 => self.pump_axis(),
            PdcType::TypeI => OpticalAxis::Ordinary,
        })
    }

    pub fn pdc_config(&self) -> CliResult<PdcConfig> {
        let p = &self.pdc;
        let cfg = PdcConfig::new(
            self.crystal.clone(),
            p.pdc_type,
            self.pump_axis(),
            self.signal_axis(),
            p.pump_wavelength_um,
            p.temperature_c,
            p.crystal_length_mm * MM,
        )?;
        Ok(match p.poling_period_um {
            Some(period) => cfg.with_poling_period_um(period)?,
            None => cfg,
        })
    }

    pub fn pump_pulse(&self) -> CliResult<PumpPulse> {
        Ok(PumpPulse::new(
            self.pdc.pump_wavelength_um,
            self.pump.bandwidth_nm,
            self.pump.mean_power_mw * 1e-3,
            self.pump.repetition_rate_mhz * 1e6,
        )?)
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            n: self.grid.n,
            omega_max: self.grid.extent_thz.map(omega_from_thz),
        }
    }
}
