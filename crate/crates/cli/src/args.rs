use std::path::PathBuf;

use cgvm_core::OpticalAxis;
use clap::{Args, Parser, Subcommand};

use crate::config::Format;

#[derive(Debug, Parser)]
#[command(
    name = "cgvm",
    version,
    about = "Phase matching, joint spectra and squeezing for degenerate PDC"
)]
pub struct Cli {
    /// Crystal data file (TOML); defaults to the bundled 5% MgO:LN record.
    #[arg(long, global = true, value_name = "FILE")]
    pub crystal: Option<PathBuf>,

    /// Run configuration (TOML, unit-suffixed keys).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Grid points per frequency axis.
    #[arg(long = "grid-n", global = true, value_name = "INT")]
    pub grid_n: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Refractive index, group index and GVD over a wavelength range.
    Dispersion(DispersionArgs),
    /// Solve for group-velocity-matched wavelengths (and optionally a temperature).
    Cgvm(CgvmArgs),
    /// Poling period, Taylor coefficients and walk-off for the configured process.
    Poling,
    /// Joint spectral amplitude on the frequency grid.
    Jsa(JsaArgs),
    /// Leading Schmidt modes and all Schmidt coefficients.
    Modes(ModesArgs),
    /// Full squeezing budget for the configured crystal.
    Squeeze,
    /// Squeezing versus crystal length.
    Scan(ScanArgs),
}

#[derive(Debug, Args)]
pub struct DispersionArgs {
    #[arg(long = "lambda-min-um")]
    pub lambda_min_um: Option<f64>,
    #[arg(long = "lambda-max-um")]
    pub lambda_max_um: Option<f64>,
    /// Samples per axis, placed at the centres of equal bins.
    #[arg(long, default_value_t = 300)]
    pub samples: usize,
    /// Axes to tabulate (comma separated); defaults to all crystal axes.
    #[arg(long, value_delimiter = ',')]
    pub axes: Vec<OpticalAxis>,
    #[arg(long = "temperature-c")]
    pub temperature_c: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CgvmArgs {
    #[arg(long = "pump-axis")]
    pub pump_axis: Option<OpticalAxis>,
    #[arg(long = "signal-axis")]
    pub signal_axis: Option<OpticalAxis>,
    /// Signal-wavelength bracket LO,HI; without it the valid range is scanned.
    #[arg(long = "bracket-um", value_delimiter = ',')]
    pub bracket_um: Option<Vec<f64>>,
    #[arg(long = "temperature-c")]
    pub temperature_c: Option<f64>,
    /// Solve for the temperature that puts the matched wavelength here.
    #[arg(long = "target-um")]
    pub target_um: Option<f64>,
    #[arg(long = "temperature-bracket-c", value_delimiter = ',', default_values_t = [-20.0, 100.0])]
    pub temperature_bracket_c: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct JsaArgs {
    /// Also export real and imaginary parts.
    #[arg(long)]
    pub complex: bool,
}

#[derive(Debug, Args)]
pub struct ModesArgs {
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub count: u32,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long = "lengths-mm", value_delimiter = ',', required = true, num_args = 1..)]
    pub lengths_mm: Vec<f64>,
}
