mod args;
mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::Context;
use config::{Overrides, Resolved, RunConfig};
use error::{CliError, CliResult};
use output::Sink;

fn run(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let run = Resolved::new(
        cfg,
        Overrides {
            crystal: cli.crystal.as_deref(),
            out: cli.out.as_deref(),
            format: cli.format,
            grid_n: cli.grid_n,
        },
    )?;
    let sink = Sink {
        dir: run.out_dir.clone(),
        format: run.format,
        digits: run.digits,
    };
    let ctx = Context { run, sink };
    match &cli.command {
        Command::Dispersion(a) => commands::dispersion(&ctx, a),
        Command::Cgvm(a) => commands::cgvm(&ctx, a),
        Command::Poling => commands::poling(&ctx),
        Command::Jsa(a) => commands::jsa_cmd(&ctx, a),
        Command::Modes(a) => commands::modes(&ctx, a),
        Command::Squeeze => commands::squeeze(&ctx),
        Command::Scan(a) => commands::scan(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let err = CliError::usage(first.trim_start_matches("error: "));
            eprintln!("{err}");
            return err.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
