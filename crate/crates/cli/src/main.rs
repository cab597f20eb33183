//! `repeater`: rate reports, optimized sweeps, scheme rankings and Monte
//! Carlo validation tables.
//!
//! Exit codes: 0 success, 2 configuration or parameter error, 3 internal
//! consistency error.

mod run_config;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use repeater_core::chain::{default_validation_grid, validate_report};
use repeater_core::optimize::{compare_schemes, optimize_grid, optimize_inner};
use repeater_core::secret::evaluate;
use repeater_core::simplex::SimplexOptions;
use serde::Serialize;

use run_config::{Axis, RunConfig};

#[derive(Parser)]
#[command(name = "repeater", version, about = "Quantum repeater rate analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run document; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the table or report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write a JSON report to this path.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Monte Carlo seed; overrides the `seed` key.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// `section.key=value`, applied on top of the run document.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the repeater described in the `repeater` section.
    Rate,
    /// Best configuration of each family along one axis.
    Sweep {
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// Append every evaluated grid cell after the winners.
        #[arg(long)]
        all_cells: bool,
    },
    /// Rank the families at each distance of the sweep grid.
    Compare,
    /// Analytic distribution times against the chain simulation.
    Validate,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Distance,
    Cooperativity,
}

/// An error together with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<repeater_core::Error>() {
            Some(repeater_core::Error::Parameter(_)) | None => 2,
            Some(_) => 3,
        };
        Failure { code, error }
    }
}

impl From<repeater_core::Error> for Failure {
    fn from(e: repeater_core::Error) -> Self {
        anyhow::Error::new(e).into()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mut cfg = RunConfig::load(cli.config.as_deref(), &cli.overrides)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    match &cli.command {
        Command::Rate => rate(cli, &cfg),
        Command::Sweep { axis, all_cells } => {
            let axis = match axis {
                AxisArg::Distance => Axis::Distance,
                AxisArg::Cooperativity => Axis::Cooperativity,
            };
            let out = optimize_grid(&cfg.sweep_spec(axis)?, *all_cells)?;
            emit(
                cli.out.as_deref(),
                &table::sweep_csv(axis, &out.winners, &out.cells),
            )?;
            write_json(cli.json.as_deref(), &out)
        }
        Command::Compare => {
            let rows = compare_schemes(&cfg.sweep_spec(Axis::Distance)?)?;
            emit(cli.out.as_deref(), &table::ranking_csv(&rows))?;
            write_json(cli.json.as_deref(), &rows)
        }
        Command::Validate => {
            if cfg.validation.trials == 0 {
                return Err(anyhow!("validation.trials must be at least 1").into());
            }
            let base = cfg.validation_base();
            base.validate()?;
            let rows = validate_report(
                &default_validation_grid(&base),
                cfg.validation.trials,
                cfg.seed,
            )?;
            emit(cli.out.as_deref(), &table::validation_csv(&rows))?;
            write_json(cli.json.as_deref(), &rows)
        }
    }
}

fn rate(cli: &Cli, cfg: &RunConfig) -> Result<(), Failure> {
    let mut config = cfg.repeater();
    config.validate()?;
    if cfg.repeater.optimize {
        let inner = optimize_inner(&config, &SimplexOptions::default());
        config.window_s = inner.window_s;
        if let Some(e) = inner.eps_sq {
            config.excitation_prob = e;
        }
    }
    let report = evaluate(&config)?;
    emit(cli.out.as_deref(), &table::report_block(&config, &report))?;
    #[derive(Serialize)]
    struct RateJson<'a> {
        config: &'a repeater_core::RepeaterConfig,
        report: &'a repeater_core::RateReport,
    }
    write_json(
        cli.json.as_deref(),
        &RateJson {
            config: &config,
            report: &report,
        },
    )
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), Failure> {
    let Some(p) = path else { return Ok(()) };
    let text = serde_json::to_string_pretty(value).context("cannot serialize report")?;
    std::fs::write(p, text + "\n").with_context(|| format!("cannot write {}", p.display()))?;
    Ok(())
}
