use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use ltharvest::analytic::analyze;
use ltharvest::link::{symbol_rate, transmit_power};
use ltharvest::simulator::{simulate, sweep};
use ltharvest::RenewalConstants;

mod config;
mod report;

use config::Config;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ltharvest::Error),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(_) => 3,
            CliError::Output { .. } => 1,
        }
    }
}

/// Duty-cycle and cycle-speed analytics for level-triggered energy harvesting.
#[derive(Parser, Debug)]
#[command(name = "ltharvest", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form metrics for the configured mode.
    Analyze(Common),
    /// Monte Carlo estimate for the configured mode.
    Simulate(Common),
    /// Closed form and simulation over `sim.u_grid`, as CSV.
    Sweep(Common),
    /// Transmit power for the `[link]` SNR-outage target.
    Power(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// TOML config file.
    #[arg(long)]
    config: PathBuf,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config value, e.g. `protocol.u=20`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cycles: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<Config, CliError> {
        let mut overrides = self.overrides.clone();
        if let Some(seed) = self.seed {
            overrides.push(format!("sim.seed={seed}"));
        }
        if let Some(cycles) = self.cycles {
            overrides.push(format!("sim.cycles={cycles}"));
        }
        let cfg = Config::load(&self.config, &overrides)?;
        info!("seed {}", cfg.sim.seed);
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, output) = match &cli.command {
        Command::Analyze(c) => {
            let cfg = c.load()?;
            let k = RenewalConstants::derive(&cfg.arrival, &cfg.packet)?;
            let m = analyze(&k, &cfg.protocol)?;
            (c, report::metrics(&cfg.protocol.mode.to_string(), &m))
        }
        Command::Simulate(c) => {
            let cfg = c.load()?;
            (c, report::simulation(&simulate(&cfg.sim_config())?))
        }
        Command::Sweep(c) => {
            let cfg = c.load()?;
            (c, sweep(&cfg.sim_config(), &cfg.sim.u_grid)?.to_csv())
        }
        Command::Power(c) => {
            let cfg = c.load()?;
            let link = cfg.link()?;
            let p = transmit_power(link)?;
            let k = RenewalConstants::derive(&cfg.arrival, &cfg.packet)?;
            (c, report::power(p, &symbol_rate(&k, p, link.symbol_duration)?))
        }
    };
    emit(common.out.as_deref(), &output)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    let result = match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    result.map_err(|source| CliError::Output {
        path: out.map_or("stdout".into(), |p| p.display().to_string()),
        source,
    })
}

fn main() -> ExitCode {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Info)
        .format_timestamp(None)
        .format_target(false)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
