//! Run configuration.
//!
//! ```toml
//! [arrival]                 # inter-arrival time A
//! family = "uniform"
//! low = 0.0
//! high = 2.0
//!
//! [packet]                  # packet energy X
//! family = "uniform"
//! low = 0.0
//! high = 2.0
//!
//! [protocol]
//! mode = "two_bit"          # two_bit | one_bit | zero_bit | zero_bit_discharge
//! u = 10.0
//! p = 2.0
//! theta1 = 0.1              # optional
//! theta3 = 0.9              # optional, zero_bit_discharge
//! period = 40.0             # zero_bit only
//!
//! [link]                    # optional, needed by `power`
//! zeta = 1.0
//! noise = 1.0
//! theta2 = 0.1
//! symbol_duration = 1.0
//! fading = { family = "exponential", rate = 1.0 }
//!
//! [sim]                     # optional
//! cycles = 10000
//! seed = 1
//! residual_mode = "stationary_residual"   # or fresh_start
//! u_grid = [5.0, 10.0, 20.0]
//! ```
//!
//! Distribution families: `deterministic {value}`, `uniform {low, high}`,
//! `exponential {rate}`, `gamma {shape, scale}`.

use std::fs;
use std::path::Path;

use ltharvest::link::LinkConfig;
use ltharvest::simulator::DEFAULT_CYCLES;
use ltharvest::{DistributionSpec, ProtocolConfig, ResidualMode, SimConfig};
use serde::Deserialize;
use toml::{Table, Value};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub arrival: DistributionSpec,
    pub packet: DistributionSpec,
    pub protocol: ProtocolConfig,
    pub link: Option<LinkConfig>,
    #[serde(default)]
    pub sim: SimSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default = "default_cycles")]
    pub cycles: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub residual_mode: ResidualMode,
    #[serde(default = "default_grid")]
    pub u_grid: Vec<f64>,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            cycles: default_cycles(),
            seed: default_seed(),
            residual_mode: ResidualMode::default(),
            u_grid: default_grid(),
        }
    }
}

fn default_cycles() -> usize {
    DEFAULT_CYCLES
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// 5, 10, ..., 100.
fn default_grid() -> Vec<f64> {
    (1..=20).map(|i| 5.0 * i as f64).collect()
}

impl Config {
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, overrides)
    }

    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut table: Table = text
            .parse()
            .map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        for item in overrides {
            apply_override(&mut table, item)?;
        }
        Config::deserialize(Value::Table(table))
            .map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig::new(self.protocol, self.arrival, self.packet)
            .with_cycles(self.sim.cycles)
            .with_seed(self.sim.seed)
            .with_residual_mode(self.sim.residual_mode)
    }

    pub fn link(&self) -> Result<&LinkConfig, CliError> {
        self.link
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [link] section".into()))
    }
}

/// Applies `a.b.c=value`. The value is read as a TOML literal, falling back
/// to a bare string, so `protocol.mode=one_bit` works unquoted.
fn apply_override(table: &mut Table, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{item}` is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("bad override key `{key}`")));
    }
    let value = parse_value(raw.trim());

    let (last, parents) = path.split_last().unwrap();
    let mut node = table;
    for part in parents {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override `{key}`: `{part}` is not a section")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}
