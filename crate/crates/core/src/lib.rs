//! Duty-cycle and cycle-speed analytics for a level-triggered
//! harvest-then-consume energy protocol.
//!
//! A node harvests until its battery crosses a threshold `u`, then consumes
//! at constant power `p` until the battery is empty. How much the controller
//! can see of the battery state (two bits, one bit, or nothing) decides
//! whether the phases end on a level crossing or on a timer. This crate
//! provides:
//!
//! * [`distributions`]: parametric inter-arrival and packet-size laws.
//! * [`renewal`]: the renewal constants and recharge/discharge time laws.
//! * [`analytic`]: closed-form `rho` and `omega` for each ESI mode.
//! * [`simulator`]: a seeded Monte Carlo model to check the formulas.
//! * [`link`]: power sizing from an SNR-outage target.

pub mod analytic;
pub mod distributions;
pub mod error;
pub mod link;
pub mod renewal;
pub mod rng;
pub mod simulator;
pub mod stats;

pub use analytic::{EsiMode, Metrics, ProtocolConfig};
pub use distributions::DistributionSpec;
pub use error::{Error, Result};
pub use renewal::RenewalConstants;
pub use rng::RandomStream;
pub use simulator::{ResidualMode, SimConfig, SimResult};
