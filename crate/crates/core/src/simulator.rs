//! Seeded Monte Carlo simulation of the harvest-then-consume cycle.
//!
//! Each cycle starts from an empty battery. Energy packets of size `X`
//! arrive as a renewal process with inter-arrival time `A`; the first gap is
//! either the stationary residual of `A` or a fresh draw. No energy is
//! harvested while consuming.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, EsiMode, Metrics, ProtocolConfig};
use crate::distributions::{DistributionSpec, Sampler};
use crate::error::{Error, Result};
use crate::renewal::RenewalConstants;
use crate::rng::{derive_seed, RandomStream};
use crate::stats::{batch_ratio_ci, BATCHES};

pub const DEFAULT_CYCLES: usize = 10_000;
pub const MIN_CYCLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualMode {
    /// First gap drawn from the stationary residual of `A` (delayed renewal).
    #[default]
    StationaryResidual,
    /// First gap drawn from `A` itself.
    FreshStart,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub protocol: ProtocolConfig,
    pub arrival: DistributionSpec,
    pub packet: DistributionSpec,
    pub cycles: usize,
    pub seed: u64,
    pub residual_mode: ResidualMode,
}

impl SimConfig {
    pub fn new(protocol: ProtocolConfig, arrival: DistributionSpec, packet: DistributionSpec) -> Self {
        Self {
            protocol,
            arrival,
            packet,
            cycles: DEFAULT_CYCLES,
            seed: 0,
            residual_mode: ResidualMode::default(),
        }
    }

    pub fn with_cycles(mut self, cycles: usize) -> Self {
        self.cycles = cycles;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_residual_mode(mut self, mode: ResidualMode) -> Self {
        self.residual_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.cycles < MIN_CYCLES {
            return Err(Error::Domain {
                name: "cycles",
                value: self.cycles as f64,
                reason: "at least 100 cycles are required",
            });
        }
        self.protocol.validate()?;
        self.arrival.validate()?;
        self.packet.validate()
    }

    pub fn constants(&self) -> Result<RenewalConstants> {
        RenewalConstants::derive(&self.arrival, &self.packet)
    }
}

/// One simulated harvest-consume cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleRecord {
    pub tau_c: f64,
    pub tau_d: f64,
    /// Battery energy at switch-on.
    pub energy_at_switch: f64,
    /// `U(tau_c) - u`, two-bit only.
    pub overshoot: Option<f64>,
    /// `U(t_c) <= u` at switch-on; always false for two-bit.
    pub outage: bool,
    /// `U(t_c) / p <= T - t_c`, zero-bit discharge only.
    pub full_discharge: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub mode: EsiMode,
    pub rho_hat: f64,
    pub omega_hat: f64,
    pub mean_tau_c: f64,
    pub mean_tau_d: f64,
    pub outage_freq: Option<f64>,
    pub overshoot_mean: Option<f64>,
    pub discharge_freq: Option<f64>,
    /// 95% half-width from batch means.
    pub ci_rho: f64,
    pub ci_omega: f64,
    pub seed: u64,
    pub cycles: usize,
}

struct Harvester {
    arrival: Sampler,
    packet: Sampler,
    residual_mode: ResidualMode,
}

impl Harvester {
    fn new(cfg: &SimConfig) -> Result<Self> {
        Ok(Self {
            arrival: cfg.arrival.sampler()?,
            packet: cfg.packet.sampler()?,
            residual_mode: cfg.residual_mode,
        })
    }

    #[inline]
    fn first_gap(&self, rng: &mut RandomStream) -> f64 {
        match self.residual_mode {
            ResidualMode::StationaryResidual => self.arrival.sample_residual(rng),
            ResidualMode::FreshStart => self.arrival.sample(rng),
        }
    }

    /// Time of the first packet arrival that lifts the energy to at least
    /// `u`, and the energy at that instant. At least one packet is always
    /// collected.
    fn first_passage(&self, rng: &mut RandomStream, u: f64) -> (f64, f64) {
        let mut t = self.first_gap(rng);
        let mut energy = self.packet.sample(rng);
        while energy < u {
            t += self.arrival.sample(rng);
            energy += self.packet.sample(rng);
        }
        (t, energy)
    }

    /// Energy collected over `[0, duration]`, arrivals at the endpoint
    /// included.
    fn harvest_for(&self, rng: &mut RandomStream, duration: f64) -> f64 {
        let mut t = self.first_gap(rng);
        let mut energy = 0.0;
        while t <= duration {
            energy += self.packet.sample(rng);
            t += self.arrival.sample(rng);
        }
        energy
    }
}

/// Timed-harvest parameters resolved from the analytic formulas.
struct Schedule {
    t_c: f64,
    /// Consume-phase length for the zero-bit modes.
    t_d: Option<f64>,
    /// Threshold that defines an outage.
    u: f64,
}

fn schedule(k: &RenewalConstants, proto: &ProtocolConfig) -> Result<Option<Schedule>> {
    Ok(match proto.mode {
        EsiMode::TwoBit => None,
        EsiMode::OneBit => Some(Schedule {
            t_c: analytic::one_bit_switch_time(k, proto.u, proto.theta1)?.t_c,
            t_d: None,
            u: proto.u,
        }),
        EsiMode::ZeroBit => {
            let period = proto.period.unwrap_or_default();
            let m = analytic::zero_bit_duty_cycle(k, proto.p, period, proto.theta1)?;
            let t_c = m.t_c.expect("zero-bit metrics carry t_c");
            Some(Schedule {
                t_c,
                t_d: Some(period - t_c),
                u: m.get("u").expect("zero-bit metrics carry u"),
            })
        }
        EsiMode::ZeroBitDischarge => {
            let m = analytic::zero_bit_discharge_metrics(k, proto.u, proto.p, proto.theta1, proto.theta3)?;
            let t_c = m.t_c.expect("discharge metrics carry t_c");
            let period = m.get("period").expect("discharge metrics carry period");
            Some(Schedule {
                t_c,
                t_d: Some(period - t_c),
                u: proto.u,
            })
        }
    })
}

/// Per-cycle realizations for any mode.
pub fn simulate_cycles(cfg: &SimConfig) -> Result<Vec<CycleRecord>> {
    cfg.validate()?;
    let k = cfg.constants()?;
    let harvester = Harvester::new(cfg)?;
    let proto = &cfg.protocol;
    let plan = schedule(&k, proto)?;
    let mut rng = RandomStream::new(cfg.seed);
    let mut records = Vec::with_capacity(cfg.cycles);

    for _ in 0..cfg.cycles {
        let rec = match &plan {
            None => {
                let (tau_c, energy) = harvester.first_passage(&mut rng, proto.u);
                CycleRecord {
                    tau_c,
                    tau_d: energy / proto.p,
                    energy_at_switch: energy,
                    overshoot: Some(energy - proto.u),
                    outage: false,
                    full_discharge: None,
                }
            }
            Some(s) => {
                let energy = harvester.harvest_for(&mut rng, s.t_c);
                let tau_d = s.t_d.unwrap_or(energy / proto.p);
                let full_discharge = match proto.mode {
                    EsiMode::ZeroBitDischarge => Some(energy / proto.p <= tau_d),
                    _ => None,
                };
                CycleRecord {
                    tau_c: s.t_c,
                    tau_d,
                    energy_at_switch: energy,
                    overshoot: None,
                    outage: energy <= s.u,
                    full_discharge,
                }
            }
        };
        records.push(rec);
    }
    Ok(records)
}

/// Ratio-of-sums estimators and batch-means intervals over `records`.
pub fn summarize(mode: EsiMode, records: &[CycleRecord], seed: u64) -> SimResult {
    let n = records.len();
    let nf = n as f64;
    let sum_c: f64 = records.iter().map(|r| r.tau_c).sum();
    let sum_d: f64 = records.iter().map(|r| r.tau_d).sum();

    let batch_size = (n / BATCHES).max(1);
    let batches: Vec<(f64, f64, f64)> = records
        .chunks(batch_size)
        .take(BATCHES)
        .enumerate()
        .map(|(i, chunk)| {
            // The remainder joins the last batch.
            let chunk = if i + 1 == BATCHES { &records[i * batch_size..] } else { chunk };
            let d: f64 = chunk.iter().map(|r| r.tau_d).sum();
            let total: f64 = chunk.iter().map(|r| r.tau_c + r.tau_d).sum();
            (d, total, chunk.len() as f64)
        })
        .collect();
    let ci_rho = batch_ratio_ci(batches.iter().map(|&(d, total, _)| (d, total)));
    let ci_omega = batch_ratio_ci(batches.iter().map(|&(_, total, len)| (len, total)));

    let timed = !matches!(mode, EsiMode::TwoBit);
    let mut rho_hat = sum_d / (sum_c + sum_d);
    let mut omega_hat = nf / (sum_c + sum_d);
    if matches!(mode, EsiMode::ZeroBit | EsiMode::ZeroBitDischarge) {
        if let Some(r) = records.first() {
            // Both phases are fixed: the estimators are exact.
            let period = r.tau_c + r.tau_d;
            rho_hat = 1.0 - r.tau_c / period;
            omega_hat = 1.0 / period;
        }
    }

    let frac = |pred: &dyn Fn(&CycleRecord) -> bool| records.iter().filter(|r| pred(r)).count() as f64 / nf;
    SimResult {
        mode,
        rho_hat,
        omega_hat,
        mean_tau_c: sum_c / nf,
        mean_tau_d: sum_d / nf,
        outage_freq: timed.then(|| frac(&|r| r.outage)),
        overshoot_mean: (!timed)
            .then(|| records.iter().filter_map(|r| r.overshoot).sum::<f64>() / nf),
        discharge_freq: matches!(mode, EsiMode::ZeroBitDischarge)
            .then(|| frac(&|r| r.full_discharge == Some(true))),
        ci_rho,
        ci_omega,
        seed,
        cycles: n,
    }
}

pub fn simulate(cfg: &SimConfig) -> Result<SimResult> {
    let records = simulate_cycles(cfg)?;
    Ok(summarize(cfg.protocol.mode, &records, cfg.seed))
}

fn require_mode(cfg: &SimConfig, allowed: &[EsiMode]) -> Result<()> {
    if allowed.contains(&cfg.protocol.mode) {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "mode",
            value: f64::NAN,
            reason: "protocol mode does not match the requested simulation",
        })
    }
}

pub fn simulate_two_bit(cfg: &SimConfig) -> Result<SimResult> {
    require_mode(cfg, &[EsiMode::TwoBit])?;
    simulate(cfg)
}

pub fn simulate_one_bit(cfg: &SimConfig) -> Result<SimResult> {
    require_mode(cfg, &[EsiMode::OneBit])?;
    simulate(cfg)
}

pub fn simulate_zero_bit(cfg: &SimConfig) -> Result<SimResult> {
    require_mode(cfg, &[EsiMode::ZeroBit, EsiMode::ZeroBitDischarge])?;
    simulate(cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub u: f64,
    pub analytic: Metrics,
    pub sim: SimResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_CSV_HEADER: &str =
    "u,rho_analytic,omega_analytic,rho_sim,rho_ci,omega_sim,omega_ci,outage_freq,seed";

impl SweepTable {
    /// CSV with shortest round-trip float formatting and `\n` line endings.
    /// `outage_freq` is empty for two-bit rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let outage = r.sim.outage_freq.map(|f| f.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.u,
                r.analytic.rho,
                r.analytic.omega,
                r.sim.rho_hat,
                r.sim.ci_rho,
                r.sim.omega_hat,
                r.sim.ci_omega,
                outage,
                r.sim.seed
            ));
        }
        out
    }
}

/// Protocol for one grid point. In zero-bit mode the grid value is the
/// energy spent per cycle, which fixes `T = t_c(u) + u / p`.
fn protocol_at(k: &RenewalConstants, base: &ProtocolConfig, u: f64) -> Result<ProtocolConfig> {
    let mut proto = ProtocolConfig { u, ..*base };
    if base.mode == EsiMode::ZeroBit {
        let t_c = analytic::one_bit_switch_time(k, u, base.theta1)?.t_c;
        proto.period = Some(t_c + u / base.p);
    }
    Ok(proto)
}

/// Analytic and simulated metrics at each threshold. Row `i` runs on seed
/// `derive_seed(base.seed, i)`; rows execute in parallel.
pub fn sweep(base: &SimConfig, u_grid: &[f64]) -> Result<SweepTable> {
    if u_grid.is_empty() {
        return Err(Error::Domain {
            name: "u_grid",
            value: f64::NAN,
            reason: "grid must be nonempty",
        });
    }
    if let Some(w) = u_grid.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::Domain {
            name: "u_grid",
            value: w[1],
            reason: "grid must be strictly increasing",
        });
    }
    let k = base.constants()?;
    let rows = u_grid
        .par_iter()
        .enumerate()
        .map(|(i, &u)| {
            let protocol = protocol_at(&k, &base.protocol, u)?;
            let cfg = SimConfig {
                protocol,
                seed: derive_seed(base.seed, i as u64),
                ..*base
            };
            let analytic = analytic::analyze(&k, &protocol)?;
            let sim = simulate(&cfg)?;
            Ok(SweepRow { u, analytic, sim })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { rows })
}
