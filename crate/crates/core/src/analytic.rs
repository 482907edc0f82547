//! Closed-form duty cycle `rho` and cycle speed `omega` for the
//! level-triggered harvest-then-consume protocol.
//!
//! * Two-bit ESI: the controller sees "empty" and "above threshold"; both
//!   phase lengths are random.
//! * One-bit ESI: only "empty" is visible, so the harvest phase runs for a
//!   fixed switch time `t_c` chosen to meet an energy-outage target.
//! * Zero-bit ESI: both phases are timed. [`EsiMode::ZeroBit`] fixes the
//!   cycle period `T` and spends a fixed energy per cycle;
//!   [`EsiMode::ZeroBitDischarge`] instead sizes `T` so the battery fully
//!   drains with a target probability.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distributions::std_normal_quantile;
use crate::error::{check_nonnegative, check_positive, check_probability, Error, PeriodBound, Result};
use crate::renewal::RenewalConstants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EsiMode {
    TwoBit,
    OneBit,
    ZeroBit,
    ZeroBitDischarge,
}

impl std::fmt::Display for EsiMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EsiMode::TwoBit => "two_bit",
            EsiMode::OneBit => "one_bit",
            EsiMode::ZeroBit => "zero_bit",
            EsiMode::ZeroBitDischarge => "zero_bit_discharge",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub mode: EsiMode,
    /// Energy threshold.
    #[serde(default)]
    pub u: f64,
    /// Constant consume power.
    pub p: f64,
    /// Energy-outage target `P(U(t_c) <= u)`.
    #[serde(default = "default_theta1")]
    pub theta1: f64,
    /// Full-discharge target for [`EsiMode::ZeroBitDischarge`].
    #[serde(default = "default_theta3")]
    pub theta3: f64,
    /// Cycle period, [`EsiMode::ZeroBit`] only.
    #[serde(default)]
    pub period: Option<f64>,
}

fn default_theta1() -> f64 {
    0.1
}

fn default_theta3() -> f64 {
    0.9
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        check_nonnegative("u", self.u)?;
        check_positive("p", self.p)?;
        check_probability("theta1", self.theta1)?;
        check_probability("theta3", self.theta3)?;
        if self.mode == EsiMode::ZeroBit {
            match self.period {
                Some(t) => check_positive("period", t)?,
                None => {
                    return Err(Error::Domain {
                        name: "period",
                        value: f64::NAN,
                        reason: "zero_bit mode requires a cycle period",
                    })
                }
            }
        }
        Ok(())
    }
}

/// Duty cycle, cycle speed, and whatever bounds or limits the mode exposes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub rho: f64,
    pub omega: f64,
    /// Switch-on time for the timed-harvest modes.
    pub t_c: Option<f64>,
    pub aux: BTreeMap<String, f64>,
}

impl Metrics {
    fn new(rho: f64, omega: f64, t_c: Option<f64>) -> Self {
        let mut aux = BTreeMap::new();
        aux.insert("mean_cycle".to_owned(), 1.0 / omega);
        aux.insert("mean_tau_d".to_owned(), rho / omega);
        Self { rho, omega, t_c, aux }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.aux.insert(key.to_owned(), value);
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.aux.get(key).copied()
    }
}

/// Long-run duty cycle `lambda x_bar / (lambda x_bar + p)` shared by every
/// mode in the large-threshold limit.
pub fn limiting_duty_cycle(k: &RenewalConstants, p: f64) -> f64 {
    let h = k.harvest_rate();
    h / (h + p)
}

pub fn two_bit_metrics(k: &RenewalConstants, u: f64, p: f64) -> Result<Metrics> {
    check_nonnegative("u", u)?;
    check_positive("p", p)?;
    let h = k.harvest_rate();
    let rho = (u + k.c3) / ((1.0 + p / h) * u + (p * k.c1 + k.c3));
    let mean_cycle = (1.0 / p + 1.0 / h) * u + (k.c1 + k.c3 / p);
    let bounds = two_bit_bounds(k, p)?;
    Ok(Metrics::new(rho, 1.0 / mean_cycle, None)
        .with("mean_tau_c", k.c1 + u / h)
        .with("rho_limit", bounds.rho_limit)
        .with("omega_max", bounds.omega_max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBitBounds {
    /// `rho` as `u -> infinity`.
    pub rho_limit: f64,
    /// `omega` as `u -> 0`; an upper bound on the two-bit cycle speed.
    pub omega_max: f64,
}

pub fn two_bit_bounds(k: &RenewalConstants, p: f64) -> Result<TwoBitBounds> {
    check_positive("p", p)?;
    Ok(TwoBitBounds {
        rho_limit: limiting_duty_cycle(k, p),
        omega_max: p / (p * k.c1 + k.c3),
    })
}

/// The `u = 0` scheme where each packet is consumed as soon as it lands.
///
/// This is the exact analysis of that scheme, not the `u -> 0` limit of
/// [`two_bit_metrics`]; the two differ because the stationary-residual
/// assumptions behind the two-bit formulas only hold for large `u`.
pub fn opportunistic_metrics(k: &RenewalConstants, p: f64) -> Result<Metrics> {
    check_positive("p", p)?;
    let rho = 1.0 / (1.0 + p * k.c1 / k.x_bar);
    let omega = 1.0 / (k.c1 + k.x_bar / p);
    Ok(Metrics::new(rho, omega, None))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchTime {
    pub t_c: f64,
    /// Value at `u = 0`.
    pub t_c_min: f64,
}

/// Harvest duration after which `P(U(t_c) <= u) = theta1`.
pub fn one_bit_switch_time(k: &RenewalConstants, u: f64, theta1: f64) -> Result<SwitchTime> {
    check_nonnegative("u", u)?;
    check_probability("theta1", theta1)?;
    k.warn_small_threshold(u);
    let z = std_normal_quantile(1.0 - theta1)?;
    let (mean, var) = k.recharge_moments(u)?;
    let t_c = mean + z * var.max(0.0).sqrt();
    let t_c_min = k.c1 + z * k.c2.max(0.0).sqrt();
    if !(t_c > 0.0) {
        return Err(Error::InfeasibleSwitchTime { t_c });
    }
    Ok(SwitchTime { t_c, t_c_min })
}

pub fn one_bit_metrics(k: &RenewalConstants, u: f64, p: f64, theta1: f64) -> Result<Metrics> {
    check_positive("p", p)?;
    let sw = one_bit_switch_time(k, u, theta1)?;
    let h = k.harvest_rate();
    let rho = h / (p + h);
    let omega = p / ((p + h) * sw.t_c);
    let mut m = Metrics::new(rho, omega, Some(sw.t_c)).with("t_c_min", sw.t_c_min);
    if sw.t_c_min > 0.0 {
        m = m.with("omega_bound", p / ((p + h) * sw.t_c_min));
    }
    Ok(m)
}

/// Normalized coefficients of the zero-bit duty-cycle equation
/// `1 - rho = d + sqrt(c + b rho) + a rho` and of the feasibility quadratic
/// `f(T) = K T^2 + L T + M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroBitCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub k: f64,
    pub l: f64,
    pub m: f64,
    pub t_c_min: f64,
    /// Largest root of `f`; zero when `f` has no real roots.
    pub t_plus: f64,
    /// `Phi^{-1}(1 - theta1)`.
    pub z: f64,
    pub period: f64,
}

impl ZeroBitCoefficients {
    /// `f(T) = T^2 ((a + d)^2 - (b + c))`.
    pub fn feasibility_quadratic(&self, period: f64) -> f64 {
        (self.k * period + self.l) * period + self.m
    }

    /// Signed residual of the pre-squaring equation at `rho`. The square
    /// root carries the sign of `z`, so `theta1 > 0.5` is handled too.
    pub fn residual(&self, rho: f64) -> f64 {
        let root = (self.c + self.b * rho).max(0.0).sqrt();
        1.0 - rho - self.d - self.z.signum() * root - self.a * rho
    }

    /// Lower bound `max(t_c_min, T+)` on feasible periods.
    pub fn min_period(&self) -> f64 {
        self.t_c_min.max(self.t_plus)
    }
}

pub fn zero_bit_coefficients(
    k: &RenewalConstants,
    p: f64,
    period: f64,
    theta1: f64,
) -> Result<ZeroBitCoefficients> {
    check_positive("p", p)?;
    check_positive("period", period)?;
    check_probability("theta1", theta1)?;
    let z = std_normal_quantile(1.0 - theta1)?;
    let z2 = z * z;
    let a = p / k.harvest_rate();
    let b = p * k.gamma_sq * z2 / (k.x_bar.powi(3) * period);
    let c = k.c2 * z2 / (period * period);
    let d = k.c1 / period;

    // (a + d)^2 > b + c, multiplied through by T^2.
    let kq = a * a;
    let lq = 2.0 * a * k.c1 - p * k.gamma_sq * z2 / k.x_bar.powi(3);
    let mq = k.c1 * k.c1 - k.c2 * z2;
    let disc = lq * lq - 4.0 * kq * mq;
    let t_plus = if disc < 0.0 {
        0.0
    } else {
        (-lq + disc.sqrt()) / (2.0 * kq)
    };

    Ok(ZeroBitCoefficients {
        a,
        b,
        c,
        d,
        k: kq,
        l: lq,
        m: mq,
        t_c_min: k.c1 + z * k.c2.max(0.0).sqrt(),
        t_plus,
        z,
        period,
    })
}

const RESIDUAL_TOL: f64 = 1e-9;

/// Zero-bit duty cycle at a fixed cycle period.
///
/// Squaring the defining equation admits a spurious root; both roots of the
/// quadratic are checked against the unsquared equation and the one that
/// satisfies it inside `(0, 1)` is returned.
pub fn zero_bit_duty_cycle(
    k: &RenewalConstants,
    p: f64,
    period: f64,
    theta1: f64,
) -> Result<Metrics> {
    let co = zero_bit_coefficients(k, p, period, theta1)?;
    if period <= co.t_c_min {
        return Err(Error::InfeasiblePeriod {
            period,
            bound: PeriodBound::SwitchTimeMin,
            limit: co.t_c_min,
        });
    }
    if co.feasibility_quadratic(period) <= 0.0 {
        return Err(Error::InfeasiblePeriod {
            period,
            bound: PeriodBound::Quadratic,
            limit: co.t_plus,
        });
    }

    let rho = solve_duty_cycle(&co).ok_or(Error::NoSolution { period })?;
    let t_c = (1.0 - rho) * period;
    let simplified_bound = k.lambda * k.lambda * k.gamma_sq * co.z * co.z / (p * k.x_bar);
    let mut m = Metrics::new(rho, 1.0 / period, Some(t_c))
        .with("a", co.a)
        .with("b", co.b)
        .with("c", co.c)
        .with("d", co.d)
        .with("t_c_min", co.t_c_min)
        .with("t_plus", co.t_plus)
        .with("period_bound_large_u", simplified_bound)
        .with("u", p * rho * period)
        .with("residual", co.residual(rho));
    if co.min_period() > 0.0 {
        m = m.with("omega_bound", 1.0 / co.min_period());
    }
    Ok(m)
}

fn solve_duty_cycle(co: &ZeroBitCoefficients) -> Option<f64> {
    let one_a = 1.0 + co.a;
    let one_d = 1.0 - co.d;
    let qa = one_a * one_a;
    let qb = 2.0 * one_a * one_d + co.b;
    let qc = one_d * one_d - co.c;
    let disc = co.b * co.b + 4.0 * one_a * (one_a * co.c + co.b * one_d);
    if disc < 0.0 {
        return None;
    }
    // Cancellation-free pair of roots.
    let q = 0.5 * (qb + qb.signum() * disc.sqrt());
    let mut roots = [q / qa, if q != 0.0 { qc / q } else { f64::NAN }];
    roots.sort_by(|x, y| x.total_cmp(y));

    roots
        .into_iter()
        .filter(|r| r.is_finite())
        .filter(|&r| {
            // Reject the spurious root: the unsquared side must carry the
            // sign of z.
            let lhs = one_d - one_a * r;
            co.z == 0.0 || lhs == 0.0 || lhs.signum() == co.z.signum()
        })
        .map(|r| polish(co, r))
        .find(|&r| r > 0.0 && r < 1.0 && co.residual(r).abs() < RESIDUAL_TOL)
}

fn polish(co: &ZeroBitCoefficients, mut rho: f64) -> f64 {
    for _ in 0..4 {
        let g = co.residual(rho);
        if g == 0.0 {
            break;
        }
        let root = (co.c + co.b * rho).sqrt();
        if root == 0.0 {
            break;
        }
        let dg = -1.0 - co.a - co.z.signum() * co.b / (2.0 * root);
        let next = rho - g / dg;
        if co.residual(next).abs() >= g.abs() {
            break;
        }
        rho = next;
    }
    rho
}

/// Cycle period that drains the battery with probability `theta3` after a
/// harvest of length `t_c`.
pub fn zero_bit_discharge_period(
    k: &RenewalConstants,
    t_c: f64,
    p: f64,
    theta3: f64,
) -> Result<f64> {
    check_positive("t_c", t_c)?;
    check_positive("p", p)?;
    check_probability("theta3", theta3)?;
    let z3 = std_normal_quantile(theta3)?;
    let period = (1.0 + k.harvest_rate() / p) * t_c
        + k.gamma() * k.lambda.powf(1.5) / p * t_c.sqrt() * z3;
    if period <= t_c {
        return Err(Error::InfeasibleDischargePeriod { period, t_c });
    }
    Ok(period)
}

/// [`zero_bit_discharge_period`] with `t_c` taken from the one-bit switch
/// time at `(u, theta1)`.
pub fn zero_bit_discharge_metrics(
    k: &RenewalConstants,
    u: f64,
    p: f64,
    theta1: f64,
    theta3: f64,
) -> Result<Metrics> {
    let sw = one_bit_switch_time(k, u, theta1)?;
    let period = zero_bit_discharge_period(k, sw.t_c, p, theta3)?;
    let rho = 1.0 - sw.t_c / period;
    let rho_asym = limiting_duty_cycle(k, p);
    let mut m = Metrics::new(rho, 1.0 / period, Some(sw.t_c))
        .with("period", period)
        .with("rho_asymptotic", rho_asym);
    if u > 0.0 {
        m = m.with("omega_asymptotic", p * rho_asym / u);
    }
    Ok(m)
}

/// Dispatch on [`ProtocolConfig::mode`].
pub fn analyze(k: &RenewalConstants, cfg: &ProtocolConfig) -> Result<Metrics> {
    cfg.validate()?;
    match cfg.mode {
        EsiMode::TwoBit => two_bit_metrics(k, cfg.u, cfg.p),
        EsiMode::OneBit => one_bit_metrics(k, cfg.u, cfg.p, cfg.theta1),
        EsiMode::ZeroBit => {
            zero_bit_duty_cycle(k, cfg.p, cfg.period.unwrap_or_default(), cfg.theta1)
        }
        EsiMode::ZeroBitDischarge => {
            zero_bit_discharge_metrics(k, cfg.u, cfg.p, cfg.theta1, cfg.theta3)
        }
    }
}
