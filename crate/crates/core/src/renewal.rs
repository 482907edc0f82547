//! Renewal-theoretic constants and the normal approximations to the
//! recharge (first-passage) and discharge time distributions.
//!
//! Energy, time and power are plain reals in one consistent unit system.

use log::warn;

use crate::distributions::{std_normal_cdf, DistributionSpec};
use crate::error::{check_nonnegative, check_positive, Error, Result};

/// Constants derived from the first three moments of `A` and the first two
/// of `X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenewalConstants {
    /// Arrival rate `1 / E[A]`.
    pub lambda: f64,
    /// Mean packet size `E[X]`.
    pub x_bar: f64,
    pub var_a: f64,
    pub var_x: f64,
    /// Raw third moment of `A`.
    pub mu_a3: f64,
    /// `var_x / lambda^2 + var_a * x_bar^2`.
    pub gamma_sq: f64,
    /// Constant term of the mean recharge time, `lambda * gamma_sq / (2 x_bar^2)`.
    pub c1: f64,
    /// Constant term of the recharge-time variance.
    pub c2: f64,
    /// Mean overshoot `(var_x + x_bar^2) / (2 x_bar)`.
    pub c3: f64,
}

impl RenewalConstants {
    pub fn derive(arrival: &DistributionSpec, packet: &DistributionSpec) -> Result<Self> {
        let a = arrival.moments()?;
        let x = packet.moments()?;
        if a.mean <= 0.0 {
            return Err(Error::Degenerate("inter-arrival time has zero mean"));
        }
        if x.mean <= 0.0 {
            return Err(Error::Degenerate("packet size has zero mean"));
        }
        let lambda = 1.0 / a.mean;
        let x_bar = x.mean;
        let gamma_sq = x.variance / (lambda * lambda) + a.variance * x_bar * x_bar;
        let c1 = lambda * gamma_sq / (2.0 * x_bar * x_bar);
        let renewal_term = (a.mean * a.mean + a.variance) / (2.0 * a.mean);
        let c2 = a.third_moment / (3.0 * a.mean) - renewal_term * renewal_term;
        let c3 = (x.variance + x_bar * x_bar) / (2.0 * x_bar);
        Ok(Self {
            lambda,
            x_bar,
            var_a: a.variance,
            var_x: x.variance,
            mu_a3: a.third_moment,
            gamma_sq,
            c1,
            c2,
            c3,
        })
    }

    /// Mean harvested power `lambda * x_bar`.
    pub fn harvest_rate(&self) -> f64 {
        self.lambda * self.x_bar
    }

    pub fn gamma(&self) -> f64 {
        self.gamma_sq.sqrt()
    }

    /// Asymptotic mean and variance of the time to cross `u`, constant
    /// terms included.
    pub fn recharge_moments(&self, u: f64) -> Result<(f64, f64)> {
        check_nonnegative("u", u)?;
        let mean = self.c1 + u / self.harvest_rate();
        let var = self.c2 + self.gamma_sq * u / self.x_bar.powi(3);
        Ok((mean, var))
    }

    /// `P(tau_c(u) <= t)` under the central-limit approximation. Collapses to
    /// a step at the mean when the variance is not positive.
    pub fn recharge_time_cdf(&self, u: f64, t: f64) -> Result<f64> {
        let (mean, var) = self.recharge_moments(u)?;
        self.warn_small_threshold(u);
        Ok(normal_or_step(t - mean, var))
    }

    /// `P(tau_d <= t_d)` for a harvest interval of length `t_c` followed by
    /// discharge at power `p`.
    pub fn discharge_time_cdf(&self, t_c: f64, p: f64, t_d: f64) -> Result<f64> {
        check_positive("t_c", t_c)?;
        check_positive("p", p)?;
        let num = p * t_d - self.harvest_rate() * t_c;
        let scale = self.gamma() * self.lambda.powf(1.5) * t_c.sqrt();
        Ok(normal_or_step(num, scale * scale))
    }

    /// Mean overshoot of the energy level past the threshold, `C3`.
    pub fn overshoot_mean(&self) -> f64 {
        self.c3
    }

    /// Heuristic: the normal approximation is only trusted for thresholds of
    /// at least five mean packets.
    pub(crate) fn warn_small_threshold(&self, u: f64) {
        if u < 5.0 * self.x_bar {
            warn!(
                "u = {u} is below 5 mean packets ({}); the normal recharge-time approximation may be inaccurate",
                5.0 * self.x_bar
            );
        }
    }
}

fn normal_or_step(offset: f64, var: f64) -> f64 {
    if var > 0.0 {
        std_normal_cdf(offset / var.sqrt())
    } else if offset >= 0.0 {
        1.0
    } else {
        0.0
    }
}
