//! Sizing the consume power from an SNR-outage target, and the symbol rate
//! that results.
//!
//! The received SNR is `Z = g p / N` for a flat-fading gain `g`. Rayleigh
//! fading corresponds to an exponentially distributed power gain, so it is
//! expressed as [`DistributionSpec::Exponential`].

use serde::{Deserialize, Serialize};

use crate::analytic::{limiting_duty_cycle, two_bit_metrics};
use crate::distributions::DistributionSpec;
use crate::error::{check_nonnegative, check_positive, check_probability, Error, Result};
use crate::renewal::RenewalConstants;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    /// SNR decoding threshold.
    pub zeta: f64,
    /// Noise power `N`.
    pub noise: f64,
    /// Channel power gain `g`.
    pub fading: DistributionSpec,
    /// SNR-outage target `P(Z <= zeta)`.
    pub theta2: f64,
    /// Symbol duration `T_s`.
    pub symbol_duration: f64,
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        check_nonnegative("zeta", self.zeta)?;
        check_positive("noise", self.noise)?;
        check_probability("theta2", self.theta2)?;
        check_positive("symbol_duration", self.symbol_duration)?;
        self.fading.validate()
    }
}

/// Power `zeta N / F_G^{-1}(theta2)` that meets the SNR-outage target.
pub fn transmit_power(cfg: &LinkConfig) -> Result<f64> {
    cfg.validate()?;
    power_from_quantile(cfg.zeta, cfg.noise, cfg.fading.quantile(cfg.theta2)?)
}

fn power_from_quantile(zeta: f64, noise: f64, quantile: f64) -> Result<f64> {
    if zeta == 0.0 {
        return Ok(0.0);
    }
    if !(quantile > 0.0) {
        return Err(Error::InfinitePower { quantile });
    }
    Ok(zeta * noise / quantile)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolRate {
    /// Symbol energy `p T_s`, used as the threshold.
    pub u: f64,
    /// Large-threshold duty cycle.
    pub rho: f64,
    /// `rho / T_s`.
    pub rate: f64,
    /// Exact two-bit cycle speed at `u`, for comparison with `rate`.
    pub omega_two_bit: f64,
}

/// Symbol rate when one symbol of duration `symbol_duration` is sent per
/// cycle.
pub fn symbol_rate(k: &RenewalConstants, p: f64, symbol_duration: f64) -> Result<SymbolRate> {
    check_positive("p", p)?;
    check_positive("symbol_duration", symbol_duration)?;
    let u = p * symbol_duration;
    let rho = limiting_duty_cycle(k, p);
    Ok(SymbolRate {
        u,
        rho,
        rate: rho / symbol_duration,
        omega_two_bit: two_bit_metrics(k, u, p)?.omega,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn link(zeta: f64, fading: DistributionSpec, theta2: f64) -> LinkConfig {
        LinkConfig {
            zeta,
            noise: 1.0,
            fading,
            theta2,
            symbol_duration: 1.0,
        }
    }

    fn uniform02() -> RenewalConstants {
        let u = DistributionSpec::uniform(0.0, 2.0).unwrap();
        RenewalConstants::derive(&u, &u).unwrap()
    }

    #[test]
    fn power_examples() {
        let exp = DistributionSpec::exponential(1.0).unwrap();
        let p = transmit_power(&link(1.0, exp, 0.1)).unwrap();
        assert!((p - 9.491_221_581_029_903).abs() < 1e-9);
        assert_eq!(transmit_power(&link(0.0, exp, 0.1)).unwrap(), 0.0);
        let uni = DistributionSpec::uniform(0.0, 2.0).unwrap();
        assert_eq!(transmit_power(&link(2.0, uni, 0.5)).unwrap(), 2.0);
    }

    #[test]
    fn zero_quantile_is_infinite_power() {
        // None of the gain families has an atom at zero, so exercise the
        // guard directly.
        assert!(matches!(
            power_from_quantile(1.0, 1.0, 0.0),
            Err(Error::InfinitePower { .. })
        ));
        assert_eq!(power_from_quantile(0.0, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn power_nonincreasing_in_theta2() {
        let fadings = [
            DistributionSpec::exponential(0.7).unwrap(),
            DistributionSpec::uniform(0.1, 3.0).unwrap(),
            DistributionSpec::gamma(2.0, 0.5).unwrap(),
        ];
        for f in fadings {
            let mut prev = f64::INFINITY;
            for i in 1..100 {
                let p = transmit_power(&link(3.0, f, i as f64 / 100.0)).unwrap();
                assert!(p <= prev);
                prev = p;
            }
        }
    }

    #[test]
    fn invalid_link_rejected() {
        let exp = DistributionSpec::exponential(1.0).unwrap();
        assert!(transmit_power(&link(-1.0, exp, 0.1)).is_err());
        assert!(transmit_power(&link(1.0, exp, 1.0)).is_err());
        let mut cfg = link(1.0, exp, 0.1);
        cfg.noise = 0.0;
        assert!(transmit_power(&cfg).is_err());
    }

    #[test]
    fn symbol_rate_examples() {
        let k = uniform02();
        let s = symbol_rate(&k, 2.0, 5.0).unwrap();
        assert_eq!(s.u, 10.0);
        assert!((s.rho - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.rate - 1.0 / 15.0).abs() < 1e-15);
        assert!((s.rate * 5.0 - s.rho).abs() < 1e-15);

        assert_eq!(symbol_rate(&k, 1.0, 3.0).unwrap().rho, 0.5);

        let s = symbol_rate(&k, 2.0, 500.0).unwrap();
        assert!((s.rate - s.omega_two_bit).abs() / s.omega_two_bit < 1e-3);
    }
}
