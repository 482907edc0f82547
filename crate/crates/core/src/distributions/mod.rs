//! Parametric families for the energy inter-arrival time `A` and the
//! packet size `X`.
//!
//! Every family has closed-form first three raw moments; the third moment of
//! `A` enters the recharge-time variance constant, so heavy-tailed families
//! are deliberately absent.

mod normal;

pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_quantile};

use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{check_positive, check_probability, Error, Result};
use crate::rng::RandomStream;

/// A nonnegative random variable. Serialized with a `family` tag, e.g.
/// `{ family = "uniform", low = 0.0, high = 2.0 }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistributionSpec {
    Deterministic { value: f64 },
    Uniform { low: f64, high: f64 },
    Exponential { rate: f64 },
    Gamma { shape: f64, scale: f64 },
}

/// Mean, variance and raw third moment `E[Y^3]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub third_moment: f64,
}

impl Moments {
    /// `E[Y^2]`.
    pub fn second_moment(&self) -> f64 {
        self.variance + self.mean * self.mean
    }

    /// Mean of the stationary residual (equilibrium) distribution,
    /// `E[Y^2] / (2 E[Y])`.
    pub fn residual_mean(&self) -> f64 {
        self.second_moment() / (2.0 * self.mean)
    }
}

impl DistributionSpec {
    pub fn deterministic(value: f64) -> Result<Self> {
        let d = DistributionSpec::Deterministic { value };
        d.validate().map(|_| d)
    }

    pub fn uniform(low: f64, high: f64) -> Result<Self> {
        let d = DistributionSpec::Uniform { low, high };
        d.validate().map(|_| d)
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        let d = DistributionSpec::Exponential { rate };
        d.validate().map(|_| d)
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        let d = DistributionSpec::Gamma { shape, scale };
        d.validate().map(|_| d)
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            DistributionSpec::Deterministic { .. } => "deterministic",
            DistributionSpec::Uniform { .. } => "uniform",
            DistributionSpec::Exponential { .. } => "exponential",
            DistributionSpec::Gamma { .. } => "gamma",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionSpec::Deterministic { value } => check_positive("value", value),
            DistributionSpec::Uniform { low, high } => {
                if !(low.is_finite() && high.is_finite()) || low < 0.0 {
                    return Err(Error::Domain {
                        name: "low",
                        value: low,
                        reason: "uniform bounds must be finite with low >= 0",
                    });
                }
                if high <= low {
                    return Err(Error::Domain {
                        name: "high",
                        value: high,
                        reason: "uniform requires high > low",
                    });
                }
                Ok(())
            }
            DistributionSpec::Exponential { rate } => check_positive("rate", rate),
            DistributionSpec::Gamma { shape, scale } => {
                check_positive("shape", shape)?;
                check_positive("scale", scale)
            }
        }
    }

    pub fn moments(&self) -> Result<Moments> {
        self.validate()?;
        let m = match *self {
            DistributionSpec::Deterministic { value } => Moments {
                mean: value,
                variance: 0.0,
                third_moment: value.powi(3),
            },
            DistributionSpec::Uniform { low, high } => {
                let w = high - low;
                Moments {
                    mean: 0.5 * (low + high),
                    variance: w * w / 12.0,
                    // (h^4 - l^4) / (4 (h - l)) without the cancellation
                    third_moment: (high + low) * (high * high + low * low) / 4.0,
                }
            }
            DistributionSpec::Exponential { rate } => Moments {
                mean: 1.0 / rate,
                variance: 1.0 / (rate * rate),
                third_moment: 6.0 / rate.powi(3),
            },
            DistributionSpec::Gamma { shape, scale } => Moments {
                mean: shape * scale,
                variance: shape * scale * scale,
                third_moment: shape * (shape + 1.0) * (shape + 2.0) * scale.powi(3),
            },
        };
        Ok(m)
    }

    /// Right-continuous CDF. Parameters are assumed valid.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::Deterministic { value } => {
                if x >= value {
                    1.0
                } else {
                    0.0
                }
            }
            DistributionSpec::Uniform { low, high } => ((x - low) / (high - low)).clamp(0.0, 1.0),
            DistributionSpec::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            DistributionSpec::Gamma { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else if x.is_infinite() {
                    1.0
                } else {
                    gamma_lr(shape, x / scale)
                }
            }
        }
    }

    /// Density where one exists; `None` for the point mass.
    pub fn pdf(&self, x: f64) -> Option<f64> {
        match *self {
            DistributionSpec::Deterministic { .. } => None,
            DistributionSpec::Uniform { low, high } => {
                Some(if x >= low && x <= high { 1.0 / (high - low) } else { 0.0 })
            }
            DistributionSpec::Exponential { rate } => {
                Some(if x < 0.0 { 0.0 } else { rate * (-rate * x).exp() })
            }
            DistributionSpec::Gamma { shape, scale } => Some(gamma_pdf(shape, scale, x)),
        }
    }

    /// Left-continuous generalized inverse `inf { x : F(x) >= q }`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        self.validate()?;
        check_probability("q", q)?;
        Ok(match *self {
            DistributionSpec::Deterministic { value } => value,
            DistributionSpec::Uniform { low, high } => low + q * (high - low),
            DistributionSpec::Exponential { rate } => -(-q).ln_1p() / rate,
            DistributionSpec::Gamma { shape, scale } => gamma_quantile(shape, scale, q),
        })
    }

    /// CDF of the stationary residual law with density `(1 - F(v)) / mean`.
    pub fn residual_cdf(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        match *self {
            DistributionSpec::Deterministic { value } => (v / value).min(1.0),
            DistributionSpec::Uniform { low, high } => {
                let mean = 0.5 * (low + high);
                if v <= low {
                    v / mean
                } else if v >= high {
                    1.0
                } else {
                    let s = v - low;
                    (low + s - s * s / (2.0 * (high - low))) / mean
                }
            }
            DistributionSpec::Exponential { .. } => self.cdf(v),
            DistributionSpec::Gamma { shape, scale } => {
                // G(v) = v (1 - F_k(v)) / mean + F_{k+1}(v)
                let mean = shape * scale;
                let upper = 1.0 - gamma_lr(shape, v / scale);
                (v * upper / mean + gamma_lr(shape + 1.0, v / scale)).min(1.0)
            }
        }
    }

    /// Prepared sampler for the hot loop.
    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        Ok(match *self {
            DistributionSpec::Deterministic { value } => Sampler::Deterministic(value),
            DistributionSpec::Uniform { low, high } => Sampler::Uniform { low, high },
            DistributionSpec::Exponential { rate } => Sampler::Exponential(rate),
            DistributionSpec::Gamma { shape, scale } => Sampler::Gamma {
                draw: Gamma::new(shape, scale).map_err(|_| Error::Degenerate("gamma"))?,
                size_biased: Gamma::new(shape + 1.0, scale)
                    .map_err(|_| Error::Degenerate("gamma"))?,
            },
        })
    }

    /// One variate.
    pub fn sample(&self, rng: &mut RandomStream) -> Result<f64> {
        Ok(self.sampler()?.sample(rng))
    }

    /// One variate from the stationary residual law.
    pub fn sample_residual(&self, rng: &mut RandomStream) -> Result<f64> {
        Ok(self.sampler()?.sample_residual(rng))
    }
}

/// A validated [`DistributionSpec`] with any per-family setup precomputed.
#[derive(Debug, Clone, Copy)]
pub enum Sampler {
    Deterministic(f64),
    Uniform { low: f64, high: f64 },
    Exponential(f64),
    Gamma {
        draw: Gamma<f64>,
        size_biased: Gamma<f64>,
    },
}

impl Sampler {
    #[inline]
    pub fn sample(&self, rng: &mut RandomStream) -> f64 {
        match *self {
            Sampler::Deterministic(v) => v,
            Sampler::Uniform { low, high } => low + (high - low) * rng.next_f64(),
            Sampler::Exponential(rate) => -rng.next_open01().ln() / rate,
            Sampler::Gamma { draw, .. } => draw.sample(rng),
        }
    }

    /// Inverse transform where the residual CDF inverts in closed form. For
    /// the gamma family the residual is `U * Y'` with `Y'` the size-biased
    /// law `Gamma(shape + 1, scale)` and `U ~ Uniform(0, 1)`.
    #[inline]
    pub fn sample_residual(&self, rng: &mut RandomStream) -> f64 {
        match *self {
            Sampler::Deterministic(v) => v * rng.next_f64(),
            Sampler::Uniform { low, high } => {
                let mean = 0.5 * (low + high);
                let target = rng.next_f64() * mean;
                if target <= low {
                    target
                } else {
                    let w = high - low;
                    let disc = (w * w - 2.0 * w * (target - low)).max(0.0);
                    low + w - disc.sqrt()
                }
            }
            Sampler::Exponential(rate) => -rng.next_open01().ln() / rate,
            Sampler::Gamma { size_biased, .. } => rng.next_f64() * size_biased.sample(rng),
        }
    }
}

fn gamma_pdf(shape: f64, scale: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return match shape {
            s if s < 1.0 => f64::INFINITY,
            1.0 => 1.0 / scale,
            _ => 0.0,
        };
    }
    let z = x / scale;
    ((shape - 1.0) * z.ln() - z - ln_gamma(shape)).exp() / scale
}

/// Safeguarded Newton iteration on the regularized incomplete gamma.
fn gamma_quantile(shape: f64, scale: f64, q: f64) -> f64 {
    let cdf = |x: f64| gamma_lr(shape, x / scale);
    let mut lo = 0.0;
    let mut hi = scale * (shape + 10.0 * shape.sqrt() + 10.0);
    while cdf(hi) < q {
        lo = hi;
        hi *= 2.0;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = cdf(x) - q;
        if f == 0.0 {
            return x;
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let dens = gamma_pdf(shape, scale, x);
        let newton = x - f / dens;
        let next = if dens.is_finite() && dens > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-15 * x.abs().max(f64::MIN_POSITIVE) {
            return next;
        }
        x = next;
    }
    x
}
