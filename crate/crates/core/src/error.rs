use thiserror::Error;

/// Which lower bound on the zero-bit cycle period was violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodBound {
    /// `T <= t_c,min`: the harvest phase alone cannot meet the outage target.
    SwitchTimeMin,
    /// `f(T) <= 0`, i.e. `(a + d)^2 <= b + c`.
    Quadratic,
}

impl std::fmt::Display for PeriodBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PeriodBound::SwitchTimeMin => write!(f, "T <= t_c,min"),
            PeriodBound::Quadratic => write!(f, "T <= T+ (f(T) <= 0)"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` = {value} is outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("degenerate distribution: {0}")]
    Degenerate(&'static str),

    #[error("infeasible switch time t_c = {t_c} (must be > 0)")]
    InfeasibleSwitchTime { t_c: f64 },

    #[error("infeasible cycle period T = {period}: {bound} with bound {limit}")]
    InfeasiblePeriod {
        period: f64,
        bound: PeriodBound,
        limit: f64,
    },

    #[error("discharge period T = {period} does not exceed t_c = {t_c}")]
    InfeasibleDischargePeriod { period: f64, t_c: f64 },

    #[error("no root of the duty-cycle equation lies in (0, 1) for T = {period}")]
    NoSolution { period: f64 },

    #[error("fading quantile at theta2 is {quantile}; transmit power would be infinite")]
    InfinitePower { quantile: f64 },
}

impl Error {
    /// True for errors that stem from infeasible protocol parameters
    /// rather than malformed input.
    pub fn is_feasibility(&self) -> bool {
        matches!(
            self,
            Error::InfeasibleSwitchTime { .. }
                | Error::InfeasiblePeriod { .. }
                | Error::InfeasibleDischargePeriod { .. }
                | Error::NoSolution { .. }
                | Error::InfinitePower { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn check_nonnegative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must be finite and >= 0",
        })
    }
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must lie in (0, 1)",
        })
    }
}
