//! Human-readable reports. Numbers carry 6 significant digits.

use std::fmt::Write;

use ltharvest::link::SymbolRate;
use ltharvest::{Metrics, SimResult};

/// `%g`-style formatting with 6 significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, e) = sci.split_once('e').unwrap();
    let exp: i32 = e.parse().unwrap();
    if !(-5..6).contains(&exp) {
        return format!("{}e{e}", trim_zeros(mantissa));
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn line(out: &mut String, key: &str, value: impl AsRef<str>) {
    let _ = writeln!(out, "{key:<20} {}", value.as_ref());
}

pub fn metrics(mode: &str, m: &Metrics) -> String {
    let mut out = String::new();
    line(&mut out, "mode", mode);
    line(&mut out, "rho", sig6(m.rho));
    line(&mut out, "omega", sig6(m.omega));
    if let Some(t_c) = m.t_c {
        line(&mut out, "t_c", sig6(t_c));
    }
    for (k, v) in &m.aux {
        line(&mut out, k, sig6(*v));
    }
    out
}

pub fn simulation(r: &SimResult) -> String {
    let mut out = String::new();
    line(&mut out, "mode", r.mode.to_string());
    line(&mut out, "cycles", r.cycles.to_string());
    line(&mut out, "seed", r.seed.to_string());
    line(&mut out, "rho_hat", format!("{} +/- {}", sig6(r.rho_hat), sig6(r.ci_rho)));
    line(&mut out, "omega_hat", format!("{} +/- {}", sig6(r.omega_hat), sig6(r.ci_omega)));
    line(&mut out, "mean_tau_c", sig6(r.mean_tau_c));
    line(&mut out, "mean_tau_d", sig6(r.mean_tau_d));
    let optional = [
        ("outage_freq", r.outage_freq),
        ("overshoot_mean", r.overshoot_mean),
        ("discharge_freq", r.discharge_freq),
    ];
    for (k, v) in optional {
        if let Some(v) = v {
            line(&mut out, k, sig6(v));
        }
    }
    out
}

pub fn power(p: f64, rate: &SymbolRate) -> String {
    let mut out = String::new();
    line(&mut out, "p", sig6(p));
    line(&mut out, "symbol_energy", sig6(rate.u));
    line(&mut out, "rho", sig6(rate.rho));
    line(&mut out, "symbol_rate", sig6(rate.rate));
    line(&mut out, "omega_two_bit", sig6(rate.omega_two_bit));
    out
}
