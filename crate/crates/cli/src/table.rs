//! CSV and key-value formatting. Floats carry 10 significant digits.

use std::fmt::Write;

use repeater_core::chain::ValidationRow;
use repeater_core::optimize::{CellRecord, OptimumRecord, RankingRow};
use repeater_core::{RateReport, RepeaterConfig};

use crate::run_config::Axis;

pub fn num(x: f64) -> String {
    format!("{x:.9e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

const RESULT_COLUMNS: &str = "scheme,gate,architecture,n,j,variant,window_s,eps_sq,fidelity,\
dist_rate_hz,secret_fraction,secret_rate_hz,normalized_rate_hz_per_station";

/// The optimized repeater and its key rates, shared by sweep and compare rows.
struct Outcome<'a> {
    config: &'a RepeaterConfig,
    window_s: f64,
    eps_sq: Option<f64>,
    report: Option<&'a RateReport>,
    normalized_rate_hz: f64,
}

impl Outcome<'_> {
    fn fields(&self) -> String {
        let c = self.config;
        let r = self.report;
        [
            c.scheme.label().to_string(),
            c.gate.label().to_string(),
            c.architecture.label().to_string(),
            c.swap_levels.to_string(),
            c.purification_rounds.to_string(),
            c.variant.label().to_string(),
            num(self.window_s),
            opt(self.eps_sq),
            opt(r.map(|r| r.final_fidelity)),
            num(r.map_or(0.0, |r| r.distribution_rate_hz)),
            num(r.map_or(0.0, |r| r.secret_fraction)),
            num(r.map_or(0.0, |r| r.secret_key_rate_hz)),
            num(self.normalized_rate_hz),
        ]
        .join(",")
    }
}

fn from_winner(w: &OptimumRecord) -> Outcome<'_> {
    Outcome {
        config: &w.config,
        window_s: w.inner.window_s,
        eps_sq: w.inner.eps_sq,
        report: w.report.as_ref(),
        normalized_rate_hz: w.normalized_rate_hz(),
    }
}

fn from_cell(c: &CellRecord) -> Outcome<'_> {
    Outcome {
        config: &c.config,
        window_s: c.inner.window_s,
        eps_sq: c.inner.eps_sq,
        report: c.report.as_ref(),
        normalized_rate_hz: c.normalized_rate_hz(),
    }
}

/// One `winner` row per (axis point, family), then optionally every `cell`.
pub fn sweep_csv(axis: Axis, winners: &[OptimumRecord], cells: &[CellRecord]) -> String {
    let (name, pick): (&str, fn(f64, f64) -> f64) = match axis {
        Axis::Distance => ("distance_km", |d, _| d),
        Axis::Cooperativity => ("cooperativity", |_, c| c),
    };
    let mut out = format!("row,{name},{RESULT_COLUMNS}\n");
    for w in winners {
        let value = pick(w.distance_km, w.cooperativity);
        writeln!(out, "winner,{},{}", num(value), from_winner(w).fields()).unwrap();
    }
    for c in cells {
        let value = pick(c.distance_km, c.cooperativity);
        writeln!(out, "cell,{},{}", num(value), from_cell(c).fields()).unwrap();
    }
    out
}

pub fn ranking_csv(rows: &[RankingRow]) -> String {
    let mut out = format!("distance_km,cooperativity,rank,family,{RESULT_COLUMNS}\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            num(r.distance_km),
            num(r.cooperativity),
            r.rank,
            r.record.family,
            from_winner(&r.record).fields()
        )
        .unwrap();
    }
    out
}

pub fn validation_csv(rows: &[ValidationRow]) -> String {
    let mut out = String::from(
        "gate,architecture,n,j,variant,analytic_s,mc_mean_s,mc_stderr_s,ratio,within_band\n",
    );
    for r in rows {
        let c = &r.config;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            c.gate.label(),
            c.architecture.label(),
            c.swap_levels,
            c.purification_rounds,
            c.variant.label(),
            num(r.analytic_s),
            num(r.mc_mean_s),
            num(r.mc_stderr_s),
            num(r.ratio),
            r.within_band
        )
        .unwrap();
    }
    out
}

/// Flat `key = value` block for a single evaluation.
pub fn report_block(config: &RepeaterConfig, report: &RateReport) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
    line("total_distance_km", num(config.total_distance_km));
    line("cooperativity", num(config.physical.cooperativity));
    line("scheme", config.scheme.label().into());
    line("gate", config.gate.label().into());
    line("architecture", config.architecture.label().into());
    line("swap_levels", config.swap_levels.to_string());
    line(
        "purification_rounds",
        config.purification_rounds.to_string(),
    );
    line("variant", config.variant.label().into());
    line("qubits_per_station", config.qubits_per_station.to_string());
    line("window_s", num(config.window_s));
    line("excitation_prob", num(config.excitation_prob));
    line("stations", report.stations.to_string());
    line("final_fidelity", num(report.final_fidelity));
    line("distribution_rate_hz", num(report.distribution_rate_hz));
    line("secret_fraction", num(report.secret_fraction));
    line("secret_key_rate_hz", num(report.secret_key_rate_hz));
    line(
        "normalized_rate_hz_per_station",
        num(report.normalized_rate_hz),
    );
    line("tau_link_s", num(report.timing.tau_link_s));
    line("tau_swap_total_s", num(report.timing.tau_swap_total_s));
    line(
        "distribution_time_s",
        num(report.timing.distribution_time_s),
    );
    for (k, t) in report.timing.swap_level_s.iter().enumerate() {
        line(&format!("tau_swap_level_{}_s", k + 1), num(*t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(num(1.0), "1.000000000e0");
        assert_eq!(num(0.012345678912), "1.234567891e-2");
        assert_eq!(opt(None), "");
    }

    #[test]
    fn headers_always_present() {
        assert!(sweep_csv(Axis::Distance, &[], &[]).starts_with("row,distance_km,scheme,"));
        assert!(ranking_csv(&[]).ends_with("normalized_rate_hz_per_station\n"));
        assert_eq!(validation_csv(&[]).lines().count(), 1);
    }
}
