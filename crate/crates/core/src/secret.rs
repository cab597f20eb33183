//! Six-state QKD secret-key fraction and the resulting key rates.

use serde::Serialize;

use crate::config::RepeaterConfig;
use crate::error::{param, Result};
use crate::rate::{propagate_fidelity, timing, LinkModel, TimingBreakdown};

/// Sifting probability of the asymmetric protocol.
pub const P_SIFT: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateReport {
    /// `Φ⁺` weight of the distributed pair (equal to its Werner fidelity).
    pub final_fidelity: f64,
    pub distribution_rate_hz: f64,
    pub secret_fraction: f64,
    pub secret_key_rate_hz: f64,
    /// Secret key rate divided by the number of stations.
    pub normalized_rate_hz: f64,
    pub stations: u64,
    pub timing: TimingBreakdown,
}

/// `h(p) = −p log₂p − (1−p) log₂(1−p)`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(param(format!("binary entropy argument {p} outside [0,1]")));
    }
    Ok(entropy(p))
}

fn entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

/// Asymptotic six-state secret fraction of a Werner pair of fidelity `F`,
/// `1 − h(ε) − ε − (1−ε)·h((1−3ε/2)/(1−ε))` with `ε = 2(1−F)/3`, clamped at
/// zero below threshold (`1 − F ≈ 0.19`).
pub fn secret_fraction(fidelity: f64) -> f64 {
    let f = fidelity.clamp(0.0, 1.0);
    let eps = 2.0 * (1.0 - f) / 3.0;
    let inner = if eps < 1.0 {
        ((1.0 - 1.5 * eps) / (1.0 - eps)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let r = 1.0 - entropy(eps) - eps - (1.0 - eps) * entropy(inner);
    r.max(0.0)
}

/// Fills in key rates from a fidelity and distribution rate.
pub fn build_report(
    config: &RepeaterConfig,
    fidelity: f64,
    distribution_rate_hz: f64,
    timing: TimingBreakdown,
) -> RateReport {
    let secret_fraction = secret_fraction(fidelity);
    let secret_key_rate_hz = distribution_rate_hz * P_SIFT * secret_fraction;
    let stations = config.stations();
    RateReport {
        final_fidelity: fidelity,
        distribution_rate_hz,
        secret_fraction,
        secret_key_rate_hz,
        normalized_rate_hz: secret_key_rate_hz / stations as f64,
        stations,
        timing,
    }
}

/// Full evaluation of one repeater configuration.
pub fn evaluate(config: &RepeaterConfig) -> Result<RateReport> {
    let model = LinkModel::build(config)?;
    let state = propagate_fidelity(config.swap_levels, &model)?;
    let t = timing(config, &model)?;
    let rate = 1.0 / t.distribution_time_s;
    Ok(build_report(config, state.to_werner().fidelity(), rate, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn dummy_timing() -> TimingBreakdown {
        TimingBreakdown {
            tau_link_s: 0.1,
            tau_swap_total_s: 0.0,
            distribution_time_s: 0.1,
            swap_level_s: vec![],
        }
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        let p: f64 = 0.11;
        let direct = -p * p.ln() / 2f64.ln() - (1.0 - p) * (1.0 - p).ln() / 2f64.ln();
        assert_relative_eq!(binary_entropy(0.11).unwrap(), direct, max_relative = 1e-14);
        assert_abs_diff_eq!(binary_entropy(0.11).unwrap(), 0.4999, epsilon = 1e-4);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn fraction_values() {
        assert_eq!(secret_fraction(1.0), 1.0);
        assert_eq!(secret_fraction(0.25), 0.0);
        assert_eq!(secret_fraction(0.7), 0.0);
    }

    /// Independent closed form of the six-state rate with error rate `Q`:
    /// `1 + (1 − 3Q/2)·log₂(1 − 3Q/2) + (3Q/2)·log₂(Q/2)`.
    fn six_state_oracle(f: f64) -> f64 {
        let q = 2.0 * (1.0 - f) / 3.0;
        let a = 1.0 - 1.5 * q;
        let r = 1.0 + a * a.ln() / 2f64.ln() + 1.5 * q * (q / 2.0).ln() / 2f64.ln();
        r.max(0.0)
    }

    #[test]
    fn fraction_matches_error_rate_form() {
        for f in [0.81, 0.85, 0.9, 0.95, 0.99, 0.999] {
            assert_abs_diff_eq!(secret_fraction(f), six_state_oracle(f), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(secret_fraction(0.95), 0.6344, epsilon = 1e-4);
    }

    #[test]
    fn reports() {
        let cfg = RepeaterConfig::high_fidelity(500.0, 2);
        let r = build_report(&cfg, 1.0, 10.0, dummy_timing());
        assert_eq!(
            (r.secret_key_rate_hz, r.normalized_rate_hz, r.stations),
            (10.0, 2.0, 5)
        );
        let r = build_report(&cfg, 0.7, 1e6, dummy_timing());
        assert_eq!(r.secret_key_rate_hz, 0.0);
        let cfg = RepeaterConfig::high_fidelity(500.0, 4);
        let r = build_report(&cfg, 0.95, 100.0, dummy_timing());
        assert_relative_eq!(
            r.secret_key_rate_hz,
            100.0 * six_state_oracle(0.95),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            r.normalized_rate_hz,
            r.secret_key_rate_hz / 17.0,
            max_relative = 1e-15
        );
    }

    proptest! {
        #[test]
        fn fraction_is_monotone(f in 0.0f64..=1.0, df in 0.0f64..0.2) {
            let g = (f + df).min(1.0);
            prop_assert!(secret_fraction(g) >= secret_fraction(f));
            prop_assert!((0.0..=1.0).contains(&secret_fraction(f)));
        }

        #[test]
        fn entropy_is_symmetric(p in 0.0f64..=1.0) {
            prop_assert!((binary_entropy(p).unwrap() - binary_entropy(1.0 - p).unwrap()).abs() < 1e-12);
        }
    }
}
