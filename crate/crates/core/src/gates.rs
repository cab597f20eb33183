//! Effective two-qubit gate models.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Local operation budget added to every cavity gate.
const LOCAL_GATE_TIME_S: f64 = 10e-6;

/// A CNOT/CZ gate reduced to its heralded error, success probability and
/// duration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateModel {
    /// `1 −` fidelity of the gate conditioned on success.
    pub error: f64,
    pub success_prob: f64,
    pub gate_time_s: f64,
}

impl GateModel {
    pub fn fidelity(&self) -> f64 {
        1.0 - self.error
    }

    /// Fidelity fed to the depolarizing channel. A depolarizing channel
    /// cannot go below `1/4` (complete depolarization), so clamped gate
    /// errors above `3/4` act as a fully depolarizing gate.
    pub fn channel_fidelity(&self) -> f64 {
        self.fidelity().max(0.25)
    }
}

fn check_cooperativity(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(param(format!("cooperativity must be positive, got {c}")));
    }
    Ok(())
}

/// Heralded CZ gate with an auxiliary atom.
pub fn gate1(cooperativity: f64, gamma_rad_per_s: f64) -> Result<GateModel> {
    check_cooperativity(cooperativity)?;
    if gamma_rad_per_s.is_nan() || gamma_rad_per_s <= 0.0 {
        return Err(param(format!(
            "gamma must be positive, got {gamma_rad_per_s}"
        )));
    }
    let sqrt_c = cooperativity.sqrt();
    Ok(GateModel {
        error: 4e-5,
        success_prob: (1.0 - 6.0 / sqrt_c).max(0.0),
        gate_time_s: 377.0 / (gamma_rad_per_s * sqrt_c) + LOCAL_GATE_TIME_S,
    })
}

/// Deterministic reflection-based CNOT.
pub fn gate2(cooperativity: f64, eta_d: f64) -> Result<GateModel> {
    check_cooperativity(cooperativity)?;
    if !(eta_d > 0.0 && eta_d <= 1.0) {
        return Err(param(format!("eta_d must lie in (0,1], got {eta_d}")));
    }
    Ok(GateModel {
        error: (1.2 / (eta_d * cooperativity)).min(1.0),
        success_prob: 1.0,
        gate_time_s: LOCAL_GATE_TIME_S,
    })
}

/// Direct, unheralded cavity gate.
pub fn gate3(cooperativity: f64) -> Result<GateModel> {
    check_cooperativity(cooperativity)?;
    Ok(GateModel {
        error: (3.6 / cooperativity.sqrt()).min(1.0),
        success_prob: 1.0,
        gate_time_s: LOCAL_GATE_TIME_S,
    })
}

pub fn ion_trap_gate() -> GateModel {
    GateModel {
        error: 0.007,
        success_prob: 1.0,
        gate_time_s: 50e-6,
    }
}

pub fn perfect_gate() -> GateModel {
    GateModel {
        error: 0.0,
        success_prob: 1.0,
        gate_time_s: 0.0,
    }
}
