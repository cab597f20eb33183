//! Physical parameters and repeater architecture descriptions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, param, Result};
use crate::gates::{self, GateModel};
use crate::generation::CoefficientForm;

/// Largest number of swap levels the rate estimates are used for.
pub const MAX_SWAP_LEVELS: u32 = 5;
/// Largest number of pumping rounds the rate estimates are used for.
pub const MAX_PURIFICATION_ROUNDS: u32 = 2;

/// Hardware parameters shared by every elementary link of a repeater.
///
/// Units: rates in rad/s or Hz, lengths in km, times in s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalParams {
    /// Atom–cavity cooperativity `C = g²/κγ`.
    pub cooperativity: f64,
    /// Spontaneous emission rate of the atoms into non-cavity modes.
    pub gamma_rad_per_s: f64,
    /// Combined detector and cavity outcoupling efficiency.
    pub eta_d: f64,
    /// Fiber attenuation length.
    pub l_att_km: f64,
    /// Dark count rate of a single-photon detector.
    pub dark_count_rate_hz: f64,
    /// Duration of local qubit operations (initialization, rotations).
    pub tau_local_s: f64,
    /// Signal speed in the fiber.
    pub c_fiber_km_per_s: f64,
    /// Photon collection efficiency of a cavity-free (ion trap) emitter.
    pub free_space_collection: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            cooperativity: 100.0,
            gamma_rad_per_s: 2.0 * PI * 6.0e6,
            eta_d: 0.5,
            l_att_km: 22.0,
            dark_count_rate_hz: 25.0,
            tau_local_s: 10.0e-6,
            c_fiber_km_per_s: 2.0e5,
            free_space_collection: 0.10,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("cooperativity", self.cooperativity),
            ("gamma_rad_per_s", self.gamma_rad_per_s),
            ("l_att_km", self.l_att_km),
            ("c_fiber_km_per_s", self.c_fiber_km_per_s),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(param(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        check_probability("eta_d", self.eta_d)?;
        check_probability("free_space_collection", self.free_space_collection)?;
        if !(self.dark_count_rate_hz >= 0.0 && self.dark_count_rate_hz.is_finite()) {
            return Err(param(format!(
                "dark_count_rate_hz must be non-negative, got {}",
                self.dark_count_rate_hz
            )));
        }
        if !(self.tau_local_s >= 0.0 && self.tau_local_s.is_finite()) {
            return Err(param(format!(
                "tau_local_s must be non-negative, got {}",
                self.tau_local_s
            )));
        }
        Ok(())
    }

    /// Saturation scale of the photon emission probability, `10/(γ(1+4C))`.
    pub fn window_max_s(&self) -> f64 {
        10.0 / (self.gamma_rad_per_s * (1.0 + 4.0 * self.cooperativity))
    }
}

/// One elementary link: the shared hardware plus its length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkParams {
    pub physical: PhysicalParams,
    pub length_km: f64,
}

impl LinkParams {
    pub fn new(physical: PhysicalParams, length_km: f64) -> Result<Self> {
        physical.validate()?;
        if !(length_km >= 0.0 && length_km.is_finite()) {
            return Err(param(format!(
                "link length must be non-negative, got {length_km}"
            )));
        }
        Ok(Self {
            physical,
            length_km,
        })
    }

    /// One-way signalling time over the link, `L0/c`.
    pub fn signal_time_s(&self) -> f64 {
        self.length_km / self.physical.c_fiber_km_per_s
    }

    /// Duration of one generation attempt, `L0/c + τ_local`.
    pub fn attempt_time_s(&self) -> f64 {
        self.signal_time_s() + self.physical.tau_local_s
    }
}

/// Entanglement generation scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Weak excitation, heralded by a single click.
    OnePhoton,
    /// Full excitation, heralded by two clicks.
    TwoPhoton,
}

/// How emitted photons are collected into the fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emitter {
    /// Cavity-enhanced collection, `4C/(1+4C)`.
    Cavity,
    /// Lens collection with a fixed efficiency (trapped ions).
    FreeSpace,
}

/// Which two-qubit gate is used for purification and swapping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    /// Heralded CZ gate with an auxiliary atom.
    Gate1,
    /// Deterministic reflection-based CNOT.
    Gate2,
    /// Direct cavity gate without heralding.
    Gate3,
    /// Trapped-ion gate (99.3 %, 50 μs).
    Ion,
    /// Error-free, instantaneous gate.
    Perfect,
}

impl GateKind {
    pub fn model(self, physical: &PhysicalParams) -> Result<GateModel> {
        match self {
            GateKind::Gate1 => gates::gate1(physical.cooperativity, physical.gamma_rad_per_s),
            GateKind::Gate2 => gates::gate2(physical.cooperativity, physical.eta_d),
            GateKind::Gate3 => gates::gate3(physical.cooperativity),
            GateKind::Ion => Ok(gates::ion_trap_gate()),
            GateKind::Perfect => Ok(gates::perfect_gate()),
        }
    }

    /// Gates whose failures are heralded and must be retried.
    pub fn is_probabilistic(self) -> bool {
        matches!(self, GateKind::Gate1)
    }

    pub fn label(self) -> &'static str {
        match self {
            GateKind::Gate1 => "gate1",
            GateKind::Gate2 => "gate2",
            GateKind::Gate3 => "gate3",
            GateKind::Ion => "ion",
            GateKind::Perfect => "perfect",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PurificationVariant {
    /// Accept target outcomes `00` and `11`.
    Standard,
    /// Accept only `11`.
    Modified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    /// Both neighbouring links are attempted at once with half the qubits each.
    Parallel,
    /// Half of the links first with all qubits, then the other half.
    Sequential,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::OnePhoton => "1phot",
            Scheme::TwoPhoton => "2phot",
        }
    }
}

impl Architecture {
    pub fn label(self) -> &'static str {
        match self {
            Architecture::Parallel => "parallel",
            Architecture::Sequential => "sequential",
        }
    }
}

impl PurificationVariant {
    pub fn label(self) -> &'static str {
        match self {
            PurificationVariant::Standard => "standard",
            PurificationVariant::Modified => "modified",
        }
    }
}

/// A complete repeater: hardware, architecture, and generation knobs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepeaterConfig {
    pub total_distance_km: f64,
    pub swap_levels: u32,
    pub purification_rounds: u32,
    pub variant: PurificationVariant,
    pub architecture: Architecture,
    pub qubits_per_station: u32,
    pub scheme: Scheme,
    pub emitter: Emitter,
    pub gate: GateKind,
    pub physical: PhysicalParams,
    /// Excitation probability `ε²` (single-photon scheme only).
    pub excitation_prob: f64,
    /// Emission/detection window `T`.
    pub window_s: f64,
    pub coefficient_form: CoefficientForm,
}

impl RepeaterConfig {
    /// The high-fidelity repeater (two-photon generation, heralded gate) with
    /// default hardware and the emission window at its saturation scale.
    pub fn high_fidelity(total_distance_km: f64, swap_levels: u32) -> Self {
        let physical = PhysicalParams::default();
        Self {
            total_distance_km,
            swap_levels,
            purification_rounds: 0,
            variant: PurificationVariant::Standard,
            architecture: Architecture::Parallel,
            qubits_per_station: 2,
            scheme: Scheme::TwoPhoton,
            emitter: Emitter::Cavity,
            gate: GateKind::Gate1,
            physical,
            excitation_prob: 0.01,
            window_s: physical.window_max_s(),
            coefficient_form: CoefficientForm::Corrected,
        }
    }

    /// Saturation scale of the emission window: `10/(γ(1+4C))` with a cavity,
    /// `10/γ` for free-space emission.
    pub fn window_max_s(&self) -> f64 {
        match self.emitter {
            Emitter::Cavity => self.physical.window_max_s(),
            Emitter::FreeSpace => 10.0 / self.physical.gamma_rad_per_s,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.physical.validate()?;
        if !(self.total_distance_km > 0.0 && self.total_distance_km.is_finite()) {
            return Err(param(format!(
                "total distance must be positive, got {} km",
                self.total_distance_km
            )));
        }
        if self.swap_levels > MAX_SWAP_LEVELS {
            return Err(param(format!(
                "at most {MAX_SWAP_LEVELS} swap levels are supported, got {}",
                self.swap_levels
            )));
        }
        if self.purification_rounds > MAX_PURIFICATION_ROUNDS {
            return Err(param(format!(
                "at most {MAX_PURIFICATION_ROUNDS} purification rounds are supported, got {}",
                self.purification_rounds
            )));
        }
        if self.qubits_per_station != 2 && self.qubits_per_station != 4 {
            return Err(param(format!(
                "qubits per station must be 2 or 4, got {}",
                self.qubits_per_station
            )));
        }
        if self.purification_rounds > 0 && self.qubits_per_station < 4 {
            return Err(param("purification needs at least 4 qubits per station"));
        }
        if !(self.window_s > 0.0 && self.window_s.is_finite()) {
            return Err(param(format!(
                "window T must be positive, got {}",
                self.window_s
            )));
        }
        if self.scheme == Scheme::OnePhoton
            && !(self.excitation_prob > 0.0 && self.excitation_prob < 1.0)
        {
            return Err(param(format!(
                "excitation probability must lie in (0,1), got {}",
                self.excitation_prob
            )));
        }
        Ok(())
    }

    pub fn links(&self) -> u64 {
        1u64 << self.swap_levels
    }

    pub fn stations(&self) -> u64 {
        self.links() + 1
    }

    pub fn link_length_km(&self) -> f64 {
        self.total_distance_km / self.links() as f64
    }

    pub fn link(&self) -> Result<LinkParams> {
        LinkParams::new(self.physical, self.link_length_km())
    }

    /// Parallel generation attempts per link in the parallel architecture.
    pub fn pairs_per_link(&self) -> u32 {
        self.qubits_per_station / 2
    }

    pub fn gate_model(&self) -> Result<GateModel> {
        self.gate.model(&self.physical)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_hardware_table() {
        let p = PhysicalParams::default();
        assert_eq!(p.gamma_rad_per_s, 2.0 * PI * 6.0e6);
        assert_eq!(p.eta_d, 0.5);
        assert_eq!(p.l_att_km, 22.0);
        assert_eq!(p.tau_local_s, 1e-5);
        assert_eq!(p.dark_count_rate_hz, 25.0);
        assert_eq!(p.c_fiber_km_per_s, 2e5);
    }

    #[test]
    fn station_accounting() {
        let cfg = RepeaterConfig::high_fidelity(1000.0, 5);
        assert_eq!(cfg.stations(), 33);
        assert_eq!(cfg.link_length_km(), 31.25);
    }

    #[test]
    fn purification_needs_four_qubits() {
        let mut cfg = RepeaterConfig::high_fidelity(100.0, 1);
        cfg.purification_rounds = 1;
        assert!(cfg.validate().is_err());
        cfg.qubits_per_station = 4;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn rejects_bad_distance_and_levels() {
        let mut cfg = RepeaterConfig::high_fidelity(-5.0, 1);
        assert!(cfg.validate().is_err());
        cfg.total_distance_km = 100.0;
        cfg.swap_levels = 6;
        assert!(cfg.validate().is_err());
    }
}
