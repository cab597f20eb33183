//! The structured run document: hardware defaults, the single-repeater
//! description, sweep grids and validation settings.

use std::path::Path;

use anyhow::{anyhow, bail, Context};
use repeater_core::optimize::{Family, SweepSpec};
use repeater_core::{
    Architecture, CoefficientForm, Emitter, GateKind, PhysicalParams, PurificationVariant,
    RepeaterConfig, Scheme,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub physical: PhysicalParams,
    pub repeater: RepeaterSection,
    pub sweep: SweepSection,
    pub validation: ValidationSection,
}

/// One repeater for the `rate` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RepeaterSection {
    pub total_distance_km: f64,
    pub swap_levels: u32,
    pub purification_rounds: u32,
    pub variant: PurificationVariant,
    pub architecture: Architecture,
    pub qubits_per_station: u32,
    pub scheme: Scheme,
    pub emitter: Emitter,
    pub gate: GateKind,
    pub excitation_prob: f64,
    /// Generation window; the saturation scale of the emitter when absent.
    pub window_s: Option<f64>,
    pub coefficient_form: CoefficientForm,
    /// Replace `window_s` and `excitation_prob` by their optimum.
    pub optimize: bool,
}

impl Default for RepeaterSection {
    fn default() -> Self {
        Self {
            total_distance_km: 1000.0,
            swap_levels: 4,
            purification_rounds: 0,
            variant: PurificationVariant::Standard,
            architecture: Architecture::Parallel,
            qubits_per_station: 2,
            scheme: Scheme::TwoPhoton,
            emitter: Emitter::Cavity,
            gate: GateKind::Gate1,
            excitation_prob: 0.01,
            window_s: None,
            coefficient_form: CoefficientForm::Corrected,
            optimize: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Grid of the distance axis, at the cooperativity of `physical`.
    pub distances_km: Vec<f64>,
    /// Grid of the cooperativity axis, at `fixed_distance_km`.
    pub cooperativities: Vec<f64>,
    pub fixed_distance_km: f64,
    pub qubits_per_station: u32,
    /// Family labels such as `2phot-gate1`, `ion-trap`, `perfect-gate`.
    pub families: Vec<String>,
    pub swap_levels: Vec<u32>,
    pub purification_rounds: Vec<u32>,
    pub variants: Vec<PurificationVariant>,
    pub architectures: Vec<Architecture>,
}

impl Default for SweepSection {
    fn default() -> Self {
        let spec = SweepSpec::default();
        Self {
            distances_km: (1..=10).map(|k| 100.0 * f64::from(k)).collect(),
            cooperativities: vec![
                10.0, 20.0, 30.0, 40.0, 50.0, 70.0, 100.0, 200.0, 300.0, 500.0, 1000.0,
            ],
            fixed_distance_km: 1000.0,
            qubits_per_station: spec.qubits_per_station,
            families: spec.families.iter().map(Family::label).collect(),
            swap_levels: spec.swap_levels,
            purification_rounds: spec.purification_rounds,
            variants: spec.variants,
            architectures: spec.architectures,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidationSection {
    pub trials: u64,
    pub total_distance_km: f64,
    pub qubits_per_station: u32,
}

impl Default for ValidationSection {
    fn default() -> Self {
        Self {
            trials: 2000,
            total_distance_km: 1000.0,
            qubits_per_station: 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Distance,
    Cooperativity,
}

impl RunConfig {
    /// Reads the document (defaults when `path` is `None`) and applies
    /// `key.path=value` overrides before deserializing.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> anyhow::Result<Self> {
        let mut doc = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("cannot read config {}", p.display()))?;
                // typed parse of the raw text first, so errors carry line and column
                serde_json::from_str::<RunConfig>(&text)
                    .map_err(|e| anyhow!("{}: {e}", p.display()))?;
                serde_json::from_str::<Value>(&text).map_err(|e| anyhow!("{}: {e}", p.display()))?
            }
            None => Value::Object(Default::default()),
        };
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let origin = path.map_or("<defaults>".into(), |p| p.display().to_string());
        serde_json::from_value(doc).map_err(|e| anyhow!("{origin}: {e}"))
    }

    pub fn repeater(&self) -> RepeaterConfig {
        let r = &self.repeater;
        let mut config = RepeaterConfig {
            total_distance_km: r.total_distance_km,
            swap_levels: r.swap_levels,
            purification_rounds: r.purification_rounds,
            variant: r.variant,
            architecture: r.architecture,
            qubits_per_station: r.qubits_per_station,
            scheme: r.scheme,
            emitter: r.emitter,
            gate: r.gate,
            physical: self.physical,
            excitation_prob: r.excitation_prob,
            window_s: 0.0,
            coefficient_form: r.coefficient_form,
        };
        config.window_s = r.window_s.unwrap_or_else(|| config.window_max_s());
        config
    }

    pub fn sweep_spec(&self, axis: Axis) -> anyhow::Result<SweepSpec> {
        let s = &self.sweep;
        let (distances_km, cooperativities) = match axis {
            Axis::Distance => (s.distances_km.clone(), vec![self.physical.cooperativity]),
            Axis::Cooperativity => (vec![s.fixed_distance_km], s.cooperativities.clone()),
        };
        let families = s
            .families
            .iter()
            .map(|label| {
                Family::all()
                    .into_iter()
                    .find(|f| f.label() == *label)
                    .ok_or_else(|| anyhow!("unknown family {label:?}"))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        Ok(SweepSpec {
            distances_km,
            cooperativities,
            qubits_per_station: s.qubits_per_station,
            families,
            swap_levels: s.swap_levels.clone(),
            purification_rounds: s.purification_rounds.clone(),
            variants: s.variants.clone(),
            architectures: s.architectures.clone(),
            physical: self.physical,
            coefficient_form: self.repeater.coefficient_form,
            ..SweepSpec::default()
        })
    }

    /// Base configuration handed to the validation grid.
    pub fn validation_base(&self) -> RepeaterConfig {
        RepeaterConfig {
            total_distance_km: self.validation.total_distance_km,
            qubits_per_station: self.validation.qubits_per_station,
            ..self.repeater()
        }
    }
}

fn apply_override(doc: &mut Value, spec: &str) -> anyhow::Result<()> {
    let Some((key, raw)) = spec.split_once('=') else {
        bail!("override {spec:?} is not of the form key=value");
    };
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let Value::Object(map) = node else {
            bail!(
                "override {key:?}: {} is not a section",
                parts[..i].join(".")
            );
        };
        if i + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    bail!("override {spec:?} has an empty key")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), c);
        assert_eq!(c.physical, PhysicalParams::default());
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let c = RunConfig::load(
            None,
            &[
                "repeater.swap_levels=3".into(),
                "repeater.gate=gate2".into(),
                "seed=9".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.repeater.swap_levels, 3);
        assert_eq!(c.repeater.gate, GateKind::Gate2);
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::load(None, &["physical.gamma=1".into()]).unwrap_err();
        assert!(err.to_string().contains("gamma"), "{err}");
        assert!(RunConfig::load(None, &["no_equals".into()]).is_err());
    }

    #[test]
    fn window_defaults_to_emitter_scale() {
        let mut c = RunConfig::default();
        let cavity = c.repeater();
        assert_eq!(cavity.window_s, c.physical.window_max_s());
        c.repeater.emitter = Emitter::FreeSpace;
        let free = c.repeater();
        assert!(free.window_s > cavity.window_s);
    }

    #[test]
    fn sweep_axes_fix_the_other_coordinate() {
        let c = RunConfig::default();
        let d = c.sweep_spec(Axis::Distance).unwrap();
        assert_eq!(d.cooperativities, vec![c.physical.cooperativity]);
        assert_eq!(d.distances_km.len(), 10);
        let k = c.sweep_spec(Axis::Cooperativity).unwrap();
        assert_eq!(k.distances_km, vec![1000.0]);
        assert_eq!(k.families.len(), Family::all().len());
    }
}
