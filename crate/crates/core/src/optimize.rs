//! Grid search over repeater architectures with an inner simplex search over
//! the generation window `T` and, for the single-photon scheme, the
//! excitation probability `ε²`.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    Architecture, Emitter, GateKind, PhysicalParams, PurificationVariant, RepeaterConfig, Scheme,
    MAX_PURIFICATION_ROUNDS, MAX_SWAP_LEVELS,
};
use crate::error::{param, Result};
use crate::generation::CoefficientForm;
use crate::secret::{evaluate, RateReport};
use crate::simplex::{maximize, SimplexOptions};

/// Smallest window searched, as a fraction of the saturation scale.
const WINDOW_FLOOR: f64 = 1e-3;
const EPS_SQ_MIN: f64 = 1e-6;
const EPS_SQ_MAX: f64 = 0.5;

/// A generation scheme paired with a gate, as compared in the rankings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Family {
    Cavity {
        scheme: Scheme,
        gate: GateKind,
    },
    /// Free-space collection with the trapped-ion gate; the better of the two
    /// generation schemes is reported.
    IonTrap,
    /// Two-photon generation with cavity collection, no dark counts, and an
    /// error-free instantaneous gate.
    PerfectGate,
}

impl Family {
    pub fn label(&self) -> String {
        match self {
            Family::Cavity { scheme, gate } => format!("{}-{}", scheme.label(), gate.label()),
            Family::IonTrap => "ion-trap".into(),
            Family::PerfectGate => "perfect-gate".into(),
        }
    }

    /// Every cavity scheme/gate combination plus both baselines.
    pub fn all() -> Vec<Family> {
        let mut out = Vec::new();
        for scheme in [Scheme::TwoPhoton, Scheme::OnePhoton] {
            for gate in [GateKind::Gate1, GateKind::Gate2, GateKind::Gate3] {
                out.push(Family::Cavity { scheme, gate });
            }
        }
        out.push(Family::IonTrap);
        out.push(Family::PerfectGate);
        out
    }

    /// The high-fidelity repeater: two-photon generation with the heralded gate.
    pub fn high_fidelity() -> Family {
        Family::Cavity {
            scheme: Scheme::TwoPhoton,
            gate: GateKind::Gate1,
        }
    }

    /// `(scheme, emitter, gate, dark counts enabled)` variants evaluated.
    fn setups(&self) -> Vec<(Scheme, Emitter, GateKind, bool)> {
        match *self {
            Family::Cavity { scheme, gate } => vec![(scheme, Emitter::Cavity, gate, true)],
            Family::IonTrap => vec![
                (Scheme::TwoPhoton, Emitter::FreeSpace, GateKind::Ion, true),
                (Scheme::OnePhoton, Emitter::FreeSpace, GateKind::Ion, true),
            ],
            Family::PerfectGate => {
                vec![(Scheme::TwoPhoton, Emitter::Cavity, GateKind::Perfect, false)]
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub distances_km: Vec<f64>,
    pub cooperativities: Vec<f64>,
    pub qubits_per_station: u32,
    pub families: Vec<Family>,
    pub swap_levels: Vec<u32>,
    pub purification_rounds: Vec<u32>,
    pub variants: Vec<PurificationVariant>,
    pub architectures: Vec<Architecture>,
    /// Hardware; its cooperativity is replaced by each grid value.
    pub physical: PhysicalParams,
    pub coefficient_form: CoefficientForm,
    pub simplex: SimplexOptions,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            distances_km: vec![1000.0],
            cooperativities: vec![100.0],
            qubits_per_station: 2,
            families: Family::all(),
            swap_levels: (0..=MAX_SWAP_LEVELS).collect(),
            purification_rounds: (0..=MAX_PURIFICATION_ROUNDS).collect(),
            variants: vec![PurificationVariant::Standard, PurificationVariant::Modified],
            architectures: vec![Architecture::Parallel, Architecture::Sequential],
            physical: PhysicalParams::default(),
            coefficient_form: CoefficientForm::Corrected,
            simplex: SimplexOptions::default(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let grids = [
            ("distances", self.distances_km.is_empty()),
            ("cooperativities", self.cooperativities.is_empty()),
            ("families", self.families.is_empty()),
            ("swap levels", self.swap_levels.is_empty()),
            ("purification rounds", self.purification_rounds.is_empty()),
            ("variants", self.variants.is_empty()),
            ("architectures", self.architectures.is_empty()),
        ];
        for (name, empty) in grids {
            if empty {
                return Err(param(format!("sweep grid of {name} is empty")));
            }
        }
        if let Some(&n) = self.swap_levels.iter().find(|&&n| n > MAX_SWAP_LEVELS) {
            return Err(param(format!("swap level {n} exceeds {MAX_SWAP_LEVELS}")));
        }
        if let Some(&j) = self
            .purification_rounds
            .iter()
            .find(|&&j| j > MAX_PURIFICATION_ROUNDS)
        {
            return Err(param(format!(
                "purification rounds {j} exceed {MAX_PURIFICATION_ROUNDS}"
            )));
        }
        if self.qubits_per_station != 2 && self.qubits_per_station != 4 {
            return Err(param(format!(
                "qubits per station must be 2 or 4, got {}",
                self.qubits_per_station
            )));
        }
        for &d in &self.distances_km {
            if !(d > 0.0 && d.is_finite()) {
                return Err(param(format!("distance must be positive, got {d}")));
            }
        }
        for &c in &self.cooperativities {
            if !(c > 0.0 && c.is_finite()) {
                return Err(param(format!("cooperativity must be positive, got {c}")));
            }
        }
        self.physical.validate()
    }
}

/// Best generation knobs found for one configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InnerOptimum {
    pub window_s: f64,
    /// `None` for the two-photon scheme, which has no excitation knob.
    pub eps_sq: Option<f64>,
    pub normalized_rate_hz: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

/// Normalized secret key rate, with infeasible configurations scoring zero.
fn objective(config: &RepeaterConfig) -> f64 {
    evaluate(config)
        .map(|r| r.normalized_rate_hz)
        .unwrap_or(0.0)
}

/// Maximizes the normalized secret key rate over `T ∈ (0, T_max]` and, for
/// the single-photon scheme, `ε² ∈ (0, 0.5]`, from several fixed starts.
pub fn optimize_inner(config: &RepeaterConfig, options: &SimplexOptions) -> InnerOptimum {
    let t_max = config.window_max_s();
    let t_bounds = ((t_max * WINDOW_FLOOR).ln(), t_max.ln());
    let with = |x: &[f64]| {
        let mut c = *config;
        c.window_s = x[0].exp().min(t_max);
        if x.len() > 1 {
            c.excitation_prob = x[1].exp().min(EPS_SQ_MAX);
        }
        c
    };
    let (starts, lower, upper): (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) = match config.scheme {
        Scheme::TwoPhoton => (
            [1.0, 0.3, 0.05]
                .iter()
                .map(|f| vec![(t_max * f).ln()])
                .collect(),
            vec![t_bounds.0],
            vec![t_bounds.1],
        ),
        Scheme::OnePhoton => (
            [1e-4, 1e-3, 1e-2, 1e-1]
                .iter()
                .map(|e: &f64| vec![(t_max * 0.5).ln(), e.ln()])
                .collect(),
            vec![t_bounds.0, EPS_SQ_MIN.ln()],
            vec![t_bounds.1, EPS_SQ_MAX.ln()],
        ),
    };
    let mut best: Option<InnerOptimum> = None;
    let (mut iterations, mut evaluations) = (0, 0);
    for start in &starts {
        let r = maximize(|x| objective(&with(x)), start, &lower, &upper, options);
        iterations += r.iterations;
        evaluations += r.evaluations;
        if best.as_ref().is_none_or(|b| r.value > b.normalized_rate_hz) {
            let c = with(&r.point);
            best = Some(InnerOptimum {
                window_s: c.window_s,
                eps_sq: (config.scheme == Scheme::OnePhoton).then_some(c.excitation_prob),
                normalized_rate_hz: r.value.max(0.0),
                iterations: 0,
                evaluations: 0,
            });
        }
    }
    let mut best = best.expect("at least one start");
    best.iterations = iterations;
    best.evaluations = evaluations;
    best
}

/// One evaluated grid cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellRecord {
    pub distance_km: f64,
    pub cooperativity: f64,
    pub family: String,
    pub config: RepeaterConfig,
    pub inner: InnerOptimum,
    /// `None` when the configuration is infeasible (e.g. a zero success
    /// probability); such cells score zero.
    pub report: Option<RateReport>,
}

impl CellRecord {
    pub fn normalized_rate_hz(&self) -> f64 {
        self.report.as_ref().map_or(0.0, |r| r.normalized_rate_hz)
    }
}

/// Winner of one (distance, cooperativity, family) block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimumRecord {
    pub distance_km: f64,
    pub cooperativity: f64,
    pub family: String,
    pub config: RepeaterConfig,
    pub inner: InnerOptimum,
    pub report: Option<RateReport>,
    /// Cells evaluated for this block.
    pub cells: usize,
}

impl OptimumRecord {
    pub fn normalized_rate_hz(&self) -> f64 {
        self.report.as_ref().map_or(0.0, |r| r.normalized_rate_hz)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GridOutcome {
    pub winners: Vec<OptimumRecord>,
    pub cells: Vec<CellRecord>,
}

struct Block {
    distance_km: f64,
    cooperativity: f64,
    family: Family,
}

/// Discrete configurations of one block, in tie-break order (smaller `n`
/// first, then smaller `j`). Purification needs four qubits, and the variant
/// only matters when purifying.
fn block_configs(spec: &SweepSpec, block: &Block) -> Vec<RepeaterConfig> {
    let mut physical = spec.physical;
    physical.cooperativity = block.cooperativity;
    let mut levels = spec.swap_levels.clone();
    levels.sort_unstable();
    levels.dedup();
    let mut rounds = spec.purification_rounds.clone();
    rounds.sort_unstable();
    rounds.dedup();
    let mut out = Vec::new();
    for &n in &levels {
        for &j in &rounds {
            if j > 0 && spec.qubits_per_station < 4 {
                continue;
            }
            let variants: &[PurificationVariant] = if j == 0 {
                &spec.variants[..1]
            } else {
                &spec.variants
            };
            for &variant in variants {
                for &architecture in &spec.architectures {
                    for (scheme, emitter, gate, dark) in block.family.setups() {
                        let mut phys = physical;
                        if !dark {
                            phys.dark_count_rate_hz = 0.0;
                        }
                        let mut config = RepeaterConfig {
                            total_distance_km: block.distance_km,
                            swap_levels: n,
                            purification_rounds: j,
                            variant,
                            architecture,
                            qubits_per_station: spec.qubits_per_station,
                            scheme,
                            emitter,
                            gate,
                            physical: phys,
                            excitation_prob: 0.01,
                            window_s: 0.0,
                            coefficient_form: spec.coefficient_form,
                        };
                        config.window_s = config.window_max_s();
                        out.push(config);
                    }
                }
            }
        }
    }
    out
}

fn evaluate_cell(block: &Block, config: &RepeaterConfig, options: &SimplexOptions) -> CellRecord {
    let inner = optimize_inner(config, options);
    let mut tuned = *config;
    tuned.window_s = inner.window_s;
    if let Some(e) = inner.eps_sq {
        tuned.excitation_prob = e;
    }
    CellRecord {
        distance_km: block.distance_km,
        cooperativity: block.cooperativity,
        family: block.family.label(),
        config: tuned,
        report: evaluate(&tuned).ok(),
        inner,
    }
}

/// Exhaustive grid search. Returns one winner per (distance, cooperativity,
/// family) and, when `keep_cells` is set, every evaluated cell.
pub fn optimize_grid(spec: &SweepSpec, keep_cells: bool) -> Result<GridOutcome> {
    spec.validate()?;
    let mut blocks = Vec::new();
    for &distance_km in &spec.distances_km {
        for &cooperativity in &spec.cooperativities {
            for &family in &spec.families {
                blocks.push(Block {
                    distance_km,
                    cooperativity,
                    family,
                });
            }
        }
    }
    let jobs: Vec<(usize, RepeaterConfig)> = blocks
        .iter()
        .enumerate()
        .flat_map(|(b, block)| block_configs(spec, block).into_iter().map(move |c| (b, c)))
        .collect();
    let cells: Vec<(usize, CellRecord)> = jobs
        .par_iter()
        .map(|(b, c)| (*b, evaluate_cell(&blocks[*b], c, &spec.simplex)))
        .collect();

    let mut winners = Vec::with_capacity(blocks.len());
    for (b, block) in blocks.iter().enumerate() {
        let members: Vec<&CellRecord> = cells
            .iter()
            .filter(|(i, _)| *i == b)
            .map(|(_, c)| c)
            .collect();
        // strict improvement keeps the earliest (cheapest) cell on ties
        let mut best = members[0];
        for &cell in &members[1..] {
            if cell.normalized_rate_hz() > best.normalized_rate_hz() {
                best = cell;
            }
        }
        winners.push(OptimumRecord {
            distance_km: block.distance_km,
            cooperativity: block.cooperativity,
            family: block.family.label(),
            config: best.config,
            inner: best.inner.clone(),
            report: best.report.clone(),
            cells: members.len(),
        });
    }
    Ok(GridOutcome {
        winners,
        cells: if keep_cells {
            cells.into_iter().map(|(_, c)| c).collect()
        } else {
            Vec::new()
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankingRow {
    pub distance_km: f64,
    pub cooperativity: f64,
    /// 1 is best.
    pub rank: usize,
    pub record: OptimumRecord,
}

/// Best normalized rate of every family at each (distance, cooperativity),
/// sorted from best to worst.
pub fn compare_schemes(spec: &SweepSpec) -> Result<Vec<RankingRow>> {
    let outcome = optimize_grid(spec, false)?;
    let mut rows = Vec::new();
    for &d in &spec.distances_km {
        for &c in &spec.cooperativities {
            let mut group: Vec<&OptimumRecord> = outcome
                .winners
                .iter()
                .filter(|w| w.distance_km == d && w.cooperativity == c)
                .collect();
            group.sort_by(|a, b| b.normalized_rate_hz().total_cmp(&a.normalized_rate_hz()));
            rows.extend(group.into_iter().enumerate().map(|(i, r)| RankingRow {
                distance_km: d,
                cooperativity: c,
                rank: i + 1,
                record: r.clone(),
            }));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SweepSpec {
        SweepSpec {
            distances_km: vec![300.0],
            cooperativities: vec![100.0],
            families: vec![Family::high_fidelity()],
            swap_levels: vec![0, 1, 2],
            ..SweepSpec::default()
        }
    }

    #[test]
    fn two_photon_optimum_sits_at_window_bound_without_dark_counts() {
        let mut c = RepeaterConfig::high_fidelity(200.0, 1);
        c.physical.dark_count_rate_hz = 0.0;
        let r = optimize_inner(&c, &SimplexOptions::default());
        assert!(r.eps_sq.is_none());
        let t_max = c.window_max_s();
        assert!(
            (r.window_s - t_max).abs() <= 1e-9 * t_max,
            "{} vs {}",
            r.window_s,
            t_max
        );
    }

    #[test]
    fn two_qubit_grids_skip_purification() {
        let spec = SweepSpec {
            purification_rounds: vec![0, 1, 2],
            ..small_spec()
        };
        let out = optimize_grid(&spec, true).unwrap();
        assert!(out.cells.iter().all(|c| c.config.purification_rounds == 0));
        assert_eq!(out.cells.len(), 3 * 2);
    }

    #[test]
    fn winner_dominates_its_cells() {
        let out = optimize_grid(&small_spec(), true).unwrap();
        let w = &out.winners[0];
        assert!(out
            .cells
            .iter()
            .all(|c| c.normalized_rate_hz() <= w.normalized_rate_hz()));
        assert!(w.normalized_rate_hz() > 0.0);
    }

    #[test]
    fn empty_grid_is_rejected() {
        let spec = SweepSpec {
            distances_km: vec![],
            ..small_spec()
        };
        assert!(optimize_grid(&spec, false).is_err());
    }

    #[test]
    fn grid_is_reproducible() {
        let a = optimize_grid(&small_spec(), true).unwrap();
        let b = optimize_grid(&small_spec(), true).unwrap();
        assert_eq!(a, b);
    }
}
