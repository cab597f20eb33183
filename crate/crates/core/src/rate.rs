//! Average distribution times and end-to-end fidelity of a repeater chain.
//!
//! Time estimates treat every stage as a set of independent binomial events
//! and combine them with the waiting-time factors of [`crate::combinatorics`].
//! They are estimators, not exact means; [`crate::chain`] simulates the same
//! protocol for comparison.

use serde::Serialize;

use crate::combinatorics::z_factor;
use crate::config::{Architecture, Emitter, PurificationVariant, RepeaterConfig, Scheme};
use crate::error::{param, Error, Result};
use crate::gates::GateModel;
use crate::generation::{self, GenerationAttempt};
use crate::states::{entanglement_swap, purify, TwoQubitState};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimingBreakdown {
    /// Time until every elementary link holds a (purified) pair.
    pub tau_link_s: f64,
    pub tau_swap_total_s: f64,
    pub distribution_time_s: f64,
    /// Contribution of each swap level, lowest level first.
    pub swap_level_s: Vec<f64>,
}

/// Elementary-link timing constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkTimes {
    /// One generation attempt, `L0/c + τ_local`.
    pub attempt_s: f64,
    /// One-way signalling over a link, `L0/c`.
    pub signal_s: f64,
    /// Gate duration `τ_c`.
    pub gate_s: f64,
}

impl LinkTimes {
    /// One purification round, `L0/c + τ_c`.
    pub fn purification_s(&self) -> f64 {
        self.signal_s + self.gate_s
    }

    /// Classical communication and gate time of a swap at `level` (1-based).
    pub fn swap_s(&self, level: u32) -> f64 {
        f64::from(1u32 << (level - 1)) * self.signal_s + self.gate_s
    }
}

/// States and success probabilities of successive pumping rounds.
#[derive(Clone, Debug, PartialEq)]
pub struct PumpingTrajectory {
    /// `ρ_0, ρ_1, …, ρ_j`.
    pub states: Vec<TwoQubitState>,
    /// `P_pur(F_i, F_0)` for `i = 0..j`.
    pub success: Vec<f64>,
}

/// Binomial-event probabilities of the pumping stage.
#[derive(Clone, Debug, PartialEq)]
pub struct PumpingProbabilities {
    pub p1: f64,
    /// `P₂^(i)` for `i = 0, …, j−1`.
    pub p2: Vec<f64>,
    /// `P₃^(i)` for `i = 1, …, j−1`.
    pub p3: Vec<f64>,
}

impl PumpingTrajectory {
    pub fn rounds(&self) -> usize {
        self.success.len()
    }

    pub fn fidelities(&self) -> Vec<f64> {
        self.states.iter().map(TwoQubitState::fidelity).collect()
    }

    pub fn final_state(&self) -> &TwoQubitState {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }

    fn tail_product(&self, from: usize) -> f64 {
        self.success[from..].iter().product()
    }

    /// Event probabilities for a link that runs `m` generation attempts in
    /// parallel with per-attempt success `p0`.
    ///
    /// Without purification the link only needs one pair, so `P₁ = 1/Z_{1;m}`.
    pub fn probabilities(&self, p0: f64, m: u32) -> Result<PumpingProbabilities> {
        let j = self.rounds();
        if j == 0 {
            return Ok(PumpingProbabilities {
                p1: 1.0 / z_factor(1, m, p0)?,
                p2: Vec::new(),
                p3: Vec::new(),
            });
        }
        if m < 2 {
            return Err(param(
                "purification needs at least two parallel attempts per link",
            ));
        }
        let p1 = self.tail_product(0) / z_factor(2, m, p0)?;
        let p2 = (0..j).map(|i| self.tail_product(i)).collect();
        let z3 = if j > 1 { z_factor(1, m - 1, p0)? } else { 1.0 };
        let p3 = (1..j).map(|i| self.tail_product(i) / z3).collect();
        Ok(PumpingProbabilities { p1, p2, p3 })
    }
}

/// Runs `rounds` pumping rounds, each consuming a fresh copy of `initial`.
pub fn pump(
    initial: &TwoQubitState,
    gate: &GateModel,
    variant: PurificationVariant,
    rounds: u32,
) -> Result<PumpingTrajectory> {
    let mut states = vec![initial.clone()];
    let mut success = Vec::with_capacity(rounds as usize);
    for _ in 0..rounds {
        let (next, p) = purify(states.last().unwrap(), initial, gate, variant)?;
        if p <= 0.0 {
            return Err(Error::DegeneratePurification);
        }
        states.push(next);
        success.push(p);
    }
    Ok(PumpingTrajectory { states, success })
}

/// `Z_{l;m}(P0)·(L0/c + τ_local)`.
pub fn tau_pair(l: u32, m: u32, p0: f64, times: &LinkTimes) -> Result<f64> {
    Ok(z_factor(l, m, p0)? * times.attempt_s)
}

/// Time until all `links` elementary links hold a purified pair.
pub fn tau_link(links: u32, probs: &PumpingProbabilities, times: &LinkTimes) -> Result<f64> {
    let z = |p: f64| z_factor(links, links, p);
    let mut t = z(probs.p1)? * times.attempt_s;
    for &p in &probs.p2 {
        t += z(p)? * times.purification_s();
    }
    for &p in &probs.p3 {
        t += z(p)? * times.attempt_s;
    }
    Ok(t)
}

/// `(2ⁿ−1)L0/c + nτ_c`.
pub fn tau_swap_deterministic(levels: u32, times: &LinkTimes) -> f64 {
    (1..=levels).map(|k| times.swap_s(k)).sum()
}

/// The iterated factor `Z̃_{n;i}`: start from `base` at level `i` and apply
/// `z ↦ Z_{2;2}(P_swap/z)` once per further level up to `n`.
fn z_tilde(n: u32, i: u32, p_swap: f64, base: f64) -> Result<f64> {
    let mut z = base;
    for _ in i..n {
        z = z_factor(2, 2, p_swap / z)?;
    }
    Ok(z)
}

fn check_swap_probability(p_swap: f64) -> Result<()> {
    if p_swap == 0.0 {
        return Err(Error::Divergence("swap success probability is zero".into()));
    }
    if !(p_swap > 0.0 && p_swap <= 1.0) {
        return Err(param(format!(
            "swap success probability {p_swap} outside (0,1]"
        )));
    }
    Ok(())
}

/// Parallel repeater with heralded (probabilistic) swaps. Returns the
/// generation/purification part and the per-level communication parts; the
/// distribution time is their sum.
pub fn tau_swap_probabilistic(
    levels: u32,
    p_swap: f64,
    probs: &PumpingProbabilities,
    times: &LinkTimes,
) -> Result<(f64, Vec<f64>)> {
    check_swap_probability(p_swap)?;
    if levels == 0 {
        return Ok((tau_link(1, probs, times)?, Vec::new()));
    }
    let n = levels;
    let gen = |p: f64| -> Result<f64> { z_tilde(n, 1, p_swap, z_factor(2, 2, p)?) };
    let mut link = gen(probs.p1)? * times.attempt_s;
    for &p in &probs.p2 {
        link += gen(p)? * times.purification_s();
    }
    for &p in &probs.p3 {
        link += gen(p)? * times.attempt_s;
    }
    let per_level = (1..=n)
        .map(|i| Ok(z_tilde(n, i, p_swap, 1.0)? * times.swap_s(i) / p_swap))
        .collect::<Result<Vec<_>>>()?;
    Ok((link / p_swap, per_level))
}

/// Per-level swap times of a sequential repeater with heralded swaps. Failed
/// swaps are restored in parallel, so `probs` are the parallel (`m`-attempt)
/// probabilities.
pub fn tau_swap_sequential(
    levels: u32,
    p_swap: f64,
    probs: &PumpingProbabilities,
    times: &LinkTimes,
) -> Result<Vec<f64>> {
    check_swap_probability(p_swap)?;
    (1..=levels)
        .map(|l| {
            let swaps = 1u32 << (levels - l);
            let restore = |p: f64| -> Result<f64> { z_tilde(l, 1, p_swap, z_factor(2, 2, p)?) };
            let gen_z = restore(probs.p1)?;
            let p2_z = probs
                .p2
                .iter()
                .map(|&p| restore(p))
                .collect::<Result<Vec<_>>>()?;
            let p3_z = probs
                .p3
                .iter()
                .map(|&p| restore(p))
                .collect::<Result<Vec<_>>>()?;
            let comm_z = (1..=l)
                .map(|k| z_tilde(l, k, p_swap, 1.0))
                .collect::<Result<Vec<_>>>()?;
            let mut total = 0.0;
            for failed in 0..=swaps {
                let weight = binomial(swaps, failed)
                    * p_swap.powi((swaps - failed) as i32)
                    * (1.0 - p_swap).powi(failed as i32);
                if weight == 0.0 {
                    continue;
                }
                let zi = |x: f64| z_factor(failed, failed.max(1), p_swap / x);
                let mut t = if failed == 0 { times.swap_s(l) } else { 0.0 };
                if failed > 0 {
                    t += zi(gen_z)? * times.attempt_s;
                    for (k, &z) in comm_z.iter().enumerate() {
                        t += zi(z)? * times.swap_s(k as u32 + 1);
                    }
                    for &z in &p2_z {
                        t += zi(z)? * times.purification_s();
                    }
                    for &z in &p3_z {
                        t += zi(z)? * times.attempt_s;
                    }
                }
                total += weight * t;
            }
            Ok(total)
        })
        .collect()
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Everything about one elementary link that the rate and fidelity models
/// need.
#[derive(Clone, Debug)]
pub struct LinkModel {
    pub generation: GenerationAttempt,
    pub gate: GateModel,
    pub pumping: PumpingTrajectory,
    pub times: LinkTimes,
}

/// Heralded generation for the configured scheme and emitter.
pub fn generate(config: &RepeaterConfig) -> Result<GenerationAttempt> {
    let link = config.link()?;
    match (config.emitter, config.scheme) {
        (Emitter::Cavity, Scheme::OnePhoton) => generation::generate_one_photon(
            &link,
            config.excitation_prob,
            config.window_s,
            config.coefficient_form,
        ),
        (Emitter::Cavity, Scheme::TwoPhoton) => {
            generation::generate_two_photon(&link, config.window_s, config.coefficient_form)
        }
        (Emitter::FreeSpace, scheme) => generation::generate_ion_trap(
            &link,
            scheme,
            config.excitation_prob,
            config.window_s,
            config.coefficient_form,
        ),
    }
}

impl LinkModel {
    pub fn build(config: &RepeaterConfig) -> Result<Self> {
        config.validate()?;
        let link = config.link()?;
        let generation = generate(config)?;
        let gate = config.gate_model()?;
        let pumping = pump(
            &generation.state,
            &gate,
            config.variant,
            config.purification_rounds,
        )?;
        let times = LinkTimes {
            attempt_s: link.attempt_time_s(),
            signal_s: link.signal_time_s(),
            gate_s: gate.gate_time_s,
        };
        Ok(Self {
            generation,
            gate,
            pumping,
            times,
        })
    }

    pub fn probabilities(&self, m: u32) -> Result<PumpingProbabilities> {
        self.pumping.probabilities(self.generation.success_prob, m)
    }
}

/// Time to fill every link, for the configured architecture.
fn link_time(config: &RepeaterConfig, model: &LinkModel) -> Result<f64> {
    let n = config.swap_levels;
    let m = config.pairs_per_link();
    match config.architecture {
        Architecture::Sequential if n >= 1 => {
            let half = 1u32 << (n - 1);
            let first = tau_link(half, &model.probabilities(2 * m)?, &model.times)?;
            let second = tau_link(half, &model.probabilities(2 * m - 1)?, &model.times)?;
            Ok(first + second)
        }
        _ => tau_link(1u32 << n, &model.probabilities(m)?, &model.times),
    }
}

pub fn tau_link_parallel(config: &RepeaterConfig) -> Result<f64> {
    let model = LinkModel::build(config)?;
    tau_link(
        1u32 << config.swap_levels,
        &model.probabilities(config.pairs_per_link())?,
        &model.times,
    )
}

pub fn tau_link_sequential(config: &RepeaterConfig) -> Result<f64> {
    let mut cfg = *config;
    cfg.architecture = Architecture::Sequential;
    let model = LinkModel::build(&cfg)?;
    link_time(&cfg, &model)
}

/// Distribution time and its breakdown for an already built link model.
pub fn timing(config: &RepeaterConfig, model: &LinkModel) -> Result<TimingBreakdown> {
    let n = config.swap_levels;
    let times = &model.times;
    let (tau_link_s, swap_level_s) = if config.gate.is_probabilistic() && n > 0 {
        let p_swap = model.gate.success_prob;
        let probs = model.probabilities(config.pairs_per_link())?;
        match config.architecture {
            Architecture::Parallel => tau_swap_probabilistic(n, p_swap, &probs, times)?,
            Architecture::Sequential => (
                link_time(config, model)?,
                tau_swap_sequential(n, p_swap, &probs, times)?,
            ),
        }
    } else {
        (
            link_time(config, model)?,
            (1..=n).map(|k| times.swap_s(k)).collect(),
        )
    };
    let tau_swap_total_s: f64 = swap_level_s.iter().sum();
    Ok(TimingBreakdown {
        tau_link_s,
        tau_swap_total_s,
        distribution_time_s: tau_link_s + tau_swap_total_s,
        swap_level_s,
    })
}

/// Fidelity of the distributed pair: generation, pumping, then `n` levels of
/// swapping identical pairs.
pub fn propagate_fidelity(levels: u32, model: &LinkModel) -> Result<TwoQubitState> {
    let mut state = model.pumping.final_state().clone();
    for _ in 0..levels {
        state = entanglement_swap(&state, &state, &model.gate)?.0;
    }
    Ok(state)
}

/// `Φ⁺` weight and state of the end-to-end pair.
pub fn final_fidelity(config: &RepeaterConfig) -> Result<(f64, TwoQubitState)> {
    let model = LinkModel::build(config)?;
    let state = propagate_fidelity(config.swap_levels, &model)?;
    Ok((state.fidelity(), state))
}

/// `1/distribution time` together with the breakdown.
pub fn distribution_rate(config: &RepeaterConfig) -> Result<(f64, TimingBreakdown)> {
    let model = LinkModel::build(config)?;
    let t = timing(config, &model)?;
    Ok((1.0 / t.distribution_time_s, t))
}
