//! Monte Carlo simulation of the repeater protocol, used to check the
//! analytic distribution-time estimates of [`crate::rate`].
//!
//! The simulator follows the same operational conventions as the estimator:
//! a link runs `m` generation attempts per round and keeps successes; a
//! failed purification discards the link's pairs and restarts it; each swap
//! level waits for both of its halves. Heralded swaps that fail discard both
//! halves, which are rebuilt from scratch with the parallel architecture.
//! Fidelities are not tracked; they are deterministic given the
//! configuration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Architecture, RepeaterConfig};
use crate::error::{param, Error, Result};
use crate::rate::{timing, LinkModel, LinkTimes};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum ChainEvent {
    /// Elementary link `link` holds its final (purified) pair.
    LinkReady {
        link: u64,
    },
    PurificationFailed {
        link: u64,
    },
    /// Swap joining segment `segment` of `level` (1-based).
    Swap {
        level: u32,
        segment: u64,
        success: bool,
    },
    Completed,
}

/// One simulated distribution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainTrial {
    pub seed: u64,
    pub trial: u64,
    /// Time-ordered `(time in s, event)` pairs.
    pub events: Vec<(f64, ChainEvent)>,
    pub completion_time_s: f64,
}

/// The stochastic ingredients of a repeater chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainModel {
    pub levels: u32,
    pub architecture: Architecture,
    /// Parallel generation attempts per link.
    pub pairs_per_link: u32,
    /// Success probability of a single generation attempt.
    pub p0: f64,
    /// Success probability of each pumping round.
    pub purification_success: Vec<f64>,
    /// Success probability of a swap; 1 for deterministic gates.
    pub p_swap: f64,
    pub times: LinkTimes,
}

impl ChainModel {
    pub fn from_config(config: &RepeaterConfig) -> Result<Self> {
        let model = LinkModel::build(config)?;
        Ok(Self {
            levels: config.swap_levels,
            architecture: config.architecture,
            pairs_per_link: config.pairs_per_link(),
            p0: model.generation.success_prob,
            purification_success: model.pumping.success.clone(),
            p_swap: if config.gate.is_probabilistic() {
                model.gate.success_prob
            } else {
                1.0
            },
            times: model.times,
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.p0 > 0.0 && self.p0 <= 1.0) {
            return Err(Error::Divergence(format!(
                "generation success probability {}",
                self.p0
            )));
        }
        if !(self.p_swap > 0.0 && self.p_swap <= 1.0) {
            return Err(Error::Divergence(format!(
                "swap success probability {}",
                self.p_swap
            )));
        }
        if self
            .purification_success
            .iter()
            .any(|&p| !(p > 0.0 && p <= 1.0))
        {
            return Err(Error::DegeneratePurification);
        }
        let rounds = !self.purification_success.is_empty();
        if self.pairs_per_link == 0 || (rounds && self.pairs_per_link < 2) {
            return Err(param(
                "purification needs at least two parallel attempts per link",
            ));
        }
        Ok(())
    }
}

/// Number of rounds until the first success, `p ∈ (0, 1]`.
fn geometric(rng: &mut ChaCha8Rng, p: f64) -> f64 {
    if p >= 1.0 {
        return 1.0;
    }
    let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    1.0 + (u.ln() / (-p).ln_1p()).floor()
}

/// Successes among `k` attempts conditioned on at least one.
fn successes_given_any(rng: &mut ChaCha8Rng, k: u32, p: f64) -> u32 {
    if k == 1 {
        return 1;
    }
    let q = 1.0 - p;
    let norm = -(f64::from(k) * (-p).ln_1p()).exp_m1();
    let mut u = rng.gen::<f64>() * norm;
    let mut coef = 1.0;
    for s in 1..=k {
        coef *= f64::from(k - s + 1) / f64::from(s);
        let pmf = coef * p.powi(s as i32) * q.powi((k - s) as i32);
        if u < pmf {
            return s;
        }
        u -= pmf;
    }
    k
}

struct Sim<'a> {
    model: &'a ChainModel,
    rng: ChaCha8Rng,
    events: Option<Vec<(f64, ChainEvent)>>,
}

impl Sim<'_> {
    fn log(&mut self, t: f64, e: ChainEvent) {
        if let Some(ev) = self.events.as_mut() {
            ev.push((t, e));
        }
    }

    /// Attempt rounds until `need` pairs are stored with `m` qubits.
    fn collect(&mut self, need: u32, m: u32) -> f64 {
        let p = self.model.p0;
        let (mut have, mut rounds) = (0, 0.0);
        while have < need {
            let free = m - have;
            let p_any = -(f64::from(free) * (-p).ln_1p()).exp_m1();
            rounds += geometric(&mut self.rng, p_any);
            have += successes_given_any(&mut self.rng, free, p);
        }
        rounds
    }

    /// Fills link `link` starting at `start` with `m` qubits; returns the
    /// time its final pair is ready.
    fn fill_link(&mut self, link: u64, start: f64, m: u32) -> f64 {
        let times = self.model.times;
        let rounds = self.model.purification_success.len();
        let mut t = start;
        'restart: loop {
            if rounds == 0 {
                t += self.collect(1, m) * times.attempt_s;
                break;
            }
            t += self.collect(2, m) * times.attempt_s;
            for i in 0..rounds {
                if i > 0 {
                    t += self.collect(1, m - 1) * times.attempt_s;
                }
                t += times.purification_s();
                if self.rng.gen::<f64>() >= self.model.purification_success[i] {
                    self.log(t, ChainEvent::PurificationFailed { link });
                    continue 'restart;
                }
            }
            break;
        }
        self.log(t, ChainEvent::LinkReady { link });
        t
    }

    /// Builds segment `segment` of `level` from scratch starting at `start`
    /// with parallel links, retrying failed swaps.
    fn build(&mut self, level: u32, segment: u64, start: f64) -> f64 {
        if level == 0 {
            return self.fill_link(segment, start, self.model.pairs_per_link);
        }
        let mut t = start;
        loop {
            let left = self.build(level - 1, 2 * segment, t);
            let right = self.build(level - 1, 2 * segment + 1, t);
            t = left.max(right) + self.model.times.swap_s(level);
            if self.swap(level, segment, t) {
                return t;
            }
        }
    }

    fn swap(&mut self, level: u32, segment: u64, t: f64) -> bool {
        let success = self.model.p_swap >= 1.0 || self.rng.gen::<f64>() < self.model.p_swap;
        self.log(
            t,
            ChainEvent::Swap {
                level,
                segment,
                success,
            },
        );
        success
    }

    fn sequential(&mut self) -> f64 {
        let n = self.model.levels;
        let m = self.model.pairs_per_link;
        let links = 1u64 << n;
        // every other link first with all qubits, then the rest with one
        // qubit per station already holding a pair
        let mut t: f64 = 0.0;
        for (parity, qubits) in [(0, 2 * m), (1, 2 * m - 1)] {
            let start = t;
            for link in (parity..links).step_by(2) {
                t = t.max(self.fill_link(link, start, qubits));
            }
        }
        for level in 1..=n {
            let start = t;
            let attempt = start + self.model.times.swap_s(level);
            t = attempt;
            for segment in 0..(links >> level) {
                if !self.swap(level, segment, attempt) {
                    t = t.max(self.build(level, segment, attempt));
                }
            }
        }
        t
    }

    fn run(&mut self) -> f64 {
        let n = self.model.levels;
        let t = match self.model.architecture {
            Architecture::Sequential if n >= 1 => self.sequential(),
            _ => self.build(n, 0, 0.0),
        };
        self.log(t, ChainEvent::Completed);
        t
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Simulates trial `trial` of the stream `seed`, keeping the event log.
pub fn simulate_trial(model: &ChainModel, seed: u64, trial: u64) -> Result<ChainTrial> {
    model.validate()?;
    let mut sim = Sim {
        model,
        rng: trial_rng(seed, trial),
        events: Some(Vec::new()),
    };
    let completion_time_s = sim.run();
    let mut events = sim.events.take().unwrap_or_default();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(ChainTrial {
        seed,
        trial,
        events,
        completion_time_s,
    })
}

/// Mean completion time and its standard error over `trials` trials.
pub fn simulate_model(model: &ChainModel, trials: u64, seed: u64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(param("the chain simulation needs at least one trial"));
    }
    model.validate()?;
    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut sim = Sim {
                model,
                rng: trial_rng(seed, trial),
                events: None,
            };
            sim.run()
        })
        .collect();
    let n = trials as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = if trials > 1 {
        samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok((mean, (var / n).sqrt()))
}

pub fn simulate_chain(config: &RepeaterConfig, trials: u64, seed: u64) -> Result<(f64, f64)> {
    simulate_model(&ChainModel::from_config(config)?, trials, seed)
}

/// Accepted analytic/simulated ratio band.
pub const RATIO_BAND: (f64, f64) = (0.5, 2.0);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationRow {
    pub config: RepeaterConfig,
    pub analytic_s: f64,
    pub mc_mean_s: f64,
    pub mc_stderr_s: f64,
    /// Analytic over simulated distribution time.
    pub ratio: f64,
    pub within_band: bool,
}

/// Configurations checked by default: `n ≤ 3`, `j ≤ 2`, both
/// architectures and purification variants, with the heralded gate and a
/// deterministic gate.
pub fn default_validation_grid(base: &RepeaterConfig) -> Vec<RepeaterConfig> {
    use crate::config::{GateKind, PurificationVariant};
    let mut out = Vec::new();
    for gate in [GateKind::Gate1, GateKind::Gate2] {
        for n in 0..=3 {
            for j in 0..=2 {
                let variants: &[PurificationVariant] = if j == 0 {
                    &[PurificationVariant::Standard]
                } else {
                    &[PurificationVariant::Standard, PurificationVariant::Modified]
                };
                for &variant in variants {
                    for architecture in [Architecture::Parallel, Architecture::Sequential] {
                        if n == 0 && architecture == Architecture::Sequential {
                            continue;
                        }
                        out.push(RepeaterConfig {
                            gate,
                            swap_levels: n,
                            purification_rounds: j,
                            variant,
                            architecture,
                            qubits_per_station: base.qubits_per_station.max(4),
                            ..*base
                        });
                    }
                }
            }
        }
    }
    out
}

/// Compares the analytic distribution time with the simulated mean for
/// every configuration. Each row uses its own seed derived from `seed` and
/// the row index.
pub fn validate_report(
    configs: &[RepeaterConfig],
    trials: u64,
    seed: u64,
) -> Result<Vec<ValidationRow>> {
    if configs.is_empty() {
        return Err(param("validation grid is empty"));
    }
    if let Some(c) = configs.iter().find(|c| c.swap_levels > 3) {
        return Err(param(format!(
            "validation is limited to at most 3 swap levels, got {}",
            c.swap_levels
        )));
    }
    configs
        .iter()
        .enumerate()
        .map(|(i, config)| {
            let model = LinkModel::build(config)?;
            let analytic_s = timing(config, &model)?.distribution_time_s;
            let (mc_mean_s, mc_stderr_s) =
                simulate_chain(config, trials, seed.wrapping_add(i as u64))?;
            let ratio = analytic_s / mc_mean_s;
            Ok(ValidationRow {
                config: *config,
                analytic_s,
                mc_mean_s,
                mc_stderr_s,
                ratio,
                within_band: (RATIO_BAND.0..=RATIO_BAND.1).contains(&ratio),
            })
        })
        .collect()
}
