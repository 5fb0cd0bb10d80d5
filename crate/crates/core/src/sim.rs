//! Forward simulation of the game.
//!
//! Each trial: nature picks spy (prob. `p`) or spammer; the spy draws `H ~ α`,
//! the spammer draws `Z ~ pmf`, the defender draws `T ~ β`. The defender's raw
//! payoff is `c_d 1{T<=H} - c_a H` against a spy and `-c_fa 1{Z>=T}` against a
//! spammer.
//!
//! Trials are split into fixed-size chunks. Chunk `k` draws the attacker type,
//! the spy's `H`, the spammer's `Z` and the defender's `T` from ChaCha8
//! streams `4k`, `4k+1`, `4k+2`, `4k+3` of the configured seed, so a report
//! depends only on the configuration, not on the thread count.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::game::{GameParams, MixedStrategy, SpammerModel};

pub const CHUNK_TRIALS: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("invalid simulation parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },
    #[error("{what} has length {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
}

/// Simulation input. `params.p` may be 0 or 1 here.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub params: GameParams,
    pub model: SpammerModel,
    pub alpha: MixedStrategy,
    pub beta: MixedStrategy,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::NoTrials);
        }
        let p = &self.params;
        if !(0.0..=1.0).contains(&p.p) {
            return Err(SimError::InvalidParam {
                field: "p",
                reason: format!("must lie in [0, 1], got {}", p.p),
            });
        }
        for (field, value) in [("c_d", p.c_d), ("c_a", p.c_a), ("c_fa", p.c_fa)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(SimError::InvalidParam {
                    field,
                    reason: format!("must be positive, got {value}"),
                });
            }
        }
        for (what, expected, got) in [
            ("spammer pmf", p.n + 1, self.model.pmf().len()),
            ("attacker strategy", p.n + 1, self.alpha.len()),
            ("defender strategy", p.n + 2, self.beta.len()),
        ] {
            if expected != got {
                return Err(SimError::DimensionMismatch { what, expected, got });
            }
        }
        Ok(())
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub count: u64,
}

impl Estimate {
    /// `|mean - expected|` in standard errors. A zero standard error gives
    /// 0 on an exact match and infinity otherwise.
    pub fn deviation(&self, expected: f64) -> f64 {
        let diff = (self.mean - expected).abs();
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff <= 1e-12 * expected.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub trials: u64,
    pub seed: u64,
    pub spy_trials: u64,
    pub spammer_trials: u64,
    /// Per-trial raw defender payoff (Ũ_D scale).
    pub defender_payoff_raw: Estimate,
    /// Spy cost, over spy trials only.
    pub spy_cost: Option<Estimate>,
    pub spy_detection_rate: Option<Estimate>,
    pub spammer_false_alarm_rate: Option<Estimate>,
}

/// Expected values of the simulated quantities for given strategies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticValues {
    pub spy_cost: f64,
    pub defender_payoff_raw: f64,
    pub spy_detection_rate: f64,
    pub spammer_false_alarm_rate: f64,
}

pub fn analytic_values(config: &SimConfig) -> AnalyticValues {
    let p = &config.params;
    let alpha = config.alpha.weights();
    let beta = config.beta.weights();
    let tail = config.model.tail();
    let mut cost = 0.0;
    let mut detect = 0.0;
    for (h, &a) in alpha.iter().enumerate() {
        for (t, &b) in beta.iter().enumerate() {
            let caught = if t <= h { 1.0 } else { 0.0 };
            cost += a * b * (p.c_d * caught - p.c_a * h as f64);
            detect += a * b * caught;
        }
    }
    let false_alarm: f64 = beta.iter().zip(tail).map(|(b, phi)| b * phi).sum();
    AnalyticValues {
        spy_cost: cost,
        defender_payoff_raw: p.p * cost - (1.0 - p.p) * p.c_fa * false_alarm,
        spy_detection_rate: detect,
        spammer_false_alarm_rate: false_alarm,
    }
}

/// Running count, mean and sum of squared deviations (Welford), mergeable.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.n == 0 {
            return b;
        }
        if b.n == 0 {
            return a;
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        Moments {
            n,
            mean: a.mean + d * b.n as f64 / n as f64,
            m2: a.m2 + b.m2 + d * d * (a.n as f64 * b.n as f64) / n as f64,
        }
    }

    fn estimate(&self) -> Option<Estimate> {
        if self.n == 0 {
            return None;
        }
        let stderr = if self.n > 1 {
            (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
        } else {
            0.0
        };
        Some(Estimate {
            mean: self.mean,
            stderr,
            count: self.n,
        })
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ChunkStats {
    payoff: Moments,
    spy_cost: Moments,
    detected: Moments,
    false_alarm: Moments,
}

impl ChunkStats {
    fn merge(a: ChunkStats, b: ChunkStats) -> ChunkStats {
        ChunkStats {
            payoff: Moments::merge(a.payoff, b.payoff),
            spy_cost: Moments::merge(a.spy_cost, b.spy_cost),
            detected: Moments::merge(a.detected, b.detected),
            false_alarm: Moments::merge(a.false_alarm, b.false_alarm),
        }
    }
}

fn stream(seed: u64, chunk: u64, kind: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(4 * chunk + kind);
    rng
}

fn sampler(weights: &[f64]) -> WeightedIndex<f64> {
    WeightedIndex::new(weights).expect("validated distribution")
}

fn run_chunk(config: &SimConfig, chunk: u64, trials: u64) -> ChunkStats {
    let p = &config.params;
    let mut nature = stream(config.seed, chunk, 0);
    let mut spy_rng = stream(config.seed, chunk, 1);
    let mut spammer_rng = stream(config.seed, chunk, 2);
    let mut defender_rng = stream(config.seed, chunk, 3);
    let spy = sampler(config.alpha.weights());
    let spammer = sampler(config.model.pmf());
    let defender = sampler(config.beta.weights());

    let mut stats = ChunkStats::default();
    for _ in 0..trials {
        let is_spy = nature.random::<f64>() < p.p;
        let t = defender.sample(&mut defender_rng);
        if is_spy {
            let h = spy.sample(&mut spy_rng);
            let caught = t <= h;
            let cost = if caught { p.c_d } else { 0.0 } - p.c_a * h as f64;
            stats.payoff.push(cost);
            stats.spy_cost.push(cost);
            stats.detected.push(if caught { 1.0 } else { 0.0 });
        } else {
            let z = spammer.sample(&mut spammer_rng);
            let alarm = z >= t;
            stats.payoff.push(if alarm { -p.c_fa } else { 0.0 });
            stats.false_alarm.push(if alarm { 1.0 } else { 0.0 });
        }
    }
    stats
}

fn pairwise(mut parts: Vec<ChunkStats>) -> ChunkStats {
    while parts.len() > 1 {
        parts = parts
            .chunks(2)
            .map(|pair| match pair {
                [a, b] => ChunkStats::merge(*a, *b),
                [a] => *a,
                _ => unreachable!(),
            })
            .collect();
    }
    parts.pop().unwrap_or_default()
}

pub fn simulate(config: &SimConfig) -> Result<SimReport, SimError> {
    config.validate()?;
    let chunks = config.trials.div_ceil(CHUNK_TRIALS);
    let parts: Vec<ChunkStats> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let start = k * CHUNK_TRIALS;
            let len = CHUNK_TRIALS.min(config.trials - start);
            run_chunk(config, k, len)
        })
        .collect();
    let total = pairwise(parts);
    Ok(SimReport {
        trials: config.trials,
        seed: config.seed,
        spy_trials: total.spy_cost.n,
        spammer_trials: total.false_alarm.n,
        defender_payoff_raw: total.payoff.estimate().expect("at least one trial"),
        spy_cost: total.spy_cost.estimate(),
        spy_detection_rate: total.detected.estimate(),
        spammer_false_alarm_rate: total.false_alarm.estimate(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Player;

    fn raw_params(n: usize, p: f64) -> GameParams {
        GameParams {
            n,
            p,
            c_d: 15.0,
            c_a: 1.0,
            c_fa: 23.0,
            epsilon: 1.0,
        }
    }

    fn config(p: f64, alpha: MixedStrategy, beta: MixedStrategy, trials: u64) -> SimConfig {
        SimConfig {
            trials,
            seed: 7,
            params: raw_params(7, p),
            model: SpammerModel::binomial(7, 0.1).unwrap(),
            alpha,
            beta,
        }
    }

    #[test]
    fn degenerate_pure_play() {
        let cfg = config(
            1.0,
            MixedStrategy::point_mass(Player::Attacker, 8, 7),
            MixedStrategy::point_mass(Player::Defender, 9, 8),
            5000,
        );
        let r = simulate(&cfg).unwrap();
        assert_eq!(r.spy_trials, 5000);
        assert_eq!(r.spammer_trials, 0);
        assert_eq!(r.defender_payoff_raw.mean, -7.0);
        assert_eq!(r.defender_payoff_raw.stderr, 0.0);
        assert_eq!(r.spy_cost.unwrap().mean, -7.0);
        assert_eq!(r.spy_detection_rate.unwrap().mean, 0.0);
        assert!(r.spammer_false_alarm_rate.is_none());
    }

    #[test]
    fn spammer_only_false_alarm_rate() {
        let beta = MixedStrategy::new(Player::Defender, vec![0.0, 0.1, 0.2, 0.3, 0.0, 0.0, 0.0, 0.0, 0.4]).unwrap();
        let cfg = config(0.0, MixedStrategy::uniform(Player::Attacker, 8), beta, 200_000);
        let r = simulate(&cfg).unwrap();
        assert_eq!(r.spy_trials, 0);
        let expected = analytic_values(&cfg).spammer_false_alarm_rate;
        assert!(r.spammer_false_alarm_rate.unwrap().deviation(expected) < 3.0);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let cfg = config(
            0.4,
            MixedStrategy::uniform(Player::Attacker, 8),
            MixedStrategy::uniform(Player::Defender, 9),
            150_000,
        );
        assert_eq!(simulate(&cfg).unwrap(), simulate(&cfg).unwrap());
        let mut other = cfg.clone();
        other.seed = 8;
        assert_ne!(simulate(&cfg).unwrap(), simulate(&other).unwrap());
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = config(
            0.5,
            MixedStrategy::uniform(Player::Attacker, 8),
            MixedStrategy::uniform(Player::Defender, 9),
            0,
        );
        assert_eq!(simulate(&cfg), Err(SimError::NoTrials));
        cfg.trials = 10;
        cfg.params.p = 1.5;
        assert!(matches!(simulate(&cfg), Err(SimError::InvalidParam { .. })));
        cfg.params.p = 0.5;
        cfg.beta = MixedStrategy::uniform(Player::Defender, 8);
        assert!(matches!(simulate(&cfg), Err(SimError::DimensionMismatch { .. })));
    }

    #[test]
    fn moments_merge_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.25).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        xs[..333].iter().for_each(|&x| a.push(x));
        xs[333..].iter().for_each(|&x| b.push(x));
        let merged = Moments::merge(a, b);
        assert_eq!(merged.n, all.n);
        assert!((merged.mean - all.mean).abs() < 1e-12);
        assert!((merged.m2 - all.m2).abs() < 1e-8 * all.m2);
    }
}
