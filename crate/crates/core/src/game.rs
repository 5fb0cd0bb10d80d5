//! The classification game: parameters, the spammer's hit distribution,
//! payoff matrices and payoff/defendability evaluation.
//!
//! Rows index the spy's hit count `H ∈ {0..N}`; columns index the defender's
//! threshold `T ∈ {0..N+1}`. The spy is caught when `T <= H`.
//!
//! Every payoff reported by this module is in unshifted units. The strictly
//! positive matrix `lambda = lambda_tilde + (N c_a + ε)` is kept for the
//! solver, which works in shifted units internally.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::DenseMatrix;

/// Default tolerance on the unit sum of a mixed strategy.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;
/// Default tolerance on the unit sum of a spammer pmf.
pub const PMF_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },
    #[error("spammer pmf: {0}")]
    InvalidPmf(String),
    #[error("dimension mismatch: {what} expected length {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("threshold {t} out of range 0..={max}")]
    ThresholdOutOfRange { t: usize, max: usize },
    #[error("invalid {player} strategy: {reason}")]
    InvalidStrategy { player: Player, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> GameError {
    GameError::InvalidParam {
        field,
        reason: reason.into(),
    }
}

/// Scalar game constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    /// Window length in time slots.
    pub n: usize,
    /// Prior probability that the intruder is a spy.
    pub p: f64,
    /// Detection cost (to the spy) / benefit (to the defender).
    pub c_d: f64,
    /// Per file-server hit benefit to the spy.
    pub c_a: f64,
    /// False-alarm penalty.
    pub c_fa: f64,
    /// Positivity shift added on top of `N c_a`.
    pub epsilon: f64,
}

impl GameParams {
    /// Builds and validates parameters with `epsilon = c_a`.
    pub fn new(n: usize, p: f64, c_d: f64, c_a: f64, c_fa: f64) -> Result<Self, GameError> {
        Self::with_epsilon(n, p, c_d, c_a, c_fa, c_a)
    }

    pub fn with_epsilon(n: usize, p: f64, c_d: f64, c_a: f64, c_fa: f64, epsilon: f64) -> Result<Self, GameError> {
        let params = GameParams {
            n,
            p,
            c_d,
            c_a,
            c_fa,
            epsilon,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), GameError> {
        if self.n < 1 {
            return Err(invalid("n", "window length must be at least 1"));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(invalid("p", format!("must lie in (0, 1), got {}", self.p)));
        }
        for (field, value) in [
            ("c_d", self.c_d),
            ("c_a", self.c_a),
            ("c_fa", self.c_fa),
            ("epsilon", self.epsilon),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(field, format!("must be positive and finite, got {value}")));
            }
        }
        Ok(())
    }

    /// Common weight `c_a / c_d` on the middle thresholds of an equilibrium.
    pub fn beta_m(&self) -> f64 {
        self.c_a / self.c_d
    }

    /// Constant added to every entry of `lambda_tilde`.
    pub fn shift(&self) -> f64 {
        self.n as f64 * self.c_a + self.epsilon
    }

    /// Ratio `(1 - p) / p` that converts the spammer tail into false-alarm cost.
    pub fn odds_spammer(&self) -> f64 {
        (1.0 - self.p) / self.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpammerSource {
    Binomial { theta0: f64 },
    Custom,
}

/// Distribution of the spammer's file-server hit count `Z` over `{0..N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpammerModel {
    pmf: Vec<f64>,
    tail: Vec<f64>,
    source: SpammerSource,
}

impl SpammerModel {
    /// Binomial(N, θ0) hits, computed in log space.
    pub fn binomial(n: usize, theta0: f64) -> Result<Self, GameError> {
        if n < 1 {
            return Err(invalid("n", "window length must be at least 1"));
        }
        if !(theta0 > 0.0 && theta0 < 1.0) {
            return Err(invalid(
                "theta0",
                format!("must lie strictly inside (0, 1), got {theta0}"),
            ));
        }
        let ln_p = theta0.ln();
        let ln_q = (-theta0).ln_1p();
        let mut ln_choose = 0.0_f64;
        let mut pmf = Vec::with_capacity(n + 1);
        for k in 0..=n {
            if k > 0 {
                ln_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
            }
            pmf.push((ln_choose + k as f64 * ln_p + (n - k) as f64 * ln_q).exp());
        }
        Self::build(pmf, SpammerSource::Binomial { theta0 }, PMF_TOLERANCE)
    }

    /// User-supplied pmf over `{0..N}`; `N = pmf.len() - 1`.
    pub fn from_pmf(pmf: Vec<f64>) -> Result<Self, GameError> {
        Self::from_pmf_with_tolerance(pmf, PMF_TOLERANCE)
    }

    pub fn from_pmf_with_tolerance(pmf: Vec<f64>, tolerance: f64) -> Result<Self, GameError> {
        Self::build(pmf, SpammerSource::Custom, tolerance)
    }

    fn build(pmf: Vec<f64>, source: SpammerSource, tolerance: f64) -> Result<Self, GameError> {
        if pmf.len() < 2 {
            return Err(GameError::InvalidPmf(format!(
                "need at least 2 entries (N >= 1), got {}",
                pmf.len()
            )));
        }
        if let Some((k, v)) = pmf.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(GameError::InvalidPmf(format!(
                "entry {k} is {v}; every hit count needs positive mass so the tail is strictly decreasing"
            )));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > tolerance {
            return Err(GameError::InvalidPmf(format!(
                "entries sum to {total}, not 1 (tolerance {tolerance:e})"
            )));
        }
        let tail = tail_from_pmf(&pmf);
        Ok(SpammerModel { pmf, tail, source })
    }

    pub fn n(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn source(&self) -> SpammerSource {
        self.source
    }

    /// `φ(T) = Pr{Z >= T}` for `T ∈ {0..N+1}`.
    pub fn tail_phi(&self, t: usize) -> Result<f64, GameError> {
        self.tail
            .get(t)
            .copied()
            .ok_or(GameError::ThresholdOutOfRange { t, max: self.n() + 1 })
    }

    /// All `N + 2` tail values.
    pub fn tail(&self) -> &[f64] {
        &self.tail
    }
}

// Upper tails are summed from the top and lower tails from the bottom, so
// both ends keep their relative accuracy.
fn tail_from_pmf(pmf: &[f64]) -> Vec<f64> {
    let n = pmf.len() - 1;
    let mut upper = vec![0.0; n + 2];
    for k in (0..=n).rev() {
        upper[k] = upper[k + 1] + pmf[k];
    }
    let mut tail = vec![0.0; n + 2];
    let mut cdf = 0.0;
    for t in 0..=n + 1 {
        tail[t] = if upper[t] <= 0.5 { upper[t] } else { 1.0 - cdf };
        if t <= n {
            cdf += pmf[t];
        }
    }
    tail
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Attacker,
    Defender,
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Player::Attacker => "attacker",
            Player::Defender => "defender",
        })
    }
}

impl Player {
    /// Number of pure strategies for a window of length `n`.
    pub fn strategy_count(self, n: usize) -> usize {
        match self {
            Player::Attacker => n + 1,
            Player::Defender => n + 2,
        }
    }
}

/// A probability vector over one player's pure strategies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedStrategy {
    player: Player,
    weights: Vec<f64>,
}

impl MixedStrategy {
    pub fn new(player: Player, weights: Vec<f64>) -> Result<Self, GameError> {
        Self::with_tolerance(player, weights, PROBABILITY_TOLERANCE)
    }

    pub fn with_tolerance(player: Player, weights: Vec<f64>, tolerance: f64) -> Result<Self, GameError> {
        let bad = |reason: String| GameError::InvalidStrategy { player, reason };
        if weights.is_empty() {
            return Err(bad("empty weight vector".into()));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
            return Err(bad(format!("weight {i} is {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tolerance {
            return Err(bad(format!("weights sum to {total}")));
        }
        Ok(MixedStrategy { player, weights })
    }

    pub fn point_mass(player: Player, len: usize, index: usize) -> Self {
        assert!(index < len, "point mass index {index} out of range {len}");
        let mut weights = vec![0.0; len];
        weights[index] = 1.0;
        MixedStrategy { player, weights }
    }

    pub fn uniform(player: Player, len: usize) -> Self {
        assert!(len > 0);
        MixedStrategy {
            player,
            weights: vec![1.0 / len as f64; len],
        }
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Indices with strictly positive weight.
    pub fn support(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }
}

/// `lambda_tilde`, its shifted copy `lambda`, and the false-alarm vector `mu`.
#[derive(Debug, Clone)]
pub struct GameMatrices {
    params: GameParams,
    lambda_tilde: DenseMatrix,
    lambda: DenseMatrix,
    mu: Vec<f64>,
    tail: Vec<f64>,
    pmf: Vec<f64>,
}

impl GameMatrices {
    pub fn build(params: &GameParams, model: &SpammerModel) -> Result<Self, GameError> {
        params.validate()?;
        if model.n() != params.n {
            return Err(GameError::DimensionMismatch {
                what: "spammer pmf",
                expected: params.n + 1,
                got: model.pmf().len(),
            });
        }
        let n = params.n;
        let (c_d, c_a) = (params.c_d, params.c_a);
        let lambda_tilde = DenseMatrix::from_fn(n + 1, n + 2, |i, j| {
            let caught = if j <= i { c_d } else { 0.0 };
            caught - c_a * i as f64
        });
        let shift = params.shift();
        let lambda = DenseMatrix::from_fn(n + 1, n + 2, |i, j| lambda_tilde.get(i, j) + shift);
        let scale = params.odds_spammer() * params.c_fa;
        let mu = model.tail().iter().map(|phi| scale * phi).collect();
        Ok(GameMatrices {
            params: *params,
            lambda_tilde,
            lambda,
            mu,
            tail: model.tail().to_vec(),
            pmf: model.pmf().to_vec(),
        })
    }

    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn lambda_tilde(&self) -> &DenseMatrix {
        &self.lambda_tilde
    }

    pub fn lambda(&self) -> &DenseMatrix {
        &self.lambda
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// `μ[j] - μ[j+1]` for `j <= N`, taken from the pmf rather than by
    /// subtracting tails, so it keeps full relative precision.
    pub fn mu_step(&self, j: usize) -> f64 {
        self.params.odds_spammer() * self.params.c_fa * self.pmf[j]
    }

    /// Spammer tail `φ(T)`, `T ∈ {0..N+1}`.
    pub fn tail(&self) -> &[f64] {
        &self.tail
    }

    pub fn shift(&self) -> f64 {
        self.params.shift()
    }

    fn check(&self, s: &MixedStrategy, player: Player) -> Result<(), GameError> {
        let expected = player.strategy_count(self.n());
        if s.len() != expected {
            return Err(GameError::DimensionMismatch {
                what: match player {
                    Player::Attacker => "attacker strategy",
                    Player::Defender => "defender strategy",
                },
                expected,
                got: s.len(),
            });
        }
        Ok(())
    }

    /// Spy's expected cost `α' Λ̃ β`.
    pub fn attacker_cost(&self, alpha: &MixedStrategy, beta: &MixedStrategy) -> Result<f64, GameError> {
        self.check(alpha, Player::Attacker)?;
        self.check(beta, Player::Defender)?;
        Ok(dot(alpha.weights(), &self.lambda_tilde.mul_vec(beta.weights())))
    }

    /// Scaled defender payoff `α' Λ̃ β - μ' β`.
    pub fn defender_payoff(&self, alpha: &MixedStrategy, beta: &MixedStrategy) -> Result<f64, GameError> {
        let cost = self.attacker_cost(alpha, beta)?;
        Ok(cost - dot(&self.mu, beta.weights()))
    }

    /// Unscaled defender payoff `p (α' Λ̃ β - μ' β)`; this is what one play
    /// of the game pays on average.
    pub fn defender_payoff_raw(&self, alpha: &MixedStrategy, beta: &MixedStrategy) -> Result<f64, GameError> {
        Ok(self.params.p * self.defender_payoff(alpha, beta)?)
    }

    /// Shifted defendability `min[Λβ] - μ'β`.
    pub fn defendability(&self, beta: &MixedStrategy) -> Result<f64, GameError> {
        self.check(beta, Player::Defender)?;
        Ok(min_of(&self.lambda.mul_vec(beta.weights())) - dot(&self.mu, beta.weights()))
    }

    /// Unshifted defendability `min[Λ̃β] - μ'β`.
    pub fn defendability_unshifted(&self, beta: &MixedStrategy) -> Result<f64, GameError> {
        self.check(beta, Player::Defender)?;
        Ok(min_of(&self.lambda_tilde.mul_vec(beta.weights())) - dot(&self.mu, beta.weights()))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}
