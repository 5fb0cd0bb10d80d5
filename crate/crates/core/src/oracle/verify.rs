use serde::{Deserialize, Serialize};

use crate::game::{dot, GameError, GameMatrices, MixedStrategy, Player};

/// Default best-response tolerance, in unshifted payoff units.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-6;

/// Pure strategies within this distance of the best value count as best responses.
pub const ARGMIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub is_ne: bool,
    /// `α'Λ̃β - min_H (Λ̃β)_H`
    pub max_attacker_improvement: f64,
    /// `max_T (α'Λ̃ - μ')_T - (α'Λ̃β - μ'β)`
    pub max_defender_improvement: f64,
    /// Spread of `(Λ̃β)_H` over the spy's support.
    pub attacker_indifference_residual: f64,
    /// Spread of `(α'Λ̃ - μ')_T` over the defender's support.
    pub defender_indifference_residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Attacker,
    Defender,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestResponse {
    pub indices: Vec<usize>,
    pub value: f64,
}

fn check_len(m: &GameMatrices, s: &MixedStrategy, player: Player) -> Result<(), GameError> {
    let expected = player.strategy_count(m.n());
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

/// Spy cost of each pure `H` against `β`: `Λ̃β`.
fn attacker_row_costs(m: &GameMatrices, beta: &MixedStrategy) -> Vec<f64> {
    m.lambda_tilde().mul_vec(beta.weights())
}

/// Defender payoff of each pure `T` against `α`: `α'Λ̃ - μ'`.
fn defender_column_payoffs(m: &GameMatrices, alpha: &MixedStrategy) -> Vec<f64> {
    m.lambda_tilde()
        .vec_mul(alpha.weights())
        .into_iter()
        .zip(m.mu())
        .map(|(c, mu)| c - mu)
        .collect()
}

/// Checks that each strategy is a best response to the other.
pub fn verify_ne(
    m: &GameMatrices,
    alpha: &MixedStrategy,
    beta: &MixedStrategy,
    tol: f64,
) -> Result<VerificationReport, GameError> {
    check_len(m, alpha, Player::Attacker)?;
    check_len(m, beta, Player::Defender)?;

    let rows = attacker_row_costs(m, beta);
    let best_row = rows.iter().copied().fold(f64::INFINITY, f64::min);
    let cost = dot(alpha.weights(), &rows);

    let cols = defender_column_payoffs(m, alpha);
    let best_col = cols.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let payoff = dot(beta.weights(), &cols);

    let spread = |values: &[f64], support: Vec<usize>, best: f64| {
        support
            .into_iter()
            .map(|i| (values[i] - best).abs())
            .fold(0.0, f64::max)
    };

    let max_attacker_improvement = (cost - best_row).max(0.0);
    let max_defender_improvement = (best_col - payoff).max(0.0);
    Ok(VerificationReport {
        is_ne: max_attacker_improvement <= tol && max_defender_improvement <= tol,
        max_attacker_improvement,
        max_defender_improvement,
        attacker_indifference_residual: spread(&rows, alpha.support(), best_row),
        defender_indifference_residual: spread(&cols, beta.support(), best_col),
        tolerance: tol,
    })
}

/// Pure best responses to `opponent` by exhaustive scan: the spy minimizes
/// `Λ̃β`, the defender maximizes `α'Λ̃ - μ'`.
pub fn best_response(m: &GameMatrices, side: Side, opponent: &MixedStrategy) -> Result<BestResponse, GameError> {
    best_response_with_tol(m, side, opponent, ARGMIN_TOL)
}

pub fn best_response_with_tol(
    m: &GameMatrices,
    side: Side,
    opponent: &MixedStrategy,
    tol: f64,
) -> Result<BestResponse, GameError> {
    let (values, value) = match side {
        Side::Attacker => {
            check_len(m, opponent, Player::Defender)?;
            let v = attacker_row_costs(m, opponent);
            let best = v.iter().copied().fold(f64::INFINITY, f64::min);
            (v, best)
        }
        Side::Defender => {
            check_len(m, opponent, Player::Attacker)?;
            let v = defender_column_payoffs(m, opponent);
            let best = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (v, best)
        }
    };
    let indices = values
        .iter()
        .enumerate()
        .filter(|(_, v)| (*v - value).abs() <= tol)
        .map(|(i, _)| i)
        .collect();
    Ok(BestResponse { indices, value })
}

/// Argmin rows of an arbitrary matrix-vector product (used to compare the
/// shifted and unshifted matrices).
pub fn argmin_rows(values: &[f64], tol: f64) -> Vec<usize> {
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| (*v - best).abs() <= tol)
        .map(|(i, _)| i)
        .collect()
}
