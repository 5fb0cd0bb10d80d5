use serde::Serialize;

use super::simplex::{Constraint, LinearProgram, LpStatus, Relation};
use super::OracleError;
use crate::game::{GameMatrices, MixedStrategy, Player};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub beta: MixedStrategy,
    /// Value of the `z` variable; equals `min[Λβ]` at the optimum.
    pub z: f64,
    /// `-μ'β + z`, shifted units.
    pub objective: f64,
    /// Same optimum in unshifted units.
    pub objective_unshifted: f64,
    pub status: LpStatus,
    pub pivots: usize,
    /// Complementary slackness / duality gap residual of the final tableau.
    pub optimality_residual: f64,
}

/// Pivot cap for an instance with window `n`.
pub fn pivot_limit(n: usize) -> usize {
    10 * (n + 4) * (n + 4)
}

/// Maximizes `-μ'β + z` over `z 1 <= Λβ`, `1'β = 1`, `β >= 0`.
pub fn solve_defendability_lp(m: &GameMatrices) -> Result<LpSolution, OracleError> {
    let n = m.n();
    let cols = n + 2;
    let lambda = m.lambda();

    // variables: β_0..β_{N+1}, z
    let mut objective: Vec<f64> = m.mu().iter().map(|v| -v).collect();
    objective.push(1.0);

    let mut constraints = Vec::with_capacity(n + 2);
    for i in 0..=n {
        let mut row: Vec<f64> = lambda.row(i).iter().map(|v| -v).collect();
        row.push(1.0);
        constraints.push(Constraint {
            coefficients: row,
            relation: Relation::Le,
            rhs: 0.0,
        });
    }
    let mut norm = vec![1.0; cols];
    norm.push(0.0);
    constraints.push(Constraint {
        coefficients: norm,
        relation: Relation::Eq,
        rhs: 1.0,
    });

    let lp = LinearProgram { objective, constraints };
    let outcome = lp.solve(pivot_limit(n))?;
    match outcome.status {
        LpStatus::Optimal => {}
        LpStatus::Unbounded => return Err(OracleError::Unbounded),
        LpStatus::Infeasible => return Err(OracleError::Infeasible),
    }
    let optimality_residual = lp.optimality_residual(&outcome);

    let mut weights: Vec<f64> = outcome.x[..cols].iter().map(|v| v.max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let z = outcome.x[cols];
    let beta = MixedStrategy::new(Player::Defender, weights)?;
    let objective = outcome.objective;
    Ok(LpSolution {
        objective_unshifted: objective - m.shift(),
        objective,
        beta,
        z,
        status: outcome.status,
        pivots: outcome.pivots,
        optimality_residual,
    })
}
