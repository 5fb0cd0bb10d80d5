//! Polynomial-time equilibrium computation.
//!
//! In equilibrium the defender maximizes defendability, and a maximizer can
//! always be found among two structured families indexed by the first tight
//! row `s` (with `β_m = c_a / c_d`):
//!
//! | form     | `β[..s]` | `β[s]`          | `β[s+1..=N]` | `β[N+1]`        |
//! |----------|----------|-----------------|--------------|-----------------|
//! | Type I   | 0        | 0               | `β_m`        | `1 - (N-s) β_m` |
//! | Type II  | 0        | `1 - (N-s) β_m` | `β_m`        | 0               |
//!
//! When `(N - s) β_m = 1` both rows give the same vector ("coincident").
//! The spy's strategy is then recovered from the defender's indifference
//! across its support, restricted to rows `s..=N`.

use std::cmp::Ordering;

use log::debug;
use serde::Serialize;
use thiserror::Error;

use crate::game::{dot, min_of, GameError, GameMatrices, GameParams, MixedStrategy, Player, SpammerModel};
use crate::linalg::{lu_factorize, DenseMatrix, LinalgError};
use crate::oracle::{verify_ne, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DefenderForm {
    TypeI,
    TypeII,
    Coincident,
}

impl DefenderForm {
    // Tie-break rank: Type II first, Type I last.
    fn rank(self) -> u8 {
        match self {
            DefenderForm::TypeII => 0,
            DefenderForm::Coincident => 1,
            DefenderForm::TypeI => 2,
        }
    }
}

impl std::fmt::Display for DefenderForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DefenderForm::TypeI => "TypeI",
            DefenderForm::TypeII => "TypeII",
            DefenderForm::Coincident => "Coincident",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// `1 - (N-s) β_m >= -feasibility_tol` is feasible; `|.| <= tol` is coincident.
    pub feasibility_tol: f64,
    /// LU pivots below `pivot_tol * ||Λ_r||_inf` count as singular.
    pub pivot_tol: f64,
    /// Negative spy weights down to `-clamp_tol` are clamped to zero.
    pub clamp_tol: f64,
    /// Allowed deviation of the recovered spy weights from unit sum.
    pub sum_tol: f64,
    /// Relative gap under which two candidates count as tied.
    pub tie_tol: f64,
    /// Best-response tolerance for the final equilibrium check.
    pub verify_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            feasibility_tol: 1e-12,
            pivot_tol: 1e-12,
            clamp_tol: 1e-9,
            sum_tol: 1e-9,
            tie_tol: 1e-10,
            verify_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateDefenderStrategy {
    pub form: DefenderForm,
    pub s: usize,
    pub beta: MixedStrategy,
    /// Shifted defendability `min[Λβ] - μ'β`.
    pub defendability: f64,
}

impl CandidateDefenderStrategy {
    /// Support columns used for the spy's indifference system.
    pub fn support_columns(&self, n: usize) -> std::ops::RangeInclusive<usize> {
        match self.form {
            DefenderForm::TypeI => self.s + 1..=n + 1,
            DefenderForm::TypeII => self.s..=n,
            DefenderForm::Coincident => self.s + 1..=n,
        }
    }
}

/// One row of the candidate table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CandidateSummary {
    pub form: DefenderForm,
    pub s: usize,
    pub defendability: f64,
    pub defendability_shifted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttemptFailure {
    pub form: DefenderForm,
    pub s: usize,
    pub reason: String,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("no structural defender candidate is feasible (beta_m = {beta_m})")]
    NoStructuralCandidate { beta_m: f64 },
    #[error("indifference system for {form} s={s} is singular: {source}")]
    Singular {
        form: DefenderForm,
        s: usize,
        source: LinalgError,
    },
    #[error("recovered spy strategy for {form} s={s} is not a distribution: {reason}")]
    InvalidAttacker {
        form: DefenderForm,
        s: usize,
        reason: String,
    },
    #[error("no maximizing candidate yields a verified equilibrium ({} tried)", attempts.len())]
    NoVerifiedEquilibrium { attempts: Vec<AttemptFailure> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumResult {
    pub alpha: MixedStrategy,
    pub beta: MixedStrategy,
    pub form: DefenderForm,
    pub s: usize,
    pub beta_m: f64,
    /// Maximum defendability in unshifted units; the defender's equilibrium payoff.
    pub theta_hat: f64,
    pub theta_hat_shifted: f64,
    /// Spy's equilibrium cost `min[Λ̃β]`.
    pub delta: f64,
    /// True when exactly one candidate attains the maximum.
    pub unique: bool,
    /// All candidates tied at the maximum, in tie-break order.
    pub tied: Vec<CandidateSummary>,
    pub candidates: Vec<CandidateSummary>,
    /// Candidates tried before the accepted one.
    pub rejected: Vec<AttemptFailure>,
    pub verification: VerificationReport,
}

/// Shifted defendability in O(N) using `(Λβ)_i = c_d Σ_{j<=i} β_j - c_a i + shift`.
pub fn structured_defendability(matrices: &GameMatrices, beta: &[f64]) -> f64 {
    let params = matrices.params();
    let shift = params.shift();
    let mut prefix = 0.0;
    let mut min_row = f64::INFINITY;
    for i in 0..=params.n {
        prefix += beta[i];
        min_row = min_row.min(params.c_d * prefix - params.c_a * i as f64 + shift);
    }
    min_row - dot(matrices.mu(), beta)
}

/// All feasible Type I / Type II / coincident defender vectors, each with its
/// defendability. A Type II vector equal to the previous coincident one is
/// dropped.
pub fn enumerate_candidates(
    matrices: &GameMatrices,
    opts: &SolverOptions,
) -> Result<Vec<CandidateDefenderStrategy>, SolveError> {
    let params = matrices.params();
    let n = params.n;
    let beta_m = params.beta_m();
    let mut out = Vec::with_capacity(2 * (n + 1));
    let mut previous_coincident = false;

    for s in 0..=n {
        let rest = 1.0 - (n - s) as f64 * beta_m;
        if rest < -opts.feasibility_tol {
            previous_coincident = false;
            continue;
        }
        let block = |w: &mut Vec<f64>| w[s + 1..=n].iter_mut().for_each(|x| *x = beta_m);
        let mut push = |form: DefenderForm, weights: Vec<f64>| {
            let defendability = structured_defendability(matrices, &weights);
            let beta = MixedStrategy::with_tolerance(Player::Defender, weights, 10.0 * opts.feasibility_tol.max(1e-15))
                .expect("structured candidate is a distribution");
            out.push(CandidateDefenderStrategy {
                form,
                s,
                beta,
                defendability,
            });
        };

        if rest.abs() <= opts.feasibility_tol {
            let mut w = vec![0.0; n + 2];
            block(&mut w);
            push(DefenderForm::Coincident, w);
            previous_coincident = true;
            continue;
        }

        let mut type_one = vec![0.0; n + 2];
        block(&mut type_one);
        type_one[n + 1] = rest;
        push(DefenderForm::TypeI, type_one);

        if !previous_coincident {
            let mut type_two = vec![0.0; n + 2];
            block(&mut type_two);
            type_two[s] = rest;
            push(DefenderForm::TypeII, type_two);
        }
        previous_coincident = false;
    }

    if out.is_empty() {
        return Err(SolveError::NoStructuralCandidate { beta_m });
    }
    Ok(out)
}

fn tie_order(a: &CandidateDefenderStrategy, b: &CandidateDefenderStrategy) -> Ordering {
    a.form.rank().cmp(&b.form.rank()).then(a.s.cmp(&b.s))
}

/// Candidates attaining the maximum defendability (within the tie tolerance),
/// in tie-break order, together with the maximum.
pub fn maximizing_candidates(
    candidates: &[CandidateDefenderStrategy],
    opts: &SolverOptions,
) -> (Vec<CandidateDefenderStrategy>, f64) {
    let best = candidates
        .iter()
        .map(|c| c.defendability)
        .fold(f64::NEG_INFINITY, f64::max);
    let band = opts.tie_tol * best.abs().max(1.0);
    let mut tied: Vec<_> = candidates
        .iter()
        .filter(|c| best - c.defendability <= band)
        .cloned()
        .collect();
    tied.sort_by(tie_order);
    (tied, best)
}

/// Returns the defendability maximizer that wins the tie-break, and the
/// maximum shifted defendability.
pub fn solve_defender(
    matrices: &GameMatrices,
    opts: &SolverOptions,
) -> Result<(CandidateDefenderStrategy, f64), SolveError> {
    let candidates = enumerate_candidates(matrices, opts)?;
    let (tied, best) = maximizing_candidates(&candidates, opts);
    Ok((tied.into_iter().next().expect("nonempty candidate set"), best))
}

/// Solves `α_r' Λ_r = θ̂ 1' + μ_r'` on rows `s..=N` and the defender's support
/// columns, and embeds the result as `α = [0; α_r]`.
///
/// For the coincident form there is one fewer support column than spy rows,
/// and on those columns rows `s` and `N` of `Λ` are identical. The system is
/// solved on rows `s+1..=N` and `α[s]` takes the remaining mass.
///
/// The equations are factored in an equivalent form: each support column
/// except the last is replaced by its difference with the next one, which
/// reads `c_d α_j = μ_j - μ_{j+1}`. The remaining dense equation is scaled
/// below `c_d` so partial pivoting keeps the differenced rows as pivots, and
/// small tail weights come out with full relative precision.
pub fn solve_attacker(
    matrices: &GameMatrices,
    winner: &CandidateDefenderStrategy,
    theta_hat_shifted: f64,
    opts: &SolverOptions,
) -> Result<MixedStrategy, SolveError> {
    let n = matrices.n();
    let s = winner.s;
    let c_d = matrices.params().c_d;
    let lambda = matrices.lambda();
    let mu = matrices.mu();
    let cols: Vec<usize> = winner.support_columns(n).collect();
    let first_row = if winner.form == DefenderForm::Coincident {
        s + 1
    } else {
        s
    };
    let rows: Vec<usize> = (first_row..=n).collect();
    let m = rows.len();
    debug_assert_eq!(cols.len(), m);

    let mut system = DenseMatrix::zeros(m, m);
    let mut rhs = Vec::with_capacity(m);
    for (k, pair) in cols.windows(2).enumerate() {
        let j = pair[0];
        debug_assert_eq!(pair[1], j + 1);
        let r = rows
            .iter()
            .position(|&i| i == j)
            .expect("differenced column lies in the spy rows");
        system.set(k, r, c_d);
        rhs.push(matrices.mu_step(j));
    }
    let last = cols[m - 1];
    let dense: Vec<f64> = rows.iter().map(|&i| lambda.get(i, last)).collect();
    let peak = dense.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let scale = if m > 1 && peak > 0.0 { 0.5 * c_d / peak } else { 1.0 };
    for (r, v) in dense.iter().enumerate() {
        system.set(m - 1, r, scale * v);
    }
    rhs.push(scale * (theta_hat_shifted + mu[last]));

    let lu = lu_factorize(&system, opts.pivot_tol).map_err(|source| SolveError::Singular {
        form: winner.form,
        s,
        source,
    })?;
    let mut reduced = lu.solve(&rhs).map_err(|source| SolveError::Singular {
        form: winner.form,
        s,
        source,
    })?;
    let mut rows = rows;
    if first_row > s {
        rows.insert(0, s);
        reduced.insert(0, 1.0 - reduced.iter().sum::<f64>());
    }

    let invalid = |reason: String| SolveError::InvalidAttacker {
        form: winner.form,
        s,
        reason,
    };
    let mut alpha = vec![0.0; n + 1];
    for (&i, &a) in rows.iter().zip(&reduced) {
        if !a.is_finite() || a < -opts.clamp_tol {
            return Err(invalid(format!("weight on H={i} is {a:e}")));
        }
        alpha[i] = a.max(0.0);
    }
    let total: f64 = alpha.iter().sum();
    if (total - 1.0).abs() > opts.sum_tol {
        return Err(invalid(format!("weights sum to {total}")));
    }
    alpha.iter_mut().for_each(|a| *a /= total);
    MixedStrategy::new(Player::Attacker, alpha).map_err(|e| invalid(e.to_string()))
}

/// Full structural solve: candidates, defendability maximizer, spy recovery
/// and a best-response check. Only verified equilibria are returned.
pub fn solve_ne(params: &GameParams, model: &SpammerModel) -> Result<EquilibriumResult, SolveError> {
    let matrices = GameMatrices::build(params, model)?;
    solve_ne_with(&matrices, &SolverOptions::default())
}

pub fn solve_ne_with(matrices: &GameMatrices, opts: &SolverOptions) -> Result<EquilibriumResult, SolveError> {
    let params = matrices.params();
    let shift = params.shift();
    let candidates = enumerate_candidates(matrices, opts)?;
    let (tied, best) = maximizing_candidates(&candidates, opts);
    debug!(
        "{} candidates, {} at the maximum defendability {best}",
        candidates.len(),
        tied.len()
    );

    let summarize = |c: &CandidateDefenderStrategy| CandidateSummary {
        form: c.form,
        s: c.s,
        defendability: c.defendability - shift,
        defendability_shifted: c.defendability,
    };

    let mut rejected = Vec::new();
    for winner in &tied {
        let failure = |reason: String| AttemptFailure {
            form: winner.form,
            s: winner.s,
            reason,
        };
        let alpha = match solve_attacker(matrices, winner, best, opts) {
            Ok(alpha) => alpha,
            Err(e) => {
                debug!("{} s={} rejected: {e}", winner.form, winner.s);
                rejected.push(failure(e.to_string()));
                continue;
            }
        };
        let verification = verify_ne(matrices, &alpha, &winner.beta, opts.verify_tol)?;
        if !verification.is_ne {
            debug!("{} s={} fails verification: {verification:?}", winner.form, winner.s);
            rejected.push(failure(format!(
                "not an equilibrium: attacker improvement {:e}, defender improvement {:e}",
                verification.max_attacker_improvement, verification.max_defender_improvement
            )));
            continue;
        }
        let theta_hat = winner.defendability - shift;
        let delta = min_of(&matrices.lambda_tilde().mul_vec(winner.beta.weights()));
        return Ok(EquilibriumResult {
            alpha,
            beta: winner.beta.clone(),
            form: winner.form,
            s: winner.s,
            beta_m: params.beta_m(),
            theta_hat,
            theta_hat_shifted: winner.defendability,
            delta,
            unique: tied.len() == 1,
            tied: tied.iter().map(summarize).collect(),
            candidates: candidates.iter().map(summarize).collect(),
            rejected,
            verification,
        });
    }
    Err(SolveError::NoVerifiedEquilibrium { attempts: rejected })
}
