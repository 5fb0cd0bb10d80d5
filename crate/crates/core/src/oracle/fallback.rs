//! Equilibrium recovery when the structural solver gives up.

use log::{debug, warn};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{
    solve_defendability_lp, support_enumeration_ne, verify_ne, OracleError, SupportEnumOptions, VerificationReport,
    DEFAULT_VERIFY_TOL,
};
use crate::game::{GameMatrices, MixedStrategy, Player};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FallbackSource {
    LpOracle,
    SupportEnumeration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FallbackEquilibrium {
    pub source: FallbackSource,
    pub alpha: MixedStrategy,
    pub beta: MixedStrategy,
    pub verification: VerificationReport,
}

/// LP-optimal β, with the spy's weights fitted on the tight rows of `Λβ` so
/// that the defender is indifferent over the support of β.
fn lp_equilibrium(m: &GameMatrices, tol: f64) -> Result<FallbackEquilibrium, OracleError> {
    let lp = solve_defendability_lp(m)?;
    let beta = lp.beta;
    let row_values = m.lambda_tilde().mul_vec(beta.weights());
    let rows = super::argmin_rows(&row_values, 1e-9 * (1.0 + m.shift()));
    let cols = beta.support();
    let theta = lp.objective_unshifted;

    let (r, c) = (rows.len(), cols.len());
    let mut a = DMatrix::zeros(c + 1, r);
    let mut b = DVector::zeros(c + 1);
    for (l, &j) in cols.iter().enumerate() {
        for (k, &i) in rows.iter().enumerate() {
            a[(l, k)] = m.lambda_tilde().get(i, j);
        }
        b[l] = theta + m.mu()[j];
    }
    for k in 0..r {
        a[(c, k)] = 1.0;
    }
    b[c] = 1.0;
    let x = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| OracleError::NoEquilibrium(e.to_string()))?;
    let mut alpha = vec![0.0; m.n() + 1];
    for (k, &i) in rows.iter().enumerate() {
        alpha[i] = x[k].max(0.0);
    }
    let total: f64 = alpha.iter().sum();
    alpha.iter_mut().for_each(|v| *v /= total);
    let alpha = MixedStrategy::new(Player::Attacker, alpha)?;
    let verification = verify_ne(m, &alpha, &beta, tol)?;
    if !verification.is_ne {
        return Err(OracleError::NoEquilibrium(format!(
            "LP strategy pair fails verification: {verification:?}"
        )));
    }
    Ok(FallbackEquilibrium {
        source: FallbackSource::LpOracle,
        alpha,
        beta,
        verification,
    })
}

/// Tries the LP route, then support enumeration when the game is small.
pub fn fallback_equilibrium(m: &GameMatrices) -> Result<FallbackEquilibrium, OracleError> {
    fallback_equilibrium_with(m, DEFAULT_VERIFY_TOL, SupportEnumOptions::default().max_n)
}

/// As [`fallback_equilibrium`], with the verification tolerance and the
/// largest `N` handed to support enumeration.
pub fn fallback_equilibrium_with(
    m: &GameMatrices,
    tol: f64,
    enum_max_n: usize,
) -> Result<FallbackEquilibrium, OracleError> {
    let lp_error = match lp_equilibrium(m, tol) {
        Ok(eq) => return Ok(eq),
        Err(e) => {
            debug!("LP fallback failed: {e}");
            e
        }
    };
    let opts = SupportEnumOptions {
        max_n: enum_max_n,
        ..SupportEnumOptions::default()
    };
    if m.n() > opts.max_n {
        warn!("no fallback left for N = {}", m.n());
        return Err(lp_error);
    }
    let pair = support_enumeration_ne(m, &opts)?
        .into_iter()
        .next()
        .ok_or_else(|| OracleError::NoEquilibrium("support enumeration found nothing".into()))?;
    let verification = verify_ne(m, &pair.alpha, &pair.beta, tol)?;
    if !verification.is_ne {
        return Err(OracleError::NoEquilibrium(format!(
            "support enumeration pair fails verification at {tol:e}"
        )));
    }
    Ok(FallbackEquilibrium {
        source: FallbackSource::SupportEnumeration,
        alpha: pair.alpha,
        beta: pair.beta,
        verification,
    })
}
