//! Brute-force support enumeration for the bimatrix game with spy cost `Λ̃`
//! and defender payoff `Λ̃ - 1μ'`.
//!
//! Every pair of nonempty supports is tried. The indifference systems are
//! solved in the least-squares sense (SVD), so unequal support sizes are
//! handled too; a solution is kept only if it is exact, is a distribution,
//! and passes the best-response check.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::verify::verify_ne;
use super::OracleError;
use crate::game::{GameMatrices, MixedStrategy, Player};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportEnumOptions {
    /// Largest window accepted; the work grows like `4^N`.
    pub max_n: usize,
    /// Only try contiguous defender supports. Off by default so the oracle
    /// does not rely on the structure it is meant to check.
    pub contiguous_defender_only: bool,
    pub residual_tol: f64,
    pub dedup_tol: f64,
    pub verify_tol: f64,
}

impl Default for SupportEnumOptions {
    fn default() -> Self {
        SupportEnumOptions {
            max_n: 6,
            contiguous_defender_only: false,
            residual_tol: 1e-9,
            dedup_tol: 1e-7,
            verify_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashPair {
    pub alpha: MixedStrategy,
    pub beta: MixedStrategy,
    pub attacker_support: Vec<usize>,
    pub defender_support: Vec<usize>,
}

fn indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask >> b & 1 == 1).collect()
}

fn is_contiguous(mask: u64) -> bool {
    let shifted = mask >> mask.trailing_zeros();
    shifted & (shifted + 1) == 0
}

/// Least-squares solve; `None` unless the residual is within `tol`.
fn exact_lstsq(a: DMatrix<f64>, b: DVector<f64>, tol: f64) -> Option<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-12).ok()?;
    let residual = (&a * &x - &b).amax();
    (residual <= tol).then_some(x)
}

/// Distribution on `support` from the first `support.len()` entries of `x`.
fn embed(x: &DVector<f64>, support: &[usize], len: usize, tol: f64) -> Option<Vec<f64>> {
    let mut w = vec![0.0; len];
    for (k, &i) in support.iter().enumerate() {
        let v = x[k];
        if v < -tol {
            return None;
        }
        w[i] = v.max(0.0);
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return None;
    }
    w.iter_mut().for_each(|v| *v /= total);
    Some(w)
}

fn try_pair(m: &GameMatrices, rows: &[usize], cols: &[usize], opts: &SupportEnumOptions) -> Option<NashPair> {
    let n = m.n();
    let lt = m.lambda_tilde();
    let mu = m.mu();

    // β on `cols`, value w: Σ_j Λ̃(i,j) β_j - w = 0 for i in rows, Σ β = 1
    let (r, c) = (rows.len(), cols.len());
    let mut a = DMatrix::zeros(r + 1, c + 1);
    let mut b = DVector::zeros(r + 1);
    for (k, &i) in rows.iter().enumerate() {
        for (l, &j) in cols.iter().enumerate() {
            a[(k, l)] = lt.get(i, j);
        }
        a[(k, c)] = -1.0;
    }
    for l in 0..c {
        a[(r, l)] = 1.0;
    }
    b[r] = 1.0;
    let beta_x = exact_lstsq(a, b, opts.residual_tol)?;
    let beta = embed(&beta_x, cols, n + 2, opts.residual_tol)?;

    // α on `rows`, value v: Σ_i α_i Λ̃(i,j) - v = μ_j for j in cols, Σ α = 1
    let mut a = DMatrix::zeros(c + 1, r + 1);
    let mut b = DVector::zeros(c + 1);
    for (l, &j) in cols.iter().enumerate() {
        for (k, &i) in rows.iter().enumerate() {
            a[(l, k)] = lt.get(i, j);
        }
        a[(l, r)] = -1.0;
        b[l] = mu[j];
    }
    for k in 0..r {
        a[(c, k)] = 1.0;
    }
    b[c] = 1.0;
    let alpha_x = exact_lstsq(a, b, opts.residual_tol)?;
    let alpha = embed(&alpha_x, rows, n + 1, opts.residual_tol)?;

    let alpha = MixedStrategy::new(Player::Attacker, alpha).ok()?;
    let beta = MixedStrategy::new(Player::Defender, beta).ok()?;
    let report = verify_ne(m, &alpha, &beta, opts.verify_tol).ok()?;
    report.is_ne.then(|| NashPair {
        attacker_support: alpha.support(),
        defender_support: beta.support(),
        alpha,
        beta,
    })
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// All equilibria found by support enumeration, in lexicographic order of
/// (attacker support mask, defender support mask), deduplicated.
pub fn support_enumeration_ne(m: &GameMatrices, opts: &SupportEnumOptions) -> Result<Vec<NashPair>, OracleError> {
    let n = m.n();
    if n > opts.max_n {
        return Err(OracleError::TooLarge { n, max_n: opts.max_n });
    }
    let row_masks = 1u64..(1u64 << (n + 1));
    let col_masks: Vec<u64> = (1u64..(1u64 << (n + 2)))
        .filter(|&mask| !opts.contiguous_defender_only || is_contiguous(mask))
        .collect();

    let found: Vec<NashPair> = row_masks
        .into_par_iter()
        .flat_map_iter(|rmask| {
            let rows = indices(rmask);
            col_masks
                .iter()
                .filter_map(|&cmask| try_pair(m, &rows, &indices(cmask), opts))
                .collect::<Vec<_>>()
        })
        .collect();

    let mut unique: Vec<NashPair> = Vec::new();
    for pair in found {
        let duplicate = unique.iter().any(|u| {
            distance(u.alpha.weights(), pair.alpha.weights()) <= opts.dedup_tol
                && distance(u.beta.weights(), pair.beta.weights()) <= opts.dedup_tol
        });
        if !duplicate {
            unique.push(pair);
        }
    }
    Ok(unique)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contiguity() {
        assert!(is_contiguous(0b0111));
        assert!(is_contiguous(0b0110));
        assert!(is_contiguous(0b1000));
        assert!(!is_contiguous(0b0101));
    }

    #[test]
    fn mask_indices() {
        assert_eq!(indices(0b1011), vec![0, 1, 3]);
    }
}
