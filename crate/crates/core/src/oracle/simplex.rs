//! Dense two-phase tableau simplex with Bland's rule.
//!
//! Small problems only: the tableau is stored densely and every pivot touches
//! every entry.

use serde::Serialize;
use thiserror::Error;

const EPS: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize c'x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// One multiplier per constraint (sign convention of the maximization
    /// dual: `>= 0` for `Le`, `<= 0` for `Ge`, free for `Eq`).
    pub duals: Vec<f64>,
    pub pivots: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimplexError {
    #[error("constraint {row} has {got} coefficients, expected {expected}")]
    Shape { row: usize, expected: usize, got: usize },
    #[error("pivot limit {limit} exceeded")]
    IterationLimit { limit: usize },
}

struct Tableau {
    // row 0 is the objective row; column `width - 1` is the rhs
    data: Vec<f64>,
    width: usize,
    height: usize,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.at(row, col);
        for c in 0..w {
            self.data[row * w + c] /= p;
        }
        let pivot_row: Vec<f64> = self.data[row * w..(row + 1) * w].to_vec();
        for r in 0..self.height {
            if r == row {
                continue;
            }
            let factor = self.at(r, col);
            if factor == 0.0 {
                continue;
            }
            for c in 0..w {
                self.data[r * w + c] -= factor * pivot_row[c];
            }
            self.data[r * w + col] = 0.0;
        }
        self.basis[row - 1] = col;
    }

    /// Bland's rule on columns `< allowed`. Returns `Ok(true)` when optimal,
    /// `Ok(false)` when unbounded.
    fn run(&mut self, allowed: usize, limit: usize, pivots: &mut usize) -> Result<bool, SimplexError> {
        loop {
            let entering = (0..allowed).find(|&c| self.at(0, c) < -EPS);
            let Some(col) = entering else {
                return Ok(true);
            };
            let mut leaving: Option<(usize, f64)> = None;
            for r in 1..self.height {
                let a = self.at(r, col);
                if a > EPS {
                    let ratio = self.rhs(r) / a;
                    leaving = match leaving {
                        None => Some((r, ratio)),
                        Some((best_r, best)) => {
                            if ratio < best - EPS || (ratio <= best + EPS && self.basis[r - 1] < self.basis[best_r - 1])
                            {
                                Some((r, ratio))
                            } else {
                                Some((best_r, best))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leaving else {
                return Ok(false);
            };
            if *pivots >= limit {
                return Err(SimplexError::IterationLimit { limit });
            }
            self.pivot(row, col);
            *pivots += 1;
        }
    }
}

impl LinearProgram {
    pub fn solve(&self, pivot_limit: usize) -> Result<LpOutcome, SimplexError> {
        let n = self.objective.len();
        let m = self.constraints.len();
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != n {
                return Err(SimplexError::Shape {
                    row,
                    expected: n,
                    got: c.coefficients.len(),
                });
            }
        }

        // Normalize to nonnegative rhs, remembering the sign flips.
        let mut rows = Vec::with_capacity(m);
        let mut sign = Vec::with_capacity(m);
        for c in &self.constraints {
            if c.rhs < 0.0 {
                let flipped = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                rows.push((c.coefficients.iter().map(|a| -a).collect::<Vec<_>>(), flipped, -c.rhs));
                sign.push(-1.0);
            } else {
                rows.push((c.coefficients.clone(), c.relation, c.rhs));
                sign.push(1.0);
            }
        }

        // Column layout: originals, slack/surplus, artificials, rhs.
        let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let art_start = n + n_slack;
        let width = art_start + n_art + 1;
        let height = m + 1;
        let mut t = Tableau {
            data: vec![0.0; width * height],
            width,
            height,
            basis: vec![0; m],
        };
        let mut initial_basis = vec![0; m];
        let (mut slack, mut art) = (n, art_start);
        for (r, (coef, rel, rhs)) in rows.iter().enumerate() {
            let base = (r + 1) * width;
            t.data[base..base + n].copy_from_slice(coef);
            t.data[base + width - 1] = *rhs;
            match rel {
                Relation::Le => {
                    t.data[base + slack] = 1.0;
                    initial_basis[r] = slack;
                    slack += 1;
                }
                Relation::Ge => {
                    t.data[base + slack] = -1.0;
                    slack += 1;
                    t.data[base + art] = 1.0;
                    initial_basis[r] = art;
                    art += 1;
                }
                Relation::Eq => {
                    t.data[base + art] = 1.0;
                    initial_basis[r] = art;
                    art += 1;
                }
            }
        }
        t.basis.copy_from_slice(&initial_basis);
        let mut pivots = 0;

        // Phase 1: maximize -Σ artificials.
        if n_art > 0 {
            for c in art_start..width - 1 {
                t.data[c] = 1.0;
            }
            for r in 0..m {
                if t.basis[r] >= art_start {
                    for c in 0..width {
                        t.data[c] -= t.data[(r + 1) * width + c];
                    }
                }
            }
            t.run(art_start, pivot_limit, &mut pivots)?;
            if t.rhs(0) < -1e-9 * (1.0 + rows.iter().map(|r| r.2).sum::<f64>()) {
                return Ok(LpOutcome {
                    status: LpStatus::Infeasible,
                    x: vec![0.0; n],
                    objective: f64::NAN,
                    duals: vec![0.0; m],
                    pivots,
                });
            }
            // Drive zero-level artificials out of the basis where possible.
            for r in 0..m {
                if t.basis[r] >= art_start {
                    if let Some(col) = (0..art_start).find(|&c| t.at(r + 1, c).abs() > EPS) {
                        t.pivot(r + 1, col);
                    }
                }
            }
        }

        // Phase 2 objective row: -c + c_B B^{-1} A.
        let cost = |c: usize| if c < n { self.objective[c] } else { 0.0 };
        for c in 0..width {
            t.data[c] = if c < width - 1 { -cost(c) } else { 0.0 };
        }
        for r in 0..m {
            let cb = cost(t.basis[r]);
            if cb != 0.0 {
                for c in 0..width {
                    t.data[c] += cb * t.data[(r + 1) * width + c];
                }
            }
        }
        let optimal = t.run(art_start, pivot_limit, &mut pivots)?;

        let mut x = vec![0.0; n];
        for r in 0..m {
            if t.basis[r] < n {
                x[t.basis[r]] = t.rhs(r + 1);
            }
        }
        if !optimal {
            return Ok(LpOutcome {
                status: LpStatus::Unbounded,
                x,
                objective: f64::INFINITY,
                duals: vec![0.0; m],
                pivots,
            });
        }
        // y_r = (c_B B^{-1})_r, read under the initial basis column of row r.
        // Ge rows start from an artificial whose column is +e_r, same as a slack.
        let duals = (0..m).map(|r| sign[r] * t.at(0, initial_basis[r])).collect();
        Ok(LpOutcome {
            status: LpStatus::Optimal,
            objective: self.objective.iter().zip(&x).map(|(c, v)| c * v).sum(),
            x,
            duals,
            pivots,
        })
    }

    /// Largest violation of complementary slackness, dual feasibility or
    /// zero duality gap at `outcome`.
    pub fn optimality_residual(&self, outcome: &LpOutcome) -> f64 {
        let n = self.objective.len();
        let x = &outcome.x;
        let y = &outcome.duals;
        let mut worst: f64 = 0.0;
        let mut reduced = self.objective.iter().map(|c| -c).collect::<Vec<_>>();
        let mut dual_obj = 0.0;
        for (c, yi) in self.constraints.iter().zip(y) {
            let ax: f64 = c.coefficients.iter().zip(x).map(|(a, v)| a * v).sum();
            worst = worst.max((yi * (c.rhs - ax)).abs());
            let sign_violation = match c.relation {
                Relation::Le => (-yi).max(0.0),
                Relation::Ge => yi.max(0.0),
                Relation::Eq => 0.0,
            };
            worst = worst.max(sign_violation);
            for j in 0..n {
                reduced[j] += c.coefficients[j] * yi;
            }
            dual_obj += c.rhs * yi;
        }
        for j in 0..n {
            worst = worst.max((-reduced[j]).max(0.0));
            worst = worst.max((x[j] * reduced[j]).abs());
        }
        worst.max((dual_obj - outcome.objective).abs())
    }
}
