//! Independent ground truth for the structural solver: a simplex solve of the
//! defendability LP, support enumeration for small games, and a
//! best-response equilibrium check.

mod defendability_lp;
mod fallback;
pub mod simplex;
mod support_enum;
mod verify;

use thiserror::Error;

pub use defendability_lp::{pivot_limit, solve_defendability_lp, LpSolution};
pub use fallback::{fallback_equilibrium, fallback_equilibrium_with, FallbackEquilibrium, FallbackSource};
pub use simplex::{LpStatus, SimplexError};
pub use support_enum::{support_enumeration_ne, NashPair, SupportEnumOptions};
pub use verify::{
    argmin_rows, best_response, best_response_with_tol, verify_ne, BestResponse, Side, VerificationReport, ARGMIN_TOL,
    DEFAULT_VERIFY_TOL,
};

use crate::game::GameError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error("defendability LP reported unbounded; the LP is bounded for every valid game")]
    Unbounded,
    #[error("defendability LP reported infeasible")]
    Infeasible,
    #[error("support enumeration refused: N = {n} exceeds the limit {max_n}")]
    TooLarge { n: usize, max_n: usize },
    #[error("fallback found no verified equilibrium: {0}")]
    NoEquilibrium(String),
}
