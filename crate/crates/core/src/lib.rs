//! Mixed-strategy Nash equilibria of the spy-vs-spammer classification game.
//!
//! A defender watches an intruder for `N` time slots and picks a threshold
//! `T` on the number of file-server hits: at least `T` hits means "spy",
//! fewer means "spammer". The spy picks how many hits `H` to launch; the
//! spammer's hit count follows a known distribution. The game is almost zero
//! sum: the defender's payoff is the spy's cost minus a false-alarm term that
//! depends only on `T`.
//!
//! - [`game`]: parameters, spammer distribution, payoff matrices, payoffs and
//!   defendability.
//! - [`solver`]: the O(N²) structural algorithm (two defender forms indexed by
//!   the first tight row `s`) plus recovery of the spy's strategy.
//! - [`oracle`]: simplex on the defendability LP, support enumeration and a
//!   best-response checker, used as independent ground truth.
//! - [`sim`]: seeded Monte Carlo play of the game.
//! - [`cli`]: the `spyvspam` command line (solve / verify / sweep / simulate).
//!
//! ```
//! use spyvspam::{solve_ne, DefenderForm, GameParams, SpammerModel};
//!
//! let params = GameParams::new(7, 0.2, 15.0, 1.0, 23.0).unwrap();
//! let model = SpammerModel::binomial(7, 0.1).unwrap();
//! let eq = solve_ne(&params, &model).unwrap();
//! assert_eq!(eq.form, DefenderForm::TypeI);
//! assert_eq!(eq.s, 1);
//! assert!(eq.verification.is_ne);
//! ```

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod game;
pub mod linalg;
pub mod oracle;
pub mod sim;
pub mod solver;

pub use game::{GameError, GameMatrices, GameParams, MixedStrategy, Player, SpammerModel, SpammerSource};
pub use oracle::{verify_ne, VerificationReport};
pub use sim::{simulate, SimConfig, SimReport};
pub use solver::{solve_ne, solve_ne_with, DefenderForm, EquilibriumResult, SolveError, SolverOptions};
