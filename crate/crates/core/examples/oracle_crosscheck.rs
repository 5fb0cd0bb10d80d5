//! Checks the structural solver against the simplex LP and, for small
//! windows, against brute-force support enumeration.
//!
//! `cargo run --example oracle_crosscheck`

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spyvspam::oracle::{solve_defendability_lp, support_enumeration_ne, SupportEnumOptions};
use spyvspam::{solve_ne_with, GameMatrices, GameParams, SolverOptions, SpammerModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_gap = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(1..=12);
        let c_a = rng.random_range(0.5..2.0);
        let params = GameParams::new(
            n,
            rng.random_range(0.1..0.9),
            c_a * rng.random_range(0.5..3.0 * n as f64),
            c_a,
            rng.random_range(1.0..30.0),
        )?;
        let model = SpammerModel::binomial(n, rng.random_range(0.05..0.6))?;
        let m = GameMatrices::build(&params, &model)?;
        let eq = solve_ne_with(&m, &SolverOptions::default())?;
        let lp = solve_defendability_lp(&m)?;
        worst_gap = worst_gap.max((lp.objective_unshifted - eq.theta_hat).abs());

        if n <= 4 {
            let all = support_enumeration_ne(&m, &SupportEnumOptions::default())?;
            let found = all.iter().any(|pair| {
                let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                d(pair.alpha.weights(), eq.alpha.weights()) < 1e-6 && d(pair.beta.weights(), eq.beta.weights()) < 1e-6
            });
            if !found || all.len() != 1 {
                println!("N={n}: {} enumerated equilibria, structural found: {found}", all.len());
            }
        }
    }
    println!("200 instances, largest |LP - structural| defendability gap {worst_gap:.2e}");
    Ok(())
}
