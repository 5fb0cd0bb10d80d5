//! Any spammer distribution works, not only the binomial one. Also shows the
//! best-response checker rejecting a non-equilibrium pair.
//!
//! `cargo run --example custom_spammer`

use spyvspam::{solve_ne, verify_ne, GameMatrices, GameParams, MixedStrategy, Player, SpammerModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = GameParams::with_epsilon(4, 0.5, 6.0, 1.0, 8.0, 0.5)?;
    let model = SpammerModel::from_pmf(vec![0.1, 0.2, 0.4, 0.2, 0.1])?;
    let eq = solve_ne(&params, &model)?;
    println!("{} s={} unique={}", eq.form, eq.s, eq.unique);
    println!("alpha {:.4?}", eq.alpha.weights());
    println!("beta  {:.4?}", eq.beta.weights());

    let m = GameMatrices::build(&params, &model)?;
    let uniform = MixedStrategy::uniform(Player::Defender, params.n + 2);
    let report = verify_ne(&m, &eq.alpha, &uniform, 1e-6)?;
    println!(
        "uniform defender against the equilibrium spy: is_ne={} (defender could gain {:.4})",
        report.is_ne, report.max_defender_improvement
    );
    Ok(())
}
