//! Low spy prior: the defender often declines to flag anyone (Type I form).
//!
//! `cargo run --example low_prior_type_one`

use spyvspam::{solve_ne, GameParams, SpammerModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = GameParams::new(7, 0.2, 15.0, 1.0, 23.0)?;
    let model = SpammerModel::binomial(7, 0.1)?;
    let eq = solve_ne(&params, &model)?;

    println!("form {} at s = {}, beta_m = {:.6}", eq.form, eq.s, eq.beta_m);
    println!(
        "defendability {:.6} (shifted {:.6})",
        eq.theta_hat, eq.theta_hat_shifted
    );
    println!("{:>3} {:>10} {:>10}", "T", "beta", "alpha");
    for t in 0..=params.n + 1 {
        let alpha = eq.alpha.weights().get(t).map_or(String::new(), |a| format!("{a:.6}"));
        println!("{t:>3} {:>10.6} {alpha:>10}", eq.beta.weights()[t]);
    }
    println!("equilibrium check passed: {}", eq.verification.is_ne);
    Ok(())
}
