//! High spy prior: the lowest threshold carries the leftover mass (Type II).
//!
//! `cargo run --example high_prior_type_two`

use spyvspam::{solve_ne, GameParams, SpammerModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = GameParams::new(7, 0.8, 10.0, 1.0, 10.0)?;
    let model = SpammerModel::binomial(7, 0.1)?;
    let eq = solve_ne(&params, &model)?;
    println!("form {} at s = {}", eq.form, eq.s);
    println!("beta  = {:.4?}", eq.beta.weights());
    println!("alpha = {:.4?}", eq.alpha.weights());
    println!("spy cost {:.6}, defender payoff {:.6}", eq.delta, eq.theta_hat);
    for c in &eq.candidates {
        println!(
            "  candidate {:<10} s={} defendability {:.6}",
            c.form.to_string(),
            c.s,
            c.defendability
        );
    }
    Ok(())
}
