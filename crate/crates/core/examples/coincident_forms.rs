//! When `c_d` is a multiple of `c_a` the two forms meet and the defender
//! spreads uniformly over the top thresholds.
//!
//! `cargo run --example coincident_forms`

use spyvspam::{solve_ne, GameParams, SpammerModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = SpammerModel::binomial(7, 0.1)?;
    for c_d in 1..=7 {
        let params = GameParams::new(7, 0.8, c_d as f64, 1.0, 10.0)?;
        let eq = solve_ne(&params, &model)?;
        let beta: Vec<String> = eq.beta.weights().iter().map(|b| format!("{b:.3}")).collect();
        println!("c_d = {c_d}: {} s={} beta = [{}]", eq.form, eq.s, beta.join(", "));
    }
    Ok(())
}
