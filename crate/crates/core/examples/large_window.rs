//! Solves a 1000-slot window and times it.
//!
//! `cargo run --release --example large_window`

use std::time::Instant;

use spyvspam::{solve_ne, GameParams, SpammerModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = SpammerModel::binomial(1000, 0.5)?;
    for c_d in [142.5, 700.25, 2500.0] {
        let params = GameParams::new(1000, 0.3, c_d, 1.0, 142.5)?;
        let start = Instant::now();
        let eq = solve_ne(&params, &model)?;
        println!(
            "c_d={c_d:>7}: {} s={:>3}, {:>4} candidates, spy support {:>4}, {:?}, verified {}",
            eq.form,
            eq.s,
            eq.candidates.len(),
            eq.alpha.support().len(),
            start.elapsed(),
            eq.verification.is_ne
        );
    }
    Ok(())
}
