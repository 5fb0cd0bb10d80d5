//! Between its extreme points the spy imitates the spammer:
//! `alpha[T] / pmf[T] = (c_fa / c_d) (1 - p) / p`.
//!
//! `cargo run --example truncated_spammer`

use spyvspam::{solve_ne, GameParams, SpammerModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = GameParams::new(50, 0.3, 142.0, 1.0, 142.0)?;
    let model = SpammerModel::binomial(50, 0.4)?;
    let eq = solve_ne(&params, &model)?;
    let predicted = params.c_fa / params.c_d * params.odds_spammer();
    println!("form {} at s = {}; predicted ratio {predicted:.6}", eq.form, eq.s);
    let support = eq.alpha.support();
    for &t in &support {
        let (a, z) = (eq.alpha.weights()[t], model.pmf()[t]);
        let note = if t == support[0] || t == params.n {
            "  (end point)"
        } else {
            ""
        };
        println!("T={t:>2} alpha {a:.3e} pmf {z:.3e} ratio {:.9}{note}", a / z);
    }
    Ok(())
}
