//! Plays the high-prior equilibrium a million times and compares with theory.
//!
//! `cargo run --release --example monte_carlo`

use spyvspam::sim::analytic_values;
use spyvspam::{simulate, solve_ne, GameParams, SimConfig, SpammerModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = GameParams::new(7, 0.8, 10.0, 1.0, 10.0)?;
    let model = SpammerModel::binomial(7, 0.1)?;
    let eq = solve_ne(&params, &model)?;
    let config = SimConfig {
        trials: 1_000_000,
        seed: 1,
        params,
        model,
        alpha: eq.alpha,
        beta: eq.beta,
    };
    let expected = analytic_values(&config);
    let report = simulate(&config)?;
    let rows = [
        (
            "raw defender payoff",
            Some(report.defender_payoff_raw),
            expected.defender_payoff_raw,
        ),
        ("spy cost", report.spy_cost, expected.spy_cost),
        (
            "spy detection rate",
            report.spy_detection_rate,
            expected.spy_detection_rate,
        ),
        (
            "spammer false alarms",
            report.spammer_false_alarm_rate,
            expected.spammer_false_alarm_rate,
        ),
    ];
    println!("{} spy / {} spammer trials", report.spy_trials, report.spammer_trials);
    for (name, est, want) in rows {
        let est = est.expect("both intruder types were drawn");
        println!(
            "{name:<22} {:>10.6} ± {:.6}  analytic {want:>10.6}  ({:.2} SE)",
            est.mean,
            est.stderr,
            est.deviation(want)
        );
    }
    Ok(())
}
