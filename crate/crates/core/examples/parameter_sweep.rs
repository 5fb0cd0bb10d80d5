//! Sweeps the spy prior `p` through the command-line front end and prints the
//! index it writes. The same as
//! `spyvspam sweep examples/configs/high_prior.json --vary p=0.1:0.9:9 --out DIR`.
//!
//! `cargo run --example parameter_sweep`

use std::fs;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::temp_dir().join("spyvspam-sweep-example");
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/high_prior.json");
    let args = ["spyvspam", "sweep", config, "--vary", "p=0.1:0.9:9", "--out"];
    let code = spyvspam::cli::run(
        args.iter().map(|s| s.to_string()).chain([out.display().to_string()]),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    if code != 0 {
        return Err(format!("sweep exited with {code}").into());
    }
    print!("{}", fs::read_to_string(out.join("index.csv"))?);
    Ok(())
}
