//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on any failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{check_invariants, compare_with_support_enumeration, random_grid, Instance};
use spyvspam::oracle::solve_defendability_lp;
use spyvspam::{simulate, solve_ne, solve_ne_with, verify_ne, DefenderForm, SimConfig, SolverOptions};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let value = f();
    (value, start.elapsed())
}

fn close(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || {
        format!("{what} = {got}, expected {want} ± {tol:e}")
    })
}

fn low_prior() -> Outcome {
    let inst = common::low_prior();
    let (eq, elapsed) = timed(|| solve_ne(&inst.params, &inst.model));
    let eq = eq.map_err(|e| e.to_string())?;
    ensure(eq.form == DefenderForm::TypeI && eq.s == 1, || {
        format!("got {} s={}", eq.form, eq.s)
    })?;
    let beta = eq.beta.weights();
    close(eq.beta_m, 1.0 / 15.0, 1e-12, "beta_m")?;
    close(beta[8], 0.6, 1e-12, "beta[8]")?;
    ensure(beta[0] == 0.0 && beta[1] == 0.0, || {
        format!("beta[0..2] = {:?}", &beta[..2])
    })?;
    let v = verify_ne(&inst.matrices(), &eq.alpha, &eq.beta, 1e-6).map_err(|e| e.to_string())?;
    ensure(v.is_ne, || format!("verify_ne: {v:?}"))?;
    ensure(elapsed < Duration::from_millis(10), || format!("took {elapsed:?}"))?;
    Ok(format!("TypeI s=1, beta[8]={}, {elapsed:?}", beta[8]))
}

fn high_prior() -> Outcome {
    let inst = common::high_prior();
    let eq = solve_ne(&inst.params, &inst.model).map_err(|e| e.to_string())?;
    ensure(eq.form == DefenderForm::TypeII && eq.s == 0, || {
        format!("got {} s={}", eq.form, eq.s)
    })?;
    let beta = eq.beta.weights();
    close(beta[0], 0.3, 1e-12, "beta[0]")?;
    close(eq.beta_m, 0.1, 1e-12, "beta_m")?;
    for (t, b) in beta.iter().enumerate().take(8).skip(1) {
        close(*b, 0.1, 1e-12, &format!("beta[{t}]"))?;
    }
    ensure(beta[8] == 0.0, || format!("beta[8] = {}", beta[8]))?;
    let v = verify_ne(&inst.matrices(), &eq.alpha, &eq.beta, 1e-6).map_err(|e| e.to_string())?;
    ensure(v.is_ne, || format!("verify_ne: {v:?}"))?;
    Ok("TypeII s=0, beta[0]=0.3".into())
}

fn uniform_top() -> Outcome {
    let inst = common::uniform_top();
    let eq = solve_ne(&inst.params, &inst.model).map_err(|e| e.to_string())?;
    let beta = eq.beta.weights();
    for (t, b) in beta.iter().enumerate().take(8).skip(1) {
        close(*b, 1.0 / 7.0, 1e-12, &format!("beta[{t}]"))?;
    }
    ensure(beta[0] == 0.0 && beta[8] == 0.0, || {
        format!("beta[0]={}, beta[8]={}", beta[0], beta[8])
    })?;
    let v = verify_ne(&inst.matrices(), &eq.alpha, &eq.beta, 1e-6).map_err(|e| e.to_string())?;
    ensure(v.is_ne, || format!("verify_ne: {v:?}"))?;
    Ok(format!("{} s={}, uniform 1/7 on 1..7", eq.form, eq.s))
}

fn wide_window() -> Outcome {
    let inst = common::wide_window();
    let (eq, elapsed) = timed(|| solve_ne(&inst.params, &inst.model));
    let eq = eq.map_err(|e| e.to_string())?;
    let alpha = eq.alpha.weights();
    let pmf = inst.model.pmf();
    let support = eq.alpha.support();
    let (first, last) = (support[0], *support.last().unwrap());
    let target = 7.0 / 3.0;
    let mut worst = 0.0f64;
    for t in first + 1..last {
        let rel = (alpha[t] / pmf[t] / target - 1.0).abs();
        worst = worst.max(rel);
        ensure(rel <= 1e-6, || {
            format!("alpha[{t}]/pmf[{t}] = {} (rel err {rel:e})", alpha[t] / pmf[t])
        })?;
    }
    let total: f64 = alpha.iter().sum();
    ensure(alpha.iter().all(|a| *a >= 0.0) && (total - 1.0).abs() <= 1e-9, || {
        format!("sum {total}")
    })?;
    ensure(elapsed < Duration::from_millis(100), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "ratio 7/3 on {} interior indices, worst rel err {worst:.1e}, {elapsed:?}",
        last - first - 1
    ))
}

fn lp_agreement() -> Outcome {
    let grid = random_grid(500, 12, 1);
    let (result, elapsed) = timed(|| -> Result<f64, String> {
        let mut worst = 0.0f64;
        for (k, inst) in grid.iter().enumerate() {
            let m = inst.matrices();
            let eq = solve_ne_with(&m, &SolverOptions::default()).map_err(|e| format!("{k}: {e}"))?;
            let lp = solve_defendability_lp(&m).map_err(|e| format!("{k}: {e}"))?;
            let scale = eq.theta_hat.abs().max(1.0);
            let gap = (lp.objective_unshifted - eq.theta_hat) / scale;
            ensure(gap.abs() <= 1e-8, || format!("instance {k}: LP gap {gap:e}"))?;
            worst = worst.max(gap.abs());
        }
        Ok(worst)
    });
    let worst = result?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("500 instances, worst relative gap {worst:.1e}, {elapsed:?}"))
}

fn support_enumeration() -> Outcome {
    let mut ties = 0;
    for (k, inst) in random_grid(100, 4, 2).iter().enumerate() {
        let (d, same) = compare_with_support_enumeration(inst).map_err(|e| format!("{k}: {e}"))?;
        if d > 1e-6 {
            ensure(same, || format!("instance {k} {:?}: distance {d:e}", inst.params))?;
            ties += 1;
        }
    }
    Ok(format!("100 instances, {ties} matched by payoff only"))
}

fn invariants() -> Outcome {
    for (k, inst) in random_grid(500, 12, 1).iter().enumerate() {
        check_invariants(inst).map_err(|e| format!("instance {k} {:?}: {e}", inst.params))?;
    }
    Ok("shift, scale, shape, leading zeros, indifference on 500 instances".into())
}

fn monte_carlo_one(name: &str, inst: &Instance) -> Result<String, String> {
    let m = inst.matrices();
    let eq = solve_ne_with(&m, &SolverOptions::default()).map_err(|e| e.to_string())?;
    let config = SimConfig {
        trials: 1_000_000,
        seed: 20_240_601,
        params: inst.params,
        model: inst.model.clone(),
        alpha: eq.alpha.clone(),
        beta: eq.beta.clone(),
    };
    let (report, elapsed) = timed(|| simulate(&config));
    let report = report.map_err(|e| e.to_string())?;
    let spy_cost = m.attacker_cost(&eq.alpha, &eq.beta).map_err(|e| e.to_string())?;
    let raw = inst.params.p * m.defender_payoff(&eq.alpha, &eq.beta).map_err(|e| e.to_string())?;
    let dev_cost = report.spy_cost.ok_or("no spy trials")?.deviation(spy_cost);
    let dev_raw = report.defender_payoff_raw.deviation(raw);
    ensure(dev_cost <= 3.0 && dev_raw <= 3.0, || {
        format!("{name}: spy cost {dev_cost:.2} SE, raw payoff {dev_raw:.2} SE")
    })?;
    let again = simulate(&config).map_err(|e| e.to_string())?;
    let (a, b) = (
        serde_json::to_string(&report).unwrap(),
        serde_json::to_string(&again).unwrap(),
    );
    ensure(a == b, || format!("{name}: reports differ for a fixed seed"))?;
    ensure(elapsed < Duration::from_secs(10), || {
        format!("{name}: took {elapsed:?}")
    })?;
    Ok(format!("{name} {dev_cost:.2}/{dev_raw:.2} SE in {elapsed:?}"))
}

fn monte_carlo() -> Outcome {
    let a = monte_carlo_one("low_prior", &common::low_prior())?;
    let b = monte_carlo_one("high_prior", &common::high_prior())?;
    Ok(format!("{a}; {b}; byte-identical reruns"))
}

fn complexity() -> Outcome {
    // The second instance puts the spy on every row, the largest system.
    let mut notes = Vec::new();
    for (c_d, c_fa) in [(142.5, 142.5), (2500.0, 10.0)] {
        let inst = Instance::new(1000, 0.5, c_d, 1.0, c_fa, 0.3);
        let (eq, elapsed) = timed(|| solve_ne(&inst.params, &inst.model));
        let eq = eq.map_err(|e| format!("c_d={c_d}: {e}"))?;
        let v = verify_ne(&inst.matrices(), &eq.alpha, &eq.beta, 1e-6).map_err(|e| e.to_string())?;
        ensure(v.is_ne, || format!("c_d={c_d}: verify_ne: {v:?}"))?;
        ensure(elapsed < Duration::from_secs(1), || {
            format!("c_d={c_d}: took {elapsed:?}")
        })?;
        notes.push(format!(
            "{} s={} ({} spy support) in {elapsed:?}",
            eq.form,
            eq.s,
            eq.alpha.support().len()
        ));
    }
    Ok(format!("N=1000: {}", notes.join("; ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("low-prior Type I equilibrium", low_prior),
        ("high-prior Type II equilibrium", high_prior),
        ("uniform coincident equilibrium", uniform_top),
        ("truncated-spammer ratio", wide_window),
        ("defendability vs simplex LP", lp_agreement),
        ("full NE vs support enumeration", support_enumeration),
        ("invariant suite", invariants),
        ("Monte Carlo agreement", monte_carlo),
        ("N = 1000 complexity", complexity),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  {}. {name}: {detail}", k + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {}. {name}: {reason}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
