#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spyvspam::oracle::{support_enumeration_ne, SupportEnumOptions};
use spyvspam::{solve_ne_with, DefenderForm, EquilibriumResult, GameMatrices, GameParams, SolverOptions, SpammerModel};

#[derive(Debug, Clone)]
pub struct Instance {
    pub params: GameParams,
    pub model: SpammerModel,
    pub theta0: f64,
}

impl Instance {
    pub fn new(n: usize, theta0: f64, c_d: f64, c_a: f64, c_fa: f64, p: f64) -> Self {
        Instance {
            params: GameParams::new(n, p, c_d, c_a, c_fa).unwrap(),
            model: SpammerModel::binomial(n, theta0).unwrap(),
            theta0,
        }
    }

    pub fn matrices(&self) -> GameMatrices {
        GameMatrices::build(&self.params, &self.model).unwrap()
    }
}

pub fn low_prior() -> Instance {
    Instance::new(7, 0.1, 15.0, 1.0, 23.0, 0.2)
}

pub fn high_prior() -> Instance {
    Instance::new(7, 0.1, 10.0, 1.0, 10.0, 0.8)
}

pub fn uniform_top() -> Instance {
    Instance::new(7, 0.1, 7.0, 1.0, 10.0, 0.8)
}

pub fn wide_window() -> Instance {
    Instance::new(50, 0.4, 142.0, 1.0, 142.0, 0.3)
}

/// Random instances: N in 1..=max_n, p in [0.1, 0.9], θ0 in [0.05, 0.6],
/// c_d / c_a in [0.5, 3N], c_fa in [1, 30].
pub fn random_grid(count: usize, max_n: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=max_n);
            let p = rng.random_range(0.1..=0.9);
            let theta0 = rng.random_range(0.05..=0.6);
            let c_a = rng.random_range(0.5..=2.0);
            let ratio = rng.random_range(0.5..=3.0 * n as f64);
            let c_fa = rng.random_range(1.0..=30.0);
            Instance::new(n, theta0, ratio * c_a, c_a, c_fa, p)
        })
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn argmin_set(values: &[f64], tol: f64) -> Vec<usize> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    (0..values.len()).filter(|&i| values[i] <= min + tol).collect()
}

/// Checks the defender strategy against the closed form for its shape.
pub fn check_form_shape(eq: &EquilibriumResult, n: usize) -> Result<(), String> {
    let beta = eq.beta.weights();
    let bm = eq.beta_m;
    let s = eq.s;
    let rest = 1.0 - (n - s) as f64 * bm;
    let mut expected = vec![0.0; n + 2];
    for slot in expected.iter_mut().take(n + 1).skip(s + 1) {
        *slot = bm;
    }
    match eq.form {
        DefenderForm::TypeI => expected[n + 1] = rest,
        DefenderForm::TypeII => expected[s] = rest,
        DefenderForm::Coincident => {
            if rest.abs() > 1e-12 {
                return Err(format!("coincident form with rest {rest}"));
            }
        }
    }
    let d = max_abs_diff(beta, &expected);
    if d > 1e-12 {
        return Err(format!("{} s={} differs from its closed form by {d:e}", eq.form, eq.s));
    }
    Ok(())
}

/// Shift, scale, shape, leading-zero and indifference checks for one instance.
pub fn check_invariants(inst: &Instance) -> Result<(), String> {
    let m = inst.matrices();
    let eq = solve_ne_with(&m, &SolverOptions::default()).map_err(|e| e.to_string())?;
    let n = inst.params.n;

    let shifted = m.lambda().mul_vec(eq.beta.weights());
    let raw = m.lambda_tilde().mul_vec(eq.beta.weights());
    let tol = 1e-9 * (1.0 + m.shift());
    if argmin_set(&shifted, tol) != argmin_set(&raw, tol) {
        return Err("argmin rows differ between shifted and unshifted matrices".into());
    }
    if ((eq.theta_hat_shifted - eq.theta_hat) - m.shift()).abs() > 1e-9 * (1.0 + m.shift()) {
        return Err("shifted and unshifted defendability differ by more than the shift".into());
    }

    for k in [0.5, 3.0] {
        let p = &inst.params;
        let scaled = GameParams::with_epsilon(n, p.p, k * p.c_d, k * p.c_a, k * p.c_fa, k * p.epsilon).unwrap();
        let ms = GameMatrices::build(&scaled, &inst.model).unwrap();
        let es = solve_ne_with(&ms, &SolverOptions::default()).map_err(|e| format!("scaled by {k}: {e}"))?;
        if (es.form, es.s) != (eq.form, eq.s) {
            return Err(format!(
                "scaling by {k} moved the equilibrium from {} s={} to {} s={}",
                eq.form, eq.s, es.form, es.s
            ));
        }
        let d = max_abs_diff(es.alpha.weights(), eq.alpha.weights())
            .max(max_abs_diff(es.beta.weights(), eq.beta.weights()));
        if d > 1e-9 {
            return Err(format!("scaling by {k} changed the strategies by {d:e}"));
        }
    }

    check_form_shape(&eq, n)?;
    if let Some(i) = (0..eq.s).find(|&i| eq.alpha.weights()[i] != 0.0) {
        return Err(format!("alpha[{i}] = {} below s = {}", eq.alpha.weights()[i], eq.s));
    }
    let v = &eq.verification;
    if !v.is_ne || v.attacker_indifference_residual > 1e-6 || v.defender_indifference_residual > 1e-6 {
        return Err(format!("indifference or best-response check failed: {v:?}"));
    }
    Ok(())
}

/// Compares the structural equilibrium with the support-enumeration set.
/// Returns the closest strategy distance and whether payoffs agree.
pub fn compare_with_support_enumeration(inst: &Instance) -> Result<(f64, bool), String> {
    let m = inst.matrices();
    let eq = solve_ne_with(&m, &SolverOptions::default()).map_err(|e| e.to_string())?;
    let all = support_enumeration_ne(&m, &SupportEnumOptions::default()).map_err(|e| e.to_string())?;
    if all.is_empty() {
        return Err("support enumeration found no equilibrium".into());
    }
    let cost = m.attacker_cost(&eq.alpha, &eq.beta).unwrap();
    let payoff = m.defender_payoff(&eq.alpha, &eq.beta).unwrap();
    let mut best = f64::INFINITY;
    let mut same_payoffs = false;
    for pair in &all {
        let d = max_abs_diff(pair.alpha.weights(), eq.alpha.weights())
            .max(max_abs_diff(pair.beta.weights(), eq.beta.weights()));
        best = best.min(d);
        let c = m.attacker_cost(&pair.alpha, &pair.beta).unwrap();
        let u = m.defender_payoff(&pair.alpha, &pair.beta).unwrap();
        same_payoffs |= (c - cost).abs() <= 1e-8 && (u - payoff).abs() <= 1e-8;
    }
    Ok((best, same_payoffs))
}
