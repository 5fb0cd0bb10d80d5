use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use super::config::InstanceConfig;
use super::{
    CliError, SimulateArgs, SolveArgs, SweepArgs, VerifyArgs, EXIT_INVALID, EXIT_NOT_EQUILIBRIUM, EXIT_OK,
    EXIT_SOLVER_FAILED, EXIT_STAT_MISMATCH,
};
use crate::game::{GameParams, MixedStrategy, Player};
use crate::oracle::{
    fallback_equilibrium_with, verify_ne, FallbackSource, SupportEnumOptions, VerificationReport, DEFAULT_VERIFY_TOL,
};
use crate::sim::{analytic_values, simulate, Estimate, SimConfig, SimReport};
use crate::solver::{solve_ne_with, AttemptFailure, CandidateSummary, DefenderForm};

const DEFAULT_TRIALS: u64 = 1_000_000;
const DEFAULT_SEED: u64 = 0;
const PASS_SE: f64 = 3.0;
const MISMATCH_SE: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveSource {
    Structural,
    LpOracle,
    SupportEnumeration,
}

/// Output of `solve`. `form`, `s` and `unique` are absent when the fallback
/// oracle produced the equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveDocument {
    pub params: GameParams,
    pub spammer_pmf: Vec<f64>,
    pub source: SolveSource,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub form: Option<DefenderForm>,
    pub s: Option<usize>,
    pub beta_m: f64,
    pub theta_hat: f64,
    pub theta_hat_shifted: f64,
    pub delta: f64,
    pub unique: Option<bool>,
    pub tied: Vec<CandidateSummary>,
    pub candidates: Vec<CandidateSummary>,
    pub rejected: Vec<AttemptFailure>,
    pub solver_error: Option<String>,
    pub verification: VerificationReport,
}

impl SolveDocument {
    fn strategies(&self) -> (MixedStrategy, MixedStrategy) {
        (
            MixedStrategy::with_tolerance(Player::Attacker, self.alpha.clone(), 1e-6).expect("solver output"),
            MixedStrategy::with_tolerance(Player::Defender, self.beta.clone(), 1e-6).expect("solver output"),
        )
    }
}

/// Structural solve, falling back to the oracles. The outer error is an
/// invalid config; the inner one means every route failed.
pub(crate) fn solve_document(config: &InstanceConfig) -> Result<Result<SolveDocument, String>, CliError> {
    let matrices = config.matrices()?;
    let params = *matrices.params();
    let pmf = config.model()?.pmf().to_vec();
    let solver_error = match solve_ne_with(&matrices, &config.solver.options()) {
        Ok(eq) => {
            return Ok(Ok(SolveDocument {
                params,
                spammer_pmf: pmf,
                source: SolveSource::Structural,
                alpha: eq.alpha.into_weights(),
                beta: eq.beta.into_weights(),
                form: Some(eq.form),
                s: Some(eq.s),
                beta_m: eq.beta_m,
                theta_hat: eq.theta_hat,
                theta_hat_shifted: eq.theta_hat_shifted,
                delta: eq.delta,
                unique: Some(eq.unique),
                tied: eq.tied,
                candidates: eq.candidates,
                rejected: eq.rejected,
                solver_error: None,
                verification: eq.verification,
            }))
        }
        Err(e) => e,
    };
    warn!("structural solver failed ({solver_error}); trying the oracle fallback");
    let defaults = SupportEnumOptions::default();
    let fb = match fallback_equilibrium_with(
        &matrices,
        config.oracle.verify_tol.unwrap_or(DEFAULT_VERIFY_TOL),
        config.oracle.support_enum_max_n.unwrap_or(defaults.max_n),
    ) {
        Ok(fb) => fb,
        Err(e) => return Ok(Err(format!("{solver_error}; fallback: {e}"))),
    };
    let theta_hat = matrices.defendability_unshifted(&fb.beta)?;
    let delta = crate::game::min_of(&matrices.lambda_tilde().mul_vec(fb.beta.weights()));
    Ok(Ok(SolveDocument {
        params,
        spammer_pmf: pmf,
        source: match fb.source {
            FallbackSource::LpOracle => SolveSource::LpOracle,
            FallbackSource::SupportEnumeration => SolveSource::SupportEnumeration,
        },
        alpha: fb.alpha.into_weights(),
        beta: fb.beta.into_weights(),
        form: None,
        s: None,
        beta_m: params.beta_m(),
        theta_hat,
        theta_hat_shifted: theta_hat + params.shift(),
        delta,
        unique: None,
        tied: Vec::new(),
        candidates: Vec::new(),
        rejected: Vec::new(),
        solver_error: Some(solver_error.to_string()),
        verification: fb.verification,
    }))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable document");
    text.push('\n');
    text
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(path) => write_text(path, text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn cell(values: &[f64], i: usize) -> String {
    values.get(i).map(|v| v.to_string()).unwrap_or_default()
}

fn write_strategy_csv(path: &Path, doc: &SolveDocument) -> Result<(), CliError> {
    let csv_err = |e: csv::Error| CliError::Usage(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["index", "alpha", "beta", "spammer_pmf"])
        .map_err(csv_err)?;
    for i in 0..doc.beta.len() {
        w.write_record([
            i.to_string(),
            cell(&doc.alpha, i),
            cell(&doc.beta, i),
            cell(&doc.spammer_pmf, i),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let config = InstanceConfig::load(&args.config)?;
    let doc = match solve_document(&config)? {
        Ok(doc) => doc,
        Err(reason) => {
            log::error!("no equilibrium: {reason}");
            return Ok(EXIT_SOLVER_FAILED);
        }
    };
    if doc.unique == Some(false) {
        info!("{} candidates tie at the maximum defendability", doc.tied.len());
    }
    emit(out, args.out.as_deref(), &to_json(&doc))?;
    if let Some(path) = &args.csv {
        write_strategy_csv(path, &doc)?;
    }
    Ok(EXIT_OK)
}

/// Reads a strategy from a bare JSON array, or from the `key` field of an
/// object (such as a `solve` result document).
fn read_strategy(path: &Path, key: &str, player: Player) -> Result<MixedStrategy, CliError> {
    let bad = |reason: String| CliError::StrategyFile {
        path: path.to_path_buf(),
        reason,
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let mut value = match value {
        Value::Object(mut map) => map.remove(key).ok_or_else(|| bad(format!("no `{key}` field")))?,
        other => other,
    };
    if let Value::Object(map) = &mut value {
        value = map.remove("weights").ok_or_else(|| bad("no `weights` field".into()))?;
    }
    let weights: Vec<f64> = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
    MixedStrategy::new(player, weights).map_err(|e| bad(e.to_string()))
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if !(args.tol.is_finite() && args.tol >= 0.0) {
        return Err(CliError::Usage(format!(
            "--tol must be a non-negative number, got {}",
            args.tol
        )));
    }
    let config = InstanceConfig::load(&args.config)?;
    let matrices = config.matrices()?;
    let alpha = read_strategy(&args.alpha, "alpha", Player::Attacker)?;
    let beta = read_strategy(&args.beta, "beta", Player::Defender)?;
    let report = verify_ne(&matrices, &alpha, &beta, args.tol).map_err(|e| CliError::StrategyFile {
        path: if alpha.len() != matrices.n() + 1 {
            args.alpha.clone()
        } else {
            args.beta.clone()
        },
        reason: e.to_string(),
    })?;
    emit(out, None, &to_json(&report))?;
    Ok(if report.is_ne { EXIT_OK } else { EXIT_NOT_EQUILIBRIUM })
}

/// One `--vary key=start:stop:steps` axis, expanded to its inclusive grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VaryAxis {
    pub key: String,
    pub values: Vec<f64>,
}

pub fn parse_vary(spec: &str) -> Result<VaryAxis, CliError> {
    let usage = || CliError::Usage(format!("--vary expects key=start:stop:steps, got `{spec}`"));
    let (key, range) = spec.split_once('=').ok_or_else(usage)?;
    let parts: Vec<&str> = range.split(':').collect();
    let [start, stop, steps] = parts.as_slice() else {
        return Err(usage());
    };
    let start: f64 = start.trim().parse().map_err(|_| usage())?;
    let stop: f64 = stop.trim().parse().map_err(|_| usage())?;
    let steps: usize = steps.trim().parse().map_err(|_| usage())?;
    if !(start.is_finite() && stop.is_finite()) {
        return Err(usage());
    }
    let values = match steps {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..steps)
            .map(|k| {
                if k + 1 == steps {
                    stop
                } else {
                    start + (stop - start) * k as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    };
    Ok(VaryAxis {
        key: key.trim().to_string(),
        values,
    })
}

#[derive(Debug, Serialize)]
struct SweepFailure<'a> {
    point: usize,
    values: &'a [(String, f64)],
    status: &'static str,
    error: String,
}

struct SweepPoint {
    values: Vec<(String, f64)>,
    outcome: Result<SolveDocument, (bool, String)>,
}

fn sweep_point(base: &InstanceConfig, values: Vec<(String, f64)>) -> SweepPoint {
    let mut config = base.clone();
    let solved = values
        .iter()
        .try_for_each(|(k, v)| config.set(k, *v))
        .and_then(|()| solve_document(&config));
    let outcome = match solved {
        Ok(Ok(doc)) => Ok(doc),
        Ok(Err(reason)) => Err((false, reason)),
        Err(e) => Err((true, e.to_string())),
    };
    SweepPoint { values, outcome }
}

fn mean_threshold(beta: &[f64]) -> f64 {
    beta.iter().enumerate().map(|(t, b)| t as f64 * b).sum()
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let base = InstanceConfig::load(&args.config)?;
    if args.vary.len() > 2 {
        return Err(CliError::Usage(format!(
            "at most two --vary axes, got {}",
            args.vary.len()
        )));
    }
    let axes = args.vary.iter().map(|s| parse_vary(s)).collect::<Result<Vec<_>, _>>()?;
    if axes.len() == 2 && axes[0].key == axes[1].key {
        return Err(CliError::Usage(format!("`{}` varied twice", axes[0].key)));
    }
    let mut grid: Vec<Vec<(String, f64)>> = vec![Vec::new()];
    for axis in &axes {
        grid = grid
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut point = prefix.clone();
                    point.push((axis.key.clone(), v));
                    point
                })
            })
            .collect();
    }
    if grid.is_empty() || axes.is_empty() {
        return Err(CliError::Usage("the sweep grid is empty".into()));
    }
    // Catch bad keys once instead of failing every point.
    let mut probe = base.clone();
    for axis in &axes {
        probe.set(&axis.key, axis.values[0])?;
    }

    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let points: Vec<SweepPoint> = grid.into_par_iter().map(|values| sweep_point(&base, values)).collect();

    let index_path = args.out.join("index.csv");
    let csv_err = |e: csv::Error| CliError::Usage(format!("{}: {e}", index_path.display()));
    let mut index = csv::Writer::from_path(&index_path).map_err(csv_err)?;
    let mut header = vec!["point".to_string()];
    header.extend(axes.iter().map(|a| a.key.clone()));
    header.extend(
        [
            "status",
            "source",
            "form",
            "s",
            "theta_hat",
            "delta",
            "unique",
            "beta_s",
            "beta_first",
            "mean_threshold",
            "file",
            "error",
        ]
        .map(String::from),
    );
    index.write_record(&header).map_err(csv_err)?;

    let (mut failures, mut config_failures) = (0usize, 0usize);
    for (k, point) in points.iter().enumerate() {
        let file = format!("point_{k:04}.json");
        let path: PathBuf = args.out.join(&file);
        let mut row = vec![k.to_string()];
        row.extend(point.values.iter().map(|(_, v)| v.to_string()));
        match &point.outcome {
            Ok(doc) => {
                write_text(&path, &to_json(doc))?;
                let opt = |v: Option<String>| v.unwrap_or_default();
                let first = doc.beta.iter().position(|b| *b > 0.0).unwrap_or(0);
                row.extend([
                    "ok".to_string(),
                    serde_json::to_value(doc.source)
                        .unwrap()
                        .as_str()
                        .unwrap_or_default()
                        .to_string(),
                    opt(doc.form.map(|f| f.to_string())),
                    opt(doc.s.map(|s| s.to_string())),
                    doc.theta_hat.to_string(),
                    doc.delta.to_string(),
                    opt(doc.unique.map(|u| u.to_string())),
                    opt(doc.s.map(|s| doc.beta[s].to_string())),
                    doc.beta[first].to_string(),
                    mean_threshold(&doc.beta).to_string(),
                    file,
                    String::new(),
                ]);
            }
            Err((is_config, reason)) => {
                failures += 1;
                config_failures += usize::from(*is_config);
                warn!("sweep point {k} failed: {reason}");
                let doc = SweepFailure {
                    point: k,
                    values: &point.values,
                    status: "error",
                    error: reason.clone(),
                };
                write_text(&path, &to_json(&doc))?;
                row.extend(["error".to_string()]);
                row.extend(std::iter::repeat_n(String::new(), 9));
                row.extend([file, reason.clone()]);
            }
        }
        index.write_record(&row).map_err(csv_err)?;
    }
    index.flush().map_err(|e| CliError::io(&index_path, e))?;
    writeln!(
        out,
        "{} points, {} failed; index at {}",
        points.len(),
        failures,
        index_path.display()
    )
    .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    Ok(match failures == points.len() {
        false => EXIT_OK,
        true if config_failures == failures => EXIT_INVALID,
        true => EXIT_SOLVER_FAILED,
    })
}

/// One simulated statistic against its analytic value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub statistic: &'static str,
    pub expected: f64,
    pub mean: f64,
    pub stderr: f64,
    pub deviation_se: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateDocument {
    pub report: SimReport,
    /// `equilibrium` when compared with the solver's strategies, else
    /// `given_strategies`.
    pub expected_from: &'static str,
    pub comparisons: Vec<Comparison>,
    pub pass: bool,
}

fn compare(statistic: &'static str, est: Option<Estimate>, expected: f64) -> Option<Comparison> {
    let est = est?;
    let deviation_se = est.deviation(expected);
    Some(Comparison {
        statistic,
        expected,
        mean: est.mean,
        stderr: est.stderr,
        deviation_se,
        pass: deviation_se <= PASS_SE,
    })
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let config = InstanceConfig::load(&args.config)?;
    let trials = args.trials.or(config.sim.trials).unwrap_or(DEFAULT_TRIALS);
    let seed = args.seed.or(config.sim.seed).unwrap_or(DEFAULT_SEED);
    let params = config.raw_params();
    let model = config.model()?;

    // The solver needs p in (0, 1); the simulator does not.
    let equilibrium = match params.validate() {
        Ok(()) => match solve_document(&config)? {
            Ok(doc) => Some(doc),
            Err(reason) => {
                if args.alpha.is_none() {
                    return Err(CliError::Usage(format!("no equilibrium to simulate: {reason}")));
                }
                warn!("no equilibrium to compare against: {reason}");
                None
            }
        },
        Err(e) if args.alpha.is_none() => return Err(e.into()),
        Err(_) => None,
    };
    let (alpha, beta) = match (&args.alpha, &args.beta) {
        (Some(a), Some(b)) => (
            read_strategy(a, "alpha", Player::Attacker)?,
            read_strategy(b, "beta", Player::Defender)?,
        ),
        _ => equilibrium.as_ref().expect("solved above").strategies(),
    };
    let sim = SimConfig {
        trials,
        seed,
        params,
        model,
        alpha,
        beta,
    };
    sim.validate()?;
    let (reference, expected_from) = match &equilibrium {
        Some(doc) => {
            let (a, b) = doc.strategies();
            (
                SimConfig {
                    alpha: a,
                    beta: b,
                    ..sim.clone()
                },
                "equilibrium",
            )
        }
        None => (sim.clone(), "given_strategies"),
    };
    let expected = analytic_values(&reference);
    let report = simulate(&sim)?;
    let comparisons: Vec<Comparison> = [
        compare(
            "defender_payoff_raw",
            Some(report.defender_payoff_raw),
            expected.defender_payoff_raw,
        ),
        compare("spy_cost", report.spy_cost, expected.spy_cost),
        compare(
            "spy_detection_rate",
            report.spy_detection_rate,
            expected.spy_detection_rate,
        ),
        compare(
            "spammer_false_alarm_rate",
            report.spammer_false_alarm_rate,
            expected.spammer_false_alarm_rate,
        ),
    ]
    .into_iter()
    .flatten()
    .collect();
    let pass = comparisons.iter().all(|c| c.pass);
    let worst = comparisons.iter().map(|c| c.deviation_se).fold(0.0, f64::max);
    let doc = SimulateDocument {
        report,
        expected_from,
        comparisons,
        pass,
    };
    emit(out, None, &to_json(&doc))?;
    Ok(if worst > MISMATCH_SE {
        EXIT_STAT_MISMATCH
    } else {
        EXIT_OK
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vary_grid_is_inclusive() {
        let axis = parse_vary("p=0.1:0.9:9").unwrap();
        assert_eq!(axis.key, "p");
        assert_eq!(axis.values.len(), 9);
        assert_eq!(axis.values[0], 0.1);
        assert_eq!(axis.values[8], 0.9);
        assert!((axis.values[4] - 0.5).abs() < 1e-15);
        assert!(parse_vary("p=0.1:0.9:0").unwrap().values.is_empty());
        assert!(parse_vary("p=0.1:0.9").is_err());
        assert!(parse_vary("p0.1:0.9:3").is_err());
    }
}
