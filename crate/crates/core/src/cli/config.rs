use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::game::{GameMatrices, GameParams, SpammerModel};
use crate::solver::SolverOptions;

/// Spammer hit-count distribution as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpammerSpec {
    Binomial { theta0: f64 },
    Pmf(Vec<f64>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub feasibility_tol: Option<f64>,
    pub pivot_tol: Option<f64>,
    pub clamp_tol: Option<f64>,
    pub sum_tol: Option<f64>,
    pub tie_tol: Option<f64>,
    pub verify_tol: Option<f64>,
}

impl SolverConfig {
    pub fn options(&self) -> SolverOptions {
        let d = SolverOptions::default();
        SolverOptions {
            feasibility_tol: self.feasibility_tol.unwrap_or(d.feasibility_tol),
            pivot_tol: self.pivot_tol.unwrap_or(d.pivot_tol),
            clamp_tol: self.clamp_tol.unwrap_or(d.clamp_tol),
            sum_tol: self.sum_tol.unwrap_or(d.sum_tol),
            tie_tol: self.tie_tol.unwrap_or(d.tie_tol),
            verify_tol: self.verify_tol.unwrap_or(d.verify_tol),
        }
    }
}

/// Settings for the fallback used when the structural solver fails.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub verify_tol: Option<f64>,
    /// Largest `N` handed to support enumeration.
    pub support_enum_max_n: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimOptions {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

/// One game instance. `epsilon` defaults to `c_a`.
///
/// ```json
/// {"n": 7, "p": 0.2, "c_d": 15, "c_a": 1, "c_fa": 23,
///  "spammer": {"binomial": {"theta0": 0.1}}}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub n: usize,
    pub p: f64,
    pub c_d: f64,
    pub c_a: f64,
    pub c_fa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub spammer: SpammerSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub sim: SimOptions,
}

impl InstanceConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Parameters without validation; the simulator accepts `p` in `[0, 1]`.
    pub fn raw_params(&self) -> GameParams {
        GameParams {
            n: self.n,
            p: self.p,
            c_d: self.c_d,
            c_a: self.c_a,
            c_fa: self.c_fa,
            epsilon: self.epsilon.unwrap_or(self.c_a),
        }
    }

    pub fn params(&self) -> Result<GameParams, CliError> {
        let params = self.raw_params();
        params.validate()?;
        Ok(params)
    }

    pub fn model(&self) -> Result<SpammerModel, CliError> {
        let model = match &self.spammer {
            SpammerSpec::Binomial { theta0 } => SpammerModel::binomial(self.n, *theta0)?,
            SpammerSpec::Pmf(pmf) => SpammerModel::from_pmf(pmf.clone())?,
        };
        if model.n() != self.n {
            return Err(CliError::Config(format!(
                "spammer pmf covers 0..={} but n = {}",
                model.n(),
                self.n
            )));
        }
        Ok(model)
    }

    pub fn matrices(&self) -> Result<GameMatrices, CliError> {
        Ok(GameMatrices::build(&self.params()?, &self.model()?)?)
    }

    /// Sets a named scalar; used by `sweep`.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), CliError> {
        match key {
            "n" => {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(CliError::Usage(format!(
                        "n must be a non-negative integer, got {value}"
                    )));
                }
                self.n = value as usize;
            }
            "p" => self.p = value,
            "c_d" => self.c_d = value,
            "c_a" => self.c_a = value,
            "c_fa" => self.c_fa = value,
            "epsilon" => self.epsilon = Some(value),
            "theta0" => match &mut self.spammer {
                SpammerSpec::Binomial { theta0 } => *theta0 = value,
                SpammerSpec::Pmf(_) => {
                    return Err(CliError::Usage("theta0 can only vary with a binomial spammer".into()));
                }
            },
            other => return Err(CliError::Usage(format!("unknown sweep parameter `{other}`"))),
        }
        Ok(())
    }
}
