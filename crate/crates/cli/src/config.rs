//! Run configuration: one JSON document per run.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use plankton_fde::analysis::{GronwallProblem, LipschitzVariant, Profile, StateBox};
use plankton_fde::solver::{Method, SolverConfig};
use plankton_fde::specfun::SampledFunction;
use plankton_fde::wellposed::Direction;
use plankton_fde::{ModelParams64, SolverConfig64, State64, StateBox64};

use crate::error::{CliError, CliResult};

/// Model parameters given as a file path (relative to the config file) or
/// inline.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamsSource {
    Path(String),
    Inline(serde_json::Value),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsSource,
    #[serde(default)]
    pub initial: Option<[f64; 3]>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_steps")]
    pub n_steps: usize,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default)]
    pub picard_max_iter: Option<usize>,
    #[serde(default)]
    pub picard_tol: Option<f64>,
    #[serde(default, rename = "envelope_constant_K")]
    pub envelope_constant_k: Option<f64>,
    #[serde(default)]
    pub abm_startup_substeps: Option<usize>,
    #[serde(default = "default_box", rename = "box")]
    pub state_box: [f64; 3],
    #[serde(default)]
    pub lipschitz_variant: LipschitzVariant,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub direction: Direction,
    #[serde(default = "default_uniqueness_tol")]
    pub uniqueness_tol: f64,
    #[serde(default)]
    pub uniqueness_steps: Option<UniquenessSteps>,
    #[serde(default)]
    pub empirical_samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub gronwall: Option<GronwallSpec>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniquenessSteps {
    pub picard: usize,
    pub abm: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileSpec {
    Constant(f64),
    Sampled { grid: Vec<f64>, values: Vec<f64> },
}

impl ProfileSpec {
    fn to_profile(&self) -> CliResult<Profile<f64>> {
        Ok(match self {
            ProfileSpec::Constant(c) => Profile::Constant(*c),
            ProfileSpec::Sampled { grid, values } => {
                Profile::Sampled(SampledFunction::new(grid.clone(), values.clone())?)
            }
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GronwallSpec {
    pub h: ProfileSpec,
    pub q: ProfileSpec,
    pub beta: f64,
    pub horizon: f64,
    /// Evaluation time; defaults to the horizon.
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default = "default_terms")]
    pub n_terms: usize,
}

impl GronwallSpec {
    pub fn problem(&self) -> CliResult<GronwallProblem<f64>> {
        Ok(GronwallProblem::new(self.h.to_profile()?, self.q.to_profile()?, self.beta, self.horizon)?)
    }

    pub fn time(&self) -> f64 {
        self.t.unwrap_or(self.horizon)
    }
}

fn default_horizon() -> f64 {
    1.0
}
fn default_steps() -> usize {
    256
}
fn default_method() -> Method {
    Method::Abm
}
fn default_box() -> [f64; 3] {
    [2.0, 2.0, 2.0]
}
fn default_epsilons() -> Vec<f64> {
    vec![1e-4, 1e-3, 1e-2]
}
fn default_uniqueness_tol() -> f64 {
    1e-3
}
fn default_terms() -> usize {
    plankton_fde::analysis::DEFAULT_TERMS
}

/// A parsed config with the parameter document resolved and validated.
pub struct Loaded {
    pub config: RunConfig,
    pub params: ModelParams64,
}

pub fn load(path: &Path) -> CliResult<Loaded> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut config: RunConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let params = match &config.params {
        ParamsSource::Inline(v) => ModelParams64::from_json_value(v.clone())?,
        ParamsSource::Path(rel) => {
            let base = path.parent().unwrap_or(Path::new("."));
            let p = base.join(rel);
            let body = fs::read_to_string(&p).map_err(|e| CliError::io(&p, e))?;
            ModelParams64::from_json_str(&body)?
        }
    };
    // Fingerprints depend on parameter values, not on where they were stored.
    config.params = ParamsSource::Inline(serde_json::to_value(params).expect("parameters serialize"));
    Ok(Loaded { config, params })
}

impl RunConfig {
    pub fn initial_state(&self) -> CliResult<State64> {
        let [a, b, c] = self
            .initial
            .ok_or_else(|| CliError::Config("missing field `initial`".into()))?;
        Ok(State64::new(a, b, c)?)
    }

    pub fn state_box(&self) -> CliResult<StateBox64> {
        let [a, b, c] = self.state_box;
        Ok(StateBox::new(a, b, c)?)
    }

    pub fn solver(&self) -> CliResult<SolverConfig64> {
        let alpha = self
            .alpha
            .ok_or_else(|| CliError::Config("missing field `alpha`".into()))?;
        let mut cfg = SolverConfig::new(alpha, self.horizon, self.n_steps, self.method)?;
        if let Some(n) = self.picard_max_iter {
            cfg = cfg.with_picard(n, cfg.picard_tol)?;
        }
        if let Some(tol) = self.picard_tol {
            cfg = cfg.with_picard(cfg.picard_max_iter, tol)?;
        }
        if let Some(k) = self.envelope_constant_k {
            cfg = cfg.with_envelope_constant(k)?;
        }
        if let Some(s) = self.abm_startup_substeps {
            cfg = cfg.with_abm_startup(s)?;
        }
        Ok(cfg)
    }
}
