//! Campaign configuration files.
//!
//! A single JSON document names the benchmark system, the operational space
//! grid, and the sampling budget. Parsing is strict: unknown keys are
//! rejected so a typo cannot silently fall back to a default.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oss::{ContDim, DeltaVector, DiscDim, OssSpec};
use crate::quantify::{sample_count, InitDistribution};
use crate::systems::{
    cliff_integrator, drift_walker, mode_hopper, CliffIntegrator, CliffIntegratorParams,
    DriftWalker, DriftWalkerParams, ModeHopper, ModeHopperParams,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContDimConfig {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscDimConfig {
    pub name: String,
    pub values: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OssConfig {
    #[serde(default)]
    pub cont: Vec<ContDimConfig>,
    #[serde(default)]
    pub disc: Vec<DiscDimConfig>,
    pub horizon: usize,
}

impl OssConfig {
    pub fn to_spec(&self) -> Result<OssSpec> {
        let cont = self
            .cont
            .iter()
            .map(|d| ContDim::new(&d.name, d.lower, d.upper))
            .collect();
        let disc = self
            .disc
            .iter()
            .map(|d| DiscDim::new(&d.name, d.values.clone()))
            .collect();
        let delta = DeltaVector(self.cont.iter().map(|d| d.delta).collect());
        OssSpec::new(cont, disc, delta, self.horizon)
    }
}

/// Which benchmark system to run, with its own parameter block.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "snake_case")]
pub enum SystemConfig {
    CliffIntegrator(CliffIntegratorParams),
    DriftWalker(DriftWalkerParams),
    ModeHopper(ModeHopperParams),
}

/// A constructed benchmark instance.
#[derive(Debug)]
pub enum SystemInstance {
    CliffIntegrator(CliffIntegrator),
    DriftWalker(DriftWalker),
    ModeHopper(ModeHopper),
}

impl SystemInstance {
    pub fn as_model(&self) -> &dyn crate::scenario::SystemModel {
        match self {
            SystemInstance::CliffIntegrator(s) => s,
            SystemInstance::DriftWalker(s) => s,
            SystemInstance::ModeHopper(s) => s,
        }
    }
}

fn default_oracle_trials() -> usize {
    crate::oracle::DEFAULT_ORACLE_TRIALS
}

fn default_out_dir() -> String {
    "out".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub system: SystemConfig,
    pub oss: OssConfig,
    pub epsilon: f64,
    pub beta: f64,
    pub seed: u64,
    pub max_runs: usize,
    #[serde(default = "default_oracle_trials")]
    pub oracle_trials: usize,
    #[serde(default = "default_out_dir")]
    pub out_dir: String,
    #[serde(default)]
    pub init_distribution: InitDistribution,
}

impl CampaignConfig {
    /// Builds the system, checks its state arity against the grid, and
    /// confirms the run budget covers the required consecutive-safe count.
    pub fn build(&self) -> Result<(SystemInstance, OssSpec)> {
        let spec = self.oss.to_spec()?;
        let sys = match &self.system {
            SystemConfig::CliffIntegrator(p) => {
                expect_arity("cliff_integrator", &spec, 2, 0)?;
                SystemInstance::CliffIntegrator(cliff_integrator(p.clone())?)
            }
            SystemConfig::DriftWalker(p) => {
                expect_arity("drift_walker", &spec, 4, 0)?;
                SystemInstance::DriftWalker(drift_walker(p.clone())?)
            }
            SystemConfig::ModeHopper(p) => {
                expect_arity("mode_hopper", &spec, 2, 1)?;
                let sys = mode_hopper(p.clone())?;
                let declared: std::collections::BTreeSet<i64> =
                    p.contraction.iter().map(|&(q, _)| q).collect();
                for &q in &spec.disc_dims[0].values {
                    if !declared.contains(&q) {
                        return Err(Error::Config(format!(
                            "grid mode {q} has no contraction entry in the mode_hopper params"
                        )));
                    }
                }
                SystemInstance::ModeHopper(sys)
            }
        };
        let needed = sample_count(self.epsilon, self.beta)?;
        if (self.max_runs as u64) < needed {
            return Err(Error::Config(format!(
                "max_runs {} is below the {} consecutive safe runs required for epsilon {} beta {}",
                self.max_runs, needed, self.epsilon, self.beta
            )));
        }
        if self.oracle_trials == 0 {
            return Err(Error::Config("oracle_trials must be positive".into()));
        }
        Ok((sys, spec))
    }

    pub fn to_quantify_config(&self) -> crate::quantify::QuantifyConfig {
        crate::quantify::QuantifyConfig {
            epsilon: self.epsilon,
            beta: self.beta,
            seed: self.seed,
            max_runs: self.max_runs,
            init_distribution: self.init_distribution,
        }
    }
}

fn expect_arity(name: &str, spec: &OssSpec, cont: usize, disc: usize) -> Result<()> {
    if spec.n_cont() != cont || spec.n_disc() != disc {
        return Err(Error::Config(format!(
            "{name} states carry {cont} continuous and {disc} discrete dimensions, \
             but the grid declares {} and {}",
            spec.n_cont(),
            spec.n_disc()
        )));
    }
    Ok(())
}

/// Parses and fully validates a campaign config file.
pub fn load(path: &Path) -> Result<CampaignConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg: CampaignConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    cfg.build()?;
    Ok(cfg)
}
