use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cvrptw::ObjectiveWeights;
use crate::de::DeConfig;
use crate::error::{Error, Result};
use crate::hybrid::AosMode;
use crate::statebased::DdqnConfig;
use crate::types::Domain;

/// One test problem: a benchmark function or a Solomon instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemSpec {
    Function {
        function: String,
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shift_seed: Option<u64>,
    },
    Instance {
        instance: PathBuf,
    },
}

impl ProblemSpec {
    pub fn function(name: &str, dim: usize) -> Self {
        ProblemSpec::Function {
            function: name.to_string(),
            dim,
            shift_seed: None,
        }
    }

    pub fn instance(path: impl Into<PathBuf>) -> Self {
        ProblemSpec::Instance {
            instance: path.into(),
        }
    }

    /// Identifier used in result files.
    pub fn id(&self) -> String {
        match self {
            ProblemSpec::Function {
                function,
                dim,
                shift_seed: None,
            } => format!("{function}-d{dim}"),
            ProblemSpec::Function {
                function,
                dim,
                shift_seed: Some(s),
            } => format!("{function}-d{dim}-s{s}"),
            ProblemSpec::Instance { instance } => instance
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| instance.display().to_string()),
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            ProblemSpec::Function { .. } => Domain::Real,
            ProblemSpec::Instance { .. } => Domain::Cvrptw,
        }
    }
}

fn default_trials() -> usize {
    30
}

fn default_episodes() -> usize {
    20
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub domain: Domain,
    pub problems: Vec<ProblemSpec>,
    #[serde(default)]
    pub aos_modes: Vec<String>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Evaluations (real) or moves (cvrptw) per run, and per training episode.
    pub budget: usize,
    /// Base seed; trial `i` uses `seed + i`, training episode `e` uses `seed + e`.
    #[serde(default, alias = "seeds")]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub model_path: Option<PathBuf>,
    /// Offline training episodes, round-robin over `problems`.
    #[serde(default = "default_episodes")]
    pub episodes: usize,
    #[serde(default)]
    pub de: Option<DeSettings>,
    #[serde(default)]
    pub ddqn: DdqnConfig,
    #[serde(default)]
    pub weights: Option<ObjectiveWeights>,
    /// Fill the `seconds` column with wall time. Off by default so result
    /// files are reproducible byte for byte.
    #[serde(default)]
    pub record_timing: bool,
}

/// DE parameters other than the budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeSettings {
    pub pop_size: usize,
    pub f: f64,
    pub cr: f64,
}

impl Default for DeSettings {
    fn default() -> Self {
        let d = DeConfig::default();
        Self {
            pop_size: d.pop_size,
            f: d.f,
            cr: d.cr,
        }
    }
}

impl ExperimentConfig {
    pub fn new(
        domain: Domain,
        problems: Vec<ProblemSpec>,
        modes: &[AosMode],
        trials: usize,
        budget: usize,
        seed: u64,
    ) -> Self {
        Self {
            domain,
            problems,
            aos_modes: modes.iter().map(|m| m.to_string()).collect(),
            trials,
            budget,
            seed,
            output_dir: default_output(),
            model_path: None,
            episodes: default_episodes(),
            de: None,
            ddqn: DdqnConfig::default(),
            weights: None,
            record_timing: false,
        }
    }

    /// Reads a JSON config. Relative instance and model paths are resolved
    /// against the config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg: ExperimentConfig = serde_json::from_str(&fs::read_to_string(path)?)?;
        if let Some(base) = path.parent() {
            for p in &mut cfg.problems {
                if let ProblemSpec::Instance { instance } = p {
                    if instance.is_relative() {
                        *instance = base.join(&*instance);
                    }
                }
            }
        }
        Ok(cfg)
    }

    pub fn modes(&self) -> Result<Vec<AosMode>> {
        self.aos_modes.iter().map(|m| m.parse()).collect()
    }

    pub fn de_config(&self) -> DeConfig {
        let s = self.de.unwrap_or_default();
        DeConfig {
            pop_size: s.pop_size,
            f: s.f,
            cr: s.cr,
            budget: self.budget,
        }
    }

    pub fn objective_weights(&self) -> ObjectiveWeights {
        self.weights.unwrap_or_default()
    }

    /// Checks shared by training and evaluation.
    pub fn validate_common(&self) -> Result<()> {
        if self.problems.is_empty() {
            return Err(Error::Config("no problems given".into()));
        }
        if self.budget == 0 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        if let Some(p) = self.problems.iter().find(|p| p.domain() != self.domain) {
            return Err(Error::Config(format!(
                "problem {} does not belong to domain {}",
                p.id(),
                self.domain
            )));
        }
        if self.domain == Domain::Real {
            self.de_config().validate()?;
        }
        self.ddqn.validate()
    }

    pub fn validate_for_evaluation(&self) -> Result<()> {
        self.validate_common()?;
        if self.trials < 2 {
            return Err(Error::Config(format!(
                "need at least 2 trials for statistics, got {}",
                self.trials
            )));
        }
        if self.modes()?.is_empty() {
            return Err(Error::Config("no aos_modes given".into()));
        }
        Ok(())
    }
}
