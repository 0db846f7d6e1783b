//! TOML experiment specifications.
//!
//! ```toml
//! [environment]
//! kind = "frozen-lake"
//! [environment.time0]
//! width = 3
//! height = 3
//! start = 0
//! goal = 8
//! holes = [1, 6]
//! slip = [1.0, 0.0, 0.0]
//! [environment.time_t]
//! width = 3
//! height = 3
//! start = 0
//! goal = 8
//! holes = [1, 6]
//! slip = [0.3333333333333333, 0.3333333333333333, 0.3333333333333334]
//!
//! [agent]
//! kind = "pamcts"
//! alpha = "auto-sweep"
//! [agent.sweep]
//! iterations = 250
//! episodes = 100
//!
//! [search]
//! iterations = 10000
//! exploration = 50.0
//!
//! [run]
//! episodes = 100
//! master_seed = 7
//! output = "results.csv"
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::train::{QLearningConfig, TrainingMethod};
use crate::env::{CartPoleParams, CliffWalkParams, FrozenLakeParams};
use crate::error::{Error, Result};
use crate::mcts::UctConfig;
use crate::pamcts::DEFAULT_ALPHA_GRID;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum EnvSpec {
    FrozenLake {
        time0: FrozenLakeParams,
        time_t: FrozenLakeParams,
    },
    CliffWalk {
        time0: CliffWalkParams,
        time_t: CliffWalkParams,
    },
    Cartpole {
        #[serde(default)]
        time0: CartPoleParams,
        #[serde(default)]
        time_t: CartPoleParams,
        /// Perception noise on the planning model.
        #[serde(default)]
        noise: Option<NoiseSpec>,
    },
}

impl EnvSpec {
    pub fn name(&self) -> &'static str {
        match self {
            EnvSpec::FrozenLake { .. } => "frozen-lake",
            EnvSpec::CliffWalk { .. } => "cliff-walk",
            EnvSpec::Cartpole { .. } => "cartpole",
        }
    }

    /// JSON of the time-`t` parameters, plus noise when present.
    pub fn params_json(&self) -> String {
        let value = match self {
            EnvSpec::FrozenLake { time_t, .. } => serde_json::to_value(time_t),
            EnvSpec::CliffWalk { time_t, .. } => serde_json::to_value(time_t),
            EnvSpec::Cartpole { time_t, noise, .. } => {
                serde_json::to_value(time_t).map(|mut v| {
                    if let (Some(n), Some(obj)) = (noise, v.as_object_mut()) {
                        obj.insert("noise".into(), serde_json::to_value(n).unwrap_or_default());
                    }
                    v
                })
            }
        };
        value.map(|v| v.to_string()).unwrap_or_default()
    }

    pub fn default_method(&self) -> TrainingMethod {
        match self {
            EnvSpec::Cartpole { .. } => TrainingMethod::TabularQLearning,
            _ => TrainingMethod::ValueIteration,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(default)]
    pub gravity_sigma: f64,
    #[serde(default)]
    pub pole_mass_sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentKind {
    Pamcts,
    Mcts,
    StalePolicy,
}

impl AgentKind {
    pub fn name(&self) -> &'static str {
        match self {
            AgentKind::Pamcts => "pamcts",
            AgentKind::Mcts => "mcts",
            AgentKind::StalePolicy => "stale-policy",
        }
    }
}

/// A fixed alpha or the literal string `"auto-sweep"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSetting {
    Fixed(f64),
    Named(String),
}

impl AlphaSetting {
    pub const AUTO: &'static str = "auto-sweep";

    pub fn is_auto(&self) -> bool {
        matches!(self, AlphaSetting::Named(s) if s == Self::AUTO)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSpec {
    pub iterations: usize,
    pub episodes: usize,
    pub grid: Vec<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            iterations: 25,
            episodes: 100,
            grid: DEFAULT_ALPHA_GRID.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub kind: AgentKind,
    #[serde(default)]
    pub alpha: Option<AlphaSetting>,
    #[serde(default)]
    pub sweep: SweepSpec,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingSpec {
    pub method: Option<TrainingMethod>,
    pub seed: u64,
    /// Pre-computed artifact to load instead of training.
    pub stale_path: Option<PathBuf>,
    pub q_learning: QLearningConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub episodes: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub run_id: Option<String>,
    #[serde(default = "default_true")]
    pub parallel: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub environment: EnvSpec,
    pub agent: AgentSpec,
    #[serde(default)]
    pub search: UctConfig,
    pub run: RunSpec,
    #[serde(default)]
    pub training: TrainingSpec,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.run.episodes == 0 {
            return Err(Error::Config("run.episodes must be at least 1".into()));
        }
        match &self.environment {
            EnvSpec::FrozenLake { time0, time_t } => {
                time0.validate()?;
                time_t.validate()?;
                if (time0.width, time0.height) != (time_t.width, time_t.height) {
                    return Err(Error::Config("time0 and time_t grids differ".into()));
                }
            }
            EnvSpec::CliffWalk { time0, time_t } => {
                time0.validate()?;
                time_t.validate()?;
            }
            EnvSpec::Cartpole { time0, time_t, noise } => {
                time0.validate()?;
                time_t.validate()?;
                if let Some(n) = noise {
                    if !(n.gravity_sigma >= 0.0 && n.pole_mass_sigma >= 0.0) {
                        return Err(Error::Config("noise sigmas must be >= 0".into()));
                    }
                }
            }
        }
        if self.agent.kind != AgentKind::StalePolicy {
            self.search.validate()?;
        }
        match (&self.agent.kind, &self.agent.alpha) {
            (AgentKind::Pamcts, None) => {
                return Err(Error::Config("pamcts agent needs agent.alpha".into()));
            }
            (AgentKind::Pamcts, Some(AlphaSetting::Fixed(a))) if !(0.0..=1.0).contains(a) => {
                return Err(Error::Config(format!("alpha {a} outside [0, 1]")));
            }
            (_, Some(AlphaSetting::Named(s))) if s != AlphaSetting::AUTO => {
                return Err(Error::Config(format!("unknown alpha setting {s:?}")));
            }
            _ => {}
        }
        if self.agent.alpha.as_ref().is_some_and(AlphaSetting::is_auto) {
            if self.agent.kind != AgentKind::Pamcts {
                return Err(Error::Config("auto-sweep only applies to the pamcts agent".into()));
            }
            let sw = &self.agent.sweep;
            if sw.grid.is_empty() || sw.episodes == 0 || sw.iterations == 0 {
                return Err(Error::Config("sweep needs a grid, episodes and iterations".into()));
            }
        }
        if self.training.method == Some(TrainingMethod::ValueIteration)
            && matches!(self.environment, EnvSpec::Cartpole { .. })
        {
            return Err(Error::Config("value iteration needs a finite environment".into()));
        }
        if self.training.method == Some(TrainingMethod::TabularQLearning)
            && !matches!(self.environment, EnvSpec::Cartpole { .. })
        {
            return Err(Error::Config("tabular Q-learning is only wired up for cartpole".into()));
        }
        Ok(())
    }
}
