//! Producing the stale action values: exact DP for grids, tabular
//! Q-learning over a fixed discretization for CartPole.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::{cartpole_step, CartPole, CartPoleParams, CartPoleState, GenerativeModel};
use crate::error::Result;
use crate::mdp::{argmax, QTable};
use crate::pamcts::StaleValues;
use crate::seed::{derive_seed, rng_for};

/// Uniform bins per state dimension; values outside the range fall into the
/// edge bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discretizer {
    pub bins: [usize; 4],
    pub lower: [f64; 4],
    pub upper: [f64; 4],
}

impl Default for Discretizer {
    fn default() -> Self {
        Self {
            bins: [12, 10, 12, 10],
            lower: [-2.4, -3.0, -0.21, -3.5],
            upper: [2.4, 3.0, 0.21, 3.5],
        }
    }
}

impl Discretizer {
    pub fn n_cells(&self) -> usize {
        self.bins.iter().product()
    }

    pub fn index(&self, s: &CartPoleState) -> usize {
        let mut idx = 0;
        for d in 0..4 {
            let n = self.bins[d];
            let frac = (s[d] - self.lower[d]) / (self.upper[d] - self.lower[d]);
            let b = ((frac * n as f64).floor().max(0.0) as usize).min(n - 1);
            idx = idx * n + b;
        }
        idx
    }
}

/// A Q-table over discretized cart-pole states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedQ {
    pub discretizer: Discretizer,
    pub q: QTable,
}

impl DiscretizedQ {
    pub fn greedy(&self, s: &CartPoleState) -> usize {
        argmax(self.q.row(self.discretizer.index(s)))
    }
}

impl StaleValues<CartPoleState> for DiscretizedQ {
    fn action_values(&self, state: &CartPoleState) -> Vec<f64> {
        self.q.row(self.discretizer.index(state)).to_vec()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QLearningConfig {
    pub episodes: usize,
    pub learning_rate: f64,
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Greedy evaluation cadence, in training episodes.
    pub eval_every: usize,
    pub eval_episodes: usize,
    pub discretizer: Discretizer,
}

impl Default for QLearningConfig {
    fn default() -> Self {
        Self {
            episodes: 200_000,
            learning_rate: 0.1,
            gamma: 0.99,
            epsilon_start: 1.0,
            epsilon_end: 0.01,
            eval_every: 500,
            eval_episodes: 20,
            discretizer: Discretizer::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub episodes_run: usize,
    pub best_eval_mean: f64,
    /// True when the best greedy evaluation reached the episode cap.
    pub plateaued: bool,
}

/// Mean survival of the greedy policy of `q` over `episodes` seeded starts.
pub fn evaluate_greedy(q: &DiscretizedQ, params: &CartPoleParams, episodes: usize, seed: u64) -> Result<f64> {
    let env = CartPole::new(params.clone())?;
    let mut total = 0usize;
    for e in 0..episodes {
        let mut rng = rng_for(seed, &[e as u64]);
        let mut s = env.initial_state(&mut rng);
        for _ in 0..params.max_steps {
            total += 1;
            let t = cartpole_step(params, &s, q.greedy(&s));
            if t.done {
                break;
            }
            s = t.next;
        }
    }
    Ok(total as f64 / episodes as f64)
}

/// Tabular Q-learning with linearly decaying epsilon-greedy exploration.
/// The table with the best periodic greedy evaluation is returned.
pub fn q_learning_cartpole(
    params: &CartPoleParams,
    cfg: &QLearningConfig,
    seed: u64,
) -> Result<(DiscretizedQ, TrainingReport)> {
    let env = CartPole::new(params.clone())?;
    let disc = cfg.discretizer.clone();
    let mut table = DiscretizedQ {
        q: QTable::zeros(disc.n_cells(), 2, cfg.gamma),
        discretizer: disc.clone(),
    };
    let mut best = table.clone();
    let mut best_score = f64::NEG_INFINITY;
    let mut rng = rng_for(seed, &[0]);
    let eval_seed = derive_seed(seed, &[1]);
    let mut episodes_run = 0;
    for ep in 0..cfg.episodes {
        episodes_run = ep + 1;
        let frac = ep as f64 / cfg.episodes.max(2).saturating_sub(1) as f64;
        let explore = cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac;
        let mut s = env.initial_state(&mut rng);
        let mut i = disc.index(&s);
        for _ in 0..params.max_steps {
            let a = if rng.random::<f64>() < explore {
                rng.random_range(0..2)
            } else {
                argmax(table.q.row(i))
            };
            let t = cartpole_step(params, &s, a);
            let j = disc.index(&t.next);
            let target = if t.done {
                t.reward
            } else {
                let row = table.q.row(j);
                t.reward + cfg.gamma * row[argmax(row)]
            };
            let q = &mut table.q.values[i][a];
            *q += cfg.learning_rate * (target - *q);
            if t.done {
                break;
            }
            s = t.next;
            i = j;
        }
        if (ep + 1) % cfg.eval_every == 0 || ep + 1 == cfg.episodes {
            let score = evaluate_greedy(&table, params, cfg.eval_episodes, eval_seed)?;
            if score > best_score {
                best_score = score;
                best = table.clone();
            }
            if score >= params.max_steps as f64 {
                break;
            }
        }
    }
    Ok((
        best,
        TrainingReport {
            episodes_run,
            best_eval_mean: best_score,
            plateaued: best_score >= params.max_steps as f64,
        },
    ))
}

/// How the stale values are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrainingMethod {
    ValueIteration,
    TabularQLearning,
}

/// Stale values for either state representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum StaleTable {
    Tabular { q: QTable },
    Discretized { table: DiscretizedQ },
}

/// Where a stale table came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub env: String,
    pub params_json: String,
    pub method: TrainingMethod,
    pub seed: u64,
    pub gamma: f64,
    pub crate_version: String,
    /// `"converged"` or `"plateau-not-reached"`.
    pub status: String,
    pub training: Option<TrainingReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaleArtifact {
    pub provenance: Provenance,
    pub table: StaleTable,
}

impl StaleArtifact {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
