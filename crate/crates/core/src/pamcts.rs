//! The policy-augmented decision rule, the episode loop and the alpha sweep.

use serde::{Deserialize, Serialize};

use crate::env::GenerativeModel;
use crate::error::{Error, Result};
use crate::mcts::{mcts_search, UctConfig};
use crate::mdp::{argmax, QTable};
use crate::par::par_map;
use crate::seed::{derive_seed, rng_for, STREAM_ENV, STREAM_INIT, STREAM_SEARCH};

/// Alpha values evaluated by default during a sweep.
pub const DEFAULT_ALPHA_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha {alpha} outside [0, 1]")));
    }
    Ok(())
}

/// `argmax_a alpha * q_row[a] + (1 - alpha) * g_row[a]`, lowest index on ties.
pub fn pamcts_select(q_row: &[f64], g_row: &[f64], alpha: f64) -> Result<usize> {
    check_alpha(alpha)?;
    if q_row.len() != g_row.len() || q_row.is_empty() {
        return Err(Error::Shape(format!(
            "stale row has {} actions, search row has {}",
            q_row.len(),
            g_row.len()
        )));
    }
    let scores: Vec<f64> = q_row
        .iter()
        .zip(g_row)
        .map(|(q, g)| alpha * q + (1.0 - alpha) * g)
        .collect();
    Ok(argmax(&scores))
}

/// Stale action values learned before the environment changed.
pub trait StaleValues<S>: Sync {
    fn action_values(&self, state: &S) -> Vec<f64>;
}

impl StaleValues<usize> for QTable {
    fn action_values(&self, state: &usize) -> Vec<f64> {
        self.values[*state].clone()
    }
}

/// How actions are chosen during an episode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Agent {
    Pamcts { alpha: f64 },
    Mcts,
    StalePolicy,
}

impl Agent {
    pub fn name(&self) -> &'static str {
        match self {
            Agent::Pamcts { .. } => "pamcts",
            Agent::Mcts => "mcts",
            Agent::StalePolicy => "stale-policy",
        }
    }

    /// Effective mixing weight.
    pub fn alpha(&self) -> f64 {
        match *self {
            Agent::Pamcts { alpha } => alpha,
            Agent::Mcts => 0.0,
            Agent::StalePolicy => 1.0,
        }
    }
}

/// Which return column a run is scored on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Discounted,
    Undiscounted,
}

impl Metric {
    pub fn of_trace<S>(&self, t: &EpisodeTrace<S>) -> f64 {
        match self {
            Metric::Discounted => t.return_discounted,
            Metric::Undiscounted => t.return_undiscounted,
        }
    }
}

/// Outcome of one executed episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace<S> {
    pub seed: u64,
    pub steps: usize,
    /// Visited states, starting with the initial one.
    pub states: Vec<S>,
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
    pub return_discounted: f64,
    pub return_undiscounted: f64,
}

/// Run one episode: act in `true_model`, plan in `planning_model`.
///
/// The initial state, the dynamics and the search each draw from their own
/// stream derived from `seed`, so agents that pick the same actions see the
/// same trajectory. When the search term carries no weight (`alpha == 1`) the
/// search is skipped.
pub fn run_pamcts_episode<M, P, Q>(
    true_model: &M,
    planning_model: &P,
    stale: Option<&Q>,
    agent: Agent,
    uct: &UctConfig,
    seed: u64,
) -> Result<EpisodeTrace<M::State>>
where
    M: GenerativeModel,
    P: GenerativeModel<State = M::State>,
    Q: StaleValues<M::State> + ?Sized,
{
    if true_model.action_count() != planning_model.action_count() {
        return Err(Error::Config(format!(
            "true model has {} actions, planning model {}",
            true_model.action_count(),
            planning_model.action_count()
        )));
    }
    let alpha = agent.alpha();
    check_alpha(alpha)?;
    let needs_stale = alpha > 0.0;
    let needs_search = alpha < 1.0;
    if needs_stale && stale.is_none() {
        return Err(Error::Config(format!("agent {} needs stale values", agent.name())));
    }
    if needs_search {
        uct.validate()?;
    }
    let mut init_rng = rng_for(seed, &[STREAM_INIT]);
    let mut env_rng = rng_for(seed, &[STREAM_ENV]);
    let mut search_rng = rng_for(seed, &[STREAM_SEARCH]);
    let n_actions = true_model.action_count();

    let mut state = true_model.initial_state(&mut init_rng);
    let mut trace = EpisodeTrace {
        seed,
        steps: 0,
        states: vec![state.clone()],
        actions: Vec::new(),
        rewards: Vec::new(),
        return_discounted: 0.0,
        return_undiscounted: 0.0,
    };
    let mut discount = 1.0;
    for _ in 0..true_model.episode_cap() {
        let q_row = match stale {
            Some(q) if needs_stale => q.action_values(&state),
            _ => vec![0.0; n_actions],
        };
        let g_row = if needs_search {
            mcts_search(planning_model, &state, uct, &mut search_rng)?.estimates
        } else {
            vec![0.0; n_actions]
        };
        let action = pamcts_select(&q_row, &g_row, alpha)?;
        let t = true_model.sample_step(&state, action, &mut env_rng);
        trace.steps += 1;
        trace.actions.push(action);
        trace.rewards.push(t.reward);
        trace.return_discounted += discount * t.reward;
        trace.return_undiscounted += t.reward;
        discount *= uct.gamma;
        trace.states.push(t.next.clone());
        if t.done {
            break;
        }
        state = t.next;
    }
    Ok(trace)
}

/// Per-alpha results of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaStat {
    pub alpha: f64,
    pub mean_discounted: f64,
    pub mean_undiscounted: f64,
    pub episodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub best_alpha: f64,
    pub metric: Metric,
    pub per_alpha: Vec<AlphaStat>,
}

/// Seed of episode `episode` for the `alpha_index`-th grid entry.
pub fn sweep_episode_seed(master: u64, alpha_index: usize, episode: usize) -> u64 {
    derive_seed(master, &[alpha_index as u64, episode as u64])
}

/// Evaluate every alpha in `grid` with `uct`, usually a small iteration
/// budget, and pick the best by the mean of `metric`. Ties go to the larger
/// alpha.
#[allow(clippy::too_many_arguments)]
pub fn alpha_sweep<M, P, Q>(
    true_model: &M,
    planning_model: &P,
    stale: &Q,
    grid: &[f64],
    uct: &UctConfig,
    episodes_per_alpha: usize,
    metric: Metric,
    seed: u64,
) -> Result<SweepResult>
where
    M: GenerativeModel,
    P: GenerativeModel<State = M::State>,
    Q: StaleValues<M::State> + ?Sized,
{
    if grid.is_empty() {
        return Err(Error::Config("alpha grid is empty".into()));
    }
    if episodes_per_alpha == 0 {
        return Err(Error::Config("episodes_per_alpha must be at least 1".into()));
    }
    for &a in grid {
        check_alpha(a)?;
    }
    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|i| (0..episodes_per_alpha).map(move |e| (i, e)))
        .collect();
    let traces = par_map(&jobs, |&(i, e)| {
        run_pamcts_episode(
            true_model,
            planning_model,
            Some(stale),
            Agent::Pamcts { alpha: grid[i] },
            uct,
            sweep_episode_seed(seed, i, e),
        )
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let n = episodes_per_alpha as f64;
    let per_alpha: Vec<AlphaStat> = grid
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let chunk = &traces[i * episodes_per_alpha..(i + 1) * episodes_per_alpha];
            AlphaStat {
                alpha,
                mean_discounted: chunk.iter().map(|t| t.return_discounted).sum::<f64>() / n,
                mean_undiscounted: chunk.iter().map(|t| t.return_undiscounted).sum::<f64>() / n,
                episodes: episodes_per_alpha,
            }
        })
        .collect();
    let best = per_alpha
        .iter()
        .reduce(|best, s| {
            let (a, b) = match metric {
                Metric::Discounted => (s.mean_discounted, best.mean_discounted),
                Metric::Undiscounted => (s.mean_undiscounted, best.mean_undiscounted),
            };
            let better = a > b || (a == b && s.alpha > best.alpha);
            if better {
                s
            } else {
                best
            }
        })
        .expect("grid is non-empty");
    Ok(SweepResult {
        best_alpha: best.alpha,
        metric,
        per_alpha,
    })
}
