//! Turning an [`ExperimentSpec`] into episode records.

use super::config::{AgentKind, AlphaSetting, EnvSpec, ExperimentSpec, TrainingSpec};
use super::records::{metric_for_env, write_records_file, EpisodeRecord};
use super::train::{
    q_learning_cartpole, DiscretizedQ, Provenance, StaleArtifact, StaleTable, TrainingMethod,
};
use crate::env::{
    build_cliff_walk, build_frozen_lake, make_noisy_model, CartPole, GenerativeModel, NoisyModelSpec,
};
use crate::error::{Error, Result};
use crate::mcts::UctConfig;
use crate::mdp::{value_iteration, QTable, DEFAULT_TOL};
use crate::pamcts::{alpha_sweep, run_pamcts_episode, Agent, EpisodeTrace, StaleValues, SweepResult};
use crate::par::{par_map, serial_map};
use crate::seed::derive_seed;

const SWEEP_TAG: u64 = 0x5357_4550;
const NOISE_TAG: u64 = 0x4e4f_4953;

/// Seed of the `episode`-th executed episode of a run.
pub fn episode_seed(master: u64, episode: usize) -> u64 {
    derive_seed(master, &[episode as u64])
}

/// Master seed handed to the alpha sweep of a run.
pub fn sweep_seed(master: u64) -> u64 {
    derive_seed(master, &[SWEEP_TAG])
}

/// Produce the stale values for the time-0 environment of `env`.
pub fn train_stale_q(env: &EnvSpec, method: TrainingMethod, training: &TrainingSpec, gamma: f64) -> Result<StaleArtifact> {
    let provenance = |status: &str, report| Provenance {
        env: env.name().to_string(),
        params_json: match env {
            EnvSpec::FrozenLake { time0, .. } => serde_json::to_string(time0),
            EnvSpec::CliffWalk { time0, .. } => serde_json::to_string(time0),
            EnvSpec::Cartpole { time0, .. } => serde_json::to_string(time0),
        }
        .unwrap_or_default(),
        method,
        seed: training.seed,
        gamma,
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        status: status.to_string(),
        training: report,
    };
    match (env, method) {
        (EnvSpec::FrozenLake { time0, .. }, TrainingMethod::ValueIteration) => {
            let mdp = build_frozen_lake(time0)?.exact_mdp().expect("gridworlds are finite");
            Ok(StaleArtifact {
                provenance: provenance("converged", None),
                table: StaleTable::Tabular {
                    q: value_iteration(&mdp, gamma, DEFAULT_TOL)?,
                },
            })
        }
        (EnvSpec::CliffWalk { time0, .. }, TrainingMethod::ValueIteration) => {
            let mdp = build_cliff_walk(time0)?.exact_mdp().expect("gridworlds are finite");
            Ok(StaleArtifact {
                provenance: provenance("converged", None),
                table: StaleTable::Tabular {
                    q: value_iteration(&mdp, gamma, DEFAULT_TOL)?,
                },
            })
        }
        (EnvSpec::Cartpole { time0, .. }, TrainingMethod::TabularQLearning) => {
            let mut cfg = training.q_learning.clone();
            cfg.gamma = gamma;
            let (table, report) = q_learning_cartpole(time0, &cfg, training.seed)?;
            let status = if report.plateaued { "converged" } else { "plateau-not-reached" };
            Ok(StaleArtifact {
                provenance: provenance(status, Some(report)),
                table: StaleTable::Discretized { table },
            })
        }
        (env, method) => Err(Error::Config(format!(
            "training method {method:?} does not apply to {}",
            env.name()
        ))),
    }
}

/// Everything a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub records: Vec<EpisodeRecord>,
    pub agent: Agent,
    pub sweep: Option<SweepResult>,
    pub stale: Option<Provenance>,
}

fn load_or_train(spec: &ExperimentSpec) -> Result<StaleArtifact> {
    if let Some(path) = &spec.training.stale_path {
        return StaleArtifact::from_json(&std::fs::read_to_string(path)?);
    }
    let method = spec.training.method.unwrap_or_else(|| spec.environment.default_method());
    train_stale_q(&spec.environment, method, &spec.training, spec.search.gamma)
}

fn needs_stale(spec: &ExperimentSpec) -> bool {
    match spec.agent.kind {
        AgentKind::Mcts => false,
        AgentKind::StalePolicy => true,
        AgentKind::Pamcts => !matches!(spec.agent.alpha, Some(AlphaSetting::Fixed(a)) if a == 0.0),
    }
}

/// Model perceived by the agent in episode `seed`; `None` means the true model.
type Perception<'a, M> = &'a (dyn Fn(u64) -> Result<Option<M>> + Sync);

struct Executed<S> {
    traces: Vec<EpisodeTrace<S>>,
    agent: Agent,
    sweep: Option<SweepResult>,
}

fn execute<M, Q>(spec: &ExperimentSpec, model: &M, stale: Option<&Q>, perceive: Perception<'_, M>) -> Result<Executed<M::State>>
where
    M: GenerativeModel + Clone,
    Q: StaleValues<M::State> + ?Sized,
{
    let master = spec.run.master_seed;
    let metric = metric_for_env(spec.environment.name());
    let mut sweep = None;
    let agent = match (&spec.agent.kind, &spec.agent.alpha) {
        (AgentKind::Mcts, _) => Agent::Mcts,
        (AgentKind::StalePolicy, _) => Agent::StalePolicy,
        (AgentKind::Pamcts, Some(AlphaSetting::Fixed(alpha))) => Agent::Pamcts { alpha: *alpha },
        (AgentKind::Pamcts, Some(s)) if s.is_auto() => {
            let stale = stale.ok_or_else(|| Error::Config("alpha sweep needs stale values".into()))?;
            let sw = &spec.agent.sweep;
            let uct = UctConfig {
                iterations: sw.iterations,
                ..spec.search.clone()
            };
            let seed = sweep_seed(master);
            let result = match perceive(derive_seed(seed, &[NOISE_TAG]))? {
                Some(perceived) => alpha_sweep(&perceived, &perceived, stale, &sw.grid, &uct, sw.episodes, metric, seed)?,
                None => alpha_sweep(model, model, stale, &sw.grid, &uct, sw.episodes, metric, seed)?,
            };
            let alpha = result.best_alpha;
            sweep = Some(result);
            Agent::Pamcts { alpha }
        }
        (AgentKind::Pamcts, _) => return Err(Error::Config("pamcts agent needs agent.alpha".into())),
    };
    let episodes: Vec<usize> = (0..spec.run.episodes).collect();
    let one = |&e: &usize| -> Result<EpisodeTrace<M::State>> {
        let seed = episode_seed(master, e);
        match perceive(derive_seed(seed, &[NOISE_TAG]))? {
            Some(perceived) => run_pamcts_episode(model, &perceived, stale, agent, &spec.search, seed),
            None => run_pamcts_episode(model, model, stale, agent, &spec.search, seed),
        }
    };
    let traces = if spec.run.parallel {
        par_map(&episodes, one)
    } else {
        serial_map(&episodes, one)
    };
    Ok(Executed {
        traces: traces.into_iter().collect::<Result<Vec<_>>>()?,
        agent,
        sweep,
    })
}

fn no_noise<M>(_: u64) -> Result<Option<M>> {
    Ok(None)
}

fn finish<S>(spec: &ExperimentSpec, executed: Executed<S>) -> (Vec<EpisodeRecord>, Agent, Option<SweepResult>) {
    let run_id = spec.run.run_id.clone().unwrap_or_else(|| format!("run-{}", spec.run.master_seed));
    let env = spec.environment.name().to_string();
    let params_json = spec.environment.params_json();
    let iterations = if executed.agent == Agent::StalePolicy { 0 } else { spec.search.iterations };
    let records: Vec<EpisodeRecord> = executed
        .traces
        .iter()
        .enumerate()
        .map(|(episode, t)| EpisodeRecord {
            run_id: run_id.clone(),
            env: env.clone(),
            params_json: params_json.clone(),
            agent: executed.agent.name().to_string(),
            alpha: executed.agent.alpha(),
            iterations,
            episode,
            seed: t.seed,
            steps: t.steps,
            return_discounted: t.return_discounted,
            return_undiscounted: t.return_undiscounted,
        })
        .collect();
    (records, executed.agent, executed.sweep)
}

/// Run every episode of `spec` and, when an output path is set, write the
/// records before returning.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let artifact = if needs_stale(spec) { Some(load_or_train(spec)?) } else { None };
    let tabular = |a: &StaleArtifact| match &a.table {
        StaleTable::Tabular { q } => Ok(q.clone()),
        _ => Err(Error::Config("stale table does not match a tabular environment".into())),
    };
    let executed = match &spec.environment {
        EnvSpec::FrozenLake { time_t, .. } => {
            let model = build_frozen_lake(time_t)?;
            let q: Option<QTable> = artifact.as_ref().map(tabular).transpose()?;
            finish(spec, execute(spec, &model, q.as_ref(), &no_noise)?)
        }
        EnvSpec::CliffWalk { time_t, .. } => {
            let model = build_cliff_walk(time_t)?;
            let q: Option<QTable> = artifact.as_ref().map(tabular).transpose()?;
            finish(spec, execute(spec, &model, q.as_ref(), &no_noise)?)
        }
        EnvSpec::Cartpole { time_t, noise, .. } => {
            let model = CartPole::new(time_t.clone())?;
            let q: Option<DiscretizedQ> = artifact
                .as_ref()
                .map(|a| match &a.table {
                    StaleTable::Discretized { table } => Ok(table.clone()),
                    _ => Err(Error::Config("stale table does not match cartpole".into())),
                })
                .transpose()?;
            let perceive = |seed: u64| -> Result<Option<CartPole>> {
                match noise {
                    Some(n) => make_noisy_model(&NoisyModelSpec {
                        base: time_t.clone(),
                        gravity_sigma: n.gravity_sigma,
                        pole_mass_sigma: n.pole_mass_sigma,
                        seed,
                    })
                    .map(Some),
                    None => Ok(None),
                }
            };
            finish(spec, execute(spec, &model, q.as_ref(), &perceive)?)
        }
    };
    let (records, agent, sweep) = executed;
    if let Some(path) = &spec.run.output {
        write_records_file(path, &records)?;
    }
    Ok(ExperimentOutcome {
        records,
        agent,
        sweep,
        stale: artifact.map(|a| a.provenance),
    })
}

/// Run only the alpha sweep configured in `spec`.
pub fn sweep_experiment(spec: &ExperimentSpec) -> Result<SweepResult> {
    let mut spec = spec.clone();
    spec.agent.kind = AgentKind::Pamcts;
    spec.agent.alpha = Some(AlphaSetting::Named(AlphaSetting::AUTO.into()));
    spec.run.episodes = 1;
    spec.run.output = None;
    spec.validate()?;
    let artifact = load_or_train(&spec)?;
    let sw = &spec.agent.sweep;
    let uct = UctConfig {
        iterations: sw.iterations,
        ..spec.search.clone()
    };
    let seed = sweep_seed(spec.run.master_seed);
    let metric = metric_for_env(spec.environment.name());
    match (&spec.environment, &artifact.table) {
        (EnvSpec::FrozenLake { time_t, .. }, StaleTable::Tabular { q }) => {
            let m = build_frozen_lake(time_t)?;
            alpha_sweep(&m, &m, q, &sw.grid, &uct, sw.episodes, metric, seed)
        }
        (EnvSpec::CliffWalk { time_t, .. }, StaleTable::Tabular { q }) => {
            let m = build_cliff_walk(time_t)?;
            alpha_sweep(&m, &m, q, &sw.grid, &uct, sw.episodes, metric, seed)
        }
        (EnvSpec::Cartpole { time_t, noise, .. }, StaleTable::Discretized { table }) => {
            let m = match noise {
                Some(n) => make_noisy_model(&NoisyModelSpec {
                    base: time_t.clone(),
                    gravity_sigma: n.gravity_sigma,
                    pole_mass_sigma: n.pole_mass_sigma,
                    seed: derive_seed(seed, &[NOISE_TAG]),
                })?,
                None => CartPole::new(time_t.clone())?,
            };
            alpha_sweep(&m, &m, table, &sw.grid, &uct, sw.episodes, metric, seed)
        }
        _ => Err(Error::Config("stale table does not match the environment".into())),
    }
}
