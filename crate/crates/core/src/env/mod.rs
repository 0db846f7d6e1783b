//! Generative models for the benchmark domains.
//!
//! Every model is an immutable description of the dynamics. Randomness comes
//! only from the stream handed to [`GenerativeModel::sample_step`], so a step
//! is a pure function of `(state, action, stream state)`.

mod cartpole;
mod grid;

pub use cartpole::{cartpole_step, make_noisy_model, CartPole, CartPoleParams, CartPoleState, NoisyModelSpec};
pub use grid::{
    build_cliff_walk, build_frozen_lake, CliffWalkParams, FrozenLakeParams, GridWorld,
};

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::mdp::TabularMdp;
use crate::seed::SimRng;

/// Outcome of one simulated step.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition<S> {
    pub next: S,
    pub reward: f64,
    pub done: bool,
}

/// A black-box simulator `(state, action) -> (next state, reward, done)`.
pub trait GenerativeModel: Send + Sync {
    type State: Clone + PartialEq + Debug + Send + Sync;

    fn action_count(&self) -> usize;

    fn initial_state(&self, rng: &mut SimRng) -> Self::State;

    /// Sample a successor. Calling this on a terminal state is a contract
    /// violation; use [`checked_step`] where that must be detected.
    fn sample_step(&self, state: &Self::State, action: usize, rng: &mut SimRng) -> Transition<Self::State>;

    fn is_terminal(&self, state: &Self::State) -> bool;

    /// Bound `R` on the absolute per-step reward.
    fn reward_bound(&self) -> f64;

    /// Maximum number of steps in one executed episode.
    fn episode_cap(&self) -> usize;

    /// Exact tabular form, for finite models.
    fn exact_mdp(&self) -> Option<TabularMdp> {
        None
    }
}

/// [`GenerativeModel::sample_step`] with terminal and action-range checks.
pub fn checked_step<M: GenerativeModel>(
    model: &M,
    state: &M::State,
    action: usize,
    rng: &mut SimRng,
) -> Result<Transition<M::State>> {
    if model.is_terminal(state) {
        return Err(Error::TerminalState(format!("{state:?}")));
    }
    if action >= model.action_count() {
        return Err(Error::Domain(format!(
            "action {action} out of range for {} actions",
            model.action_count()
        )));
    }
    Ok(model.sample_step(state, action, rng))
}
