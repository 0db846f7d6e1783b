//! Policy-augmented Monte Carlo tree search (PA-MCTS) for non-stationary MDPs.
//!
//! An agent holds action values learned before its environment changed and a
//! generative model of the environment as it is now. At each decision it runs
//! UCT on the current model and acts on a convex combination of the stale
//! values and the fresh search estimates:
//!
//! ```text
//! a = argmax_a  alpha * Q0(s, a) + (1 - alpha) * G(s, a)
//! ```
//!
//! The crate is organised as
//!
//! - [`mdp`]: exact finite MDPs, value iteration and the transition-change
//!   metrics (`eta`, `epsilon`, action gaps);
//! - [`env`]: Frozen Lake, Cliff Walking and CartPole simulators;
//! - [`mcts`]: UCT search over any [`env::GenerativeModel`];
//! - [`pamcts`]: the decision rule, episode loop and alpha sweep;
//! - [`theory`]: the optimality and regret bounds as predicates, plus
//!   randomized checks against DP oracles;
//! - [`harness`]: TOML experiment specs, stale-value training, CSV records and
//!   summaries.
//!
//! ```
//! use pamcts_core::env::{build_frozen_lake, FrozenLakeParams, GenerativeModel};
//! use pamcts_core::mdp::{value_iteration, greedy_action};
//!
//! let lake = build_frozen_lake(&FrozenLakeParams::small([1.0, 0.0, 0.0])).unwrap();
//! let q = value_iteration(&lake.exact_mdp().unwrap(), 0.99, 1e-10).unwrap();
//! assert_eq!(greedy_action(&q, 0), 1); // down
//! ```

pub mod env;
pub mod error;
pub mod harness;
pub mod mcts;
pub mod mdp;
pub mod pamcts;
pub mod par;
pub mod seed;
pub mod theory;

pub use error::{Error, Result};
