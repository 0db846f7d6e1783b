//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string so the page needs no glue beyond
//! `JSON.parse`. Failures come back as `{"error": "..."}`.

use pamcts_core::env::{build_frozen_lake, FrozenLakeParams, GenerativeModel, GridWorld};
use pamcts_core::mcts::UctConfig;
use pamcts_core::mdp::{epsilon_bound, value_iteration, DEFAULT_TOL};
use pamcts_core::pamcts::{run_pamcts_episode, Agent};
use pamcts_core::theory::{alpha_feasible_range, corollary22_check, theorem2_check, theorem3_bound, AlphaRange};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

fn to_json<T: Serialize>(r: pamcts_core::Result<T>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| json!({ "error": e.to_string() }).to_string()),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

#[derive(Serialize)]
struct IntervalView {
    range: AlphaRange,
    /// `[alpha, passes]` on a 0.05 grid, for plotting.
    samples: Vec<(f64, bool)>,
}

/// Alphas for which the stale-gap check certifies the blended choice.
#[wasm_bindgen]
pub fn alpha_interval(epsilon: f64, delta: f64, psi_0: f64) -> String {
    to_json(alpha_feasible_range(epsilon, delta, psi_0).map(|range| IntervalView {
        range,
        samples: (0..=20)
            .map(|i| {
                let a = i as f64 / 20.0;
                (a, corollary22_check(a, epsilon, delta, psi_0))
            })
            .collect(),
    }))
}

#[derive(Serialize)]
struct BoundsView {
    epsilon: f64,
    value_gap: f64,
    /// Whether the current-gap check passes for `psi_t`.
    certified: bool,
}

/// Drift bound from `eta`, the value-gap bound at `alpha`, and the check
/// against a current gap `psi_t`.
#[wasm_bindgen]
pub fn drift_bounds(eta: f64, reward_bound: f64, gamma: f64, alpha: f64, delta: f64, psi_t: f64) -> String {
    to_json(epsilon_bound(eta, reward_bound, gamma).and_then(|epsilon| {
        Ok(BoundsView {
            epsilon,
            value_gap: theorem3_bound(alpha, epsilon, delta, gamma)?,
            certified: theorem2_check(alpha, epsilon, delta, psi_t),
        })
    }))
}

#[derive(Serialize)]
struct EpisodeView {
    width: usize,
    height: usize,
    holes: Vec<usize>,
    goal: usize,
    states: Vec<usize>,
    actions: Vec<usize>,
    success: bool,
    return_discounted: f64,
}

fn lake(p1: f64) -> FrozenLakeParams {
    let side = (1.0 - p1) / 2.0;
    FrozenLakeParams::small([p1, side, side])
}

/// One episode on the 3x3 lake with intended-direction probability `p1`,
/// planning with the stale values of the non-slippery lake.
#[wasm_bindgen]
pub fn frozen_lake_episode(p1: f64, alpha: f64, iterations: usize, seed: u64) -> String {
    let run = || -> pamcts_core::Result<EpisodeView> {
        let uct = UctConfig::with_iterations(iterations);
        let stale = value_iteration(
            &build_frozen_lake(&lake(1.0))?.exact_mdp().expect("gridworlds are finite"),
            uct.gamma,
            DEFAULT_TOL,
        )?;
        let params = lake(p1);
        let world: GridWorld = build_frozen_lake(&params)?;
        let trace = run_pamcts_episode(&world, &world, Some(&stale), Agent::Pamcts { alpha }, &uct, seed)?;
        Ok(EpisodeView {
            width: world.width(),
            height: world.height(),
            holes: params.holes.clone(),
            goal: params.goal,
            success: trace.return_undiscounted > 0.0,
            states: trace.states,
            actions: trace.actions,
            return_discounted: trace.return_discounted,
        })
    };
    to_json(run())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exports_return_json() {
        let v: serde_json::Value = serde_json::from_str(&alpha_interval(0.1, 0.5, 0.3)).unwrap();
        assert_eq!(v["range"]["kind"], "interval");
        let v: serde_json::Value = serde_json::from_str(&drift_bounds(0.2, 1.0, 0.9, 0.5, 0.1, 1.0)).unwrap();
        assert!((v["epsilon"].as_f64().unwrap() - 18.0).abs() < 1e-9);
        let v: serde_json::Value = serde_json::from_str(&frozen_lake_episode(1.0, 1.0, 10, 3)).unwrap();
        assert_eq!(v["success"], true);
        assert_eq!(v["states"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn errors_are_reported() {
        let v: serde_json::Value = serde_json::from_str(&alpha_interval(f64::NAN, 0.2, 0.3)).unwrap();
        assert!(v["error"].is_string());
    }
}
