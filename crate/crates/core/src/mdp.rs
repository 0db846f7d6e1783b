//! Finite MDPs, dynamic-programming solvers and the transition-change metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ROW_SUM_TOL: f64 = 1e-9;

/// Default convergence threshold for the DP solvers (max-norm).
pub const DEFAULT_TOL: f64 = 1e-10;
/// Sweep cap for the DP solvers.
pub const MAX_SWEEPS: usize = 1_000_000;
/// Gaps below this are treated as exact ties by [`psi_gap`].
pub const TIE_TOL: f64 = 1e-12;

/// An explicit finite MDP with state-action rewards `r(s, a)`.
///
/// Terminal states are absorbing zero-reward self-loops, which keeps every
/// Bellman operator total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMdp", into = "RawMdp")]
pub struct TabularMdp {
    n_states: usize,
    n_actions: usize,
    transition: Vec<Vec<Vec<f64>>>,
    reward: Vec<Vec<f64>>,
    terminal: Vec<usize>,
    reward_bound: f64,
    is_terminal: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct RawMdp {
    n_states: usize,
    n_actions: usize,
    transition: Vec<Vec<Vec<f64>>>,
    reward: Vec<Vec<f64>>,
    terminal: Vec<usize>,
    reward_bound: f64,
}

impl TryFrom<RawMdp> for TabularMdp {
    type Error = Error;

    fn try_from(raw: RawMdp) -> Result<Self> {
        TabularMdp::new(raw.transition, raw.reward, raw.terminal, raw.reward_bound)
    }
}

impl From<TabularMdp> for RawMdp {
    fn from(m: TabularMdp) -> Self {
        RawMdp {
            n_states: m.n_states,
            n_actions: m.n_actions,
            transition: m.transition,
            reward: m.reward,
            terminal: m.terminal,
            reward_bound: m.reward_bound,
        }
    }
}

impl TabularMdp {
    /// Build and validate an MDP. `transition[s][a][s']` must be a probability
    /// row for every `(s, a)`, `|reward[s][a]| <= reward_bound`, and terminal
    /// states must self-loop with probability 1 and reward 0.
    pub fn new(
        transition: Vec<Vec<Vec<f64>>>,
        reward: Vec<Vec<f64>>,
        terminal: Vec<usize>,
        reward_bound: f64,
    ) -> Result<Self> {
        let n_states = transition.len();
        if n_states == 0 {
            return Err(Error::InvalidMdp("no states".into()));
        }
        let n_actions = transition[0].len();
        if n_actions == 0 {
            return Err(Error::InvalidMdp("no actions".into()));
        }
        if !(reward_bound >= 0.0 && reward_bound.is_finite()) {
            return Err(Error::InvalidMdp(format!("reward bound {reward_bound}")));
        }
        if reward.len() != n_states {
            return Err(Error::InvalidMdp("reward has wrong number of states".into()));
        }
        for (s, (rows, rewards)) in transition.iter().zip(&reward).enumerate() {
            if rows.len() != n_actions || rewards.len() != n_actions {
                return Err(Error::InvalidMdp(format!("state {s} has wrong action count")));
            }
            for (a, row) in rows.iter().enumerate() {
                if row.len() != n_states {
                    return Err(Error::InvalidMdp(format!("row ({s},{a}) has wrong length")));
                }
                if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                    return Err(Error::InvalidMdp(format!("row ({s},{a}) has entry outside [0,1]")));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOL {
                    return Err(Error::InvalidMdp(format!("row ({s},{a}) sums to {sum}")));
                }
                let r = rewards[a];
                if !r.is_finite() || r.abs() > reward_bound {
                    return Err(Error::InvalidMdp(format!(
                        "reward ({s},{a}) = {r} exceeds bound {reward_bound}"
                    )));
                }
            }
        }
        let mut is_terminal = vec![false; n_states];
        for &t in &terminal {
            if t >= n_states {
                return Err(Error::InvalidMdp(format!("terminal state {t} out of range")));
            }
            if is_terminal[t] {
                return Err(Error::InvalidMdp(format!("terminal state {t} listed twice")));
            }
            is_terminal[t] = true;
            for a in 0..n_actions {
                if transition[t][a][t] != 1.0 || reward[t][a] != 0.0 {
                    return Err(Error::InvalidMdp(format!(
                        "terminal state {t} must be a zero-reward self-loop"
                    )));
                }
            }
        }
        Ok(Self {
            n_states,
            n_actions,
            transition,
            reward,
            terminal,
            reward_bound,
            is_terminal,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn reward_bound(&self) -> f64 {
        self.reward_bound
    }

    pub fn terminal(&self) -> &[usize] {
        &self.terminal
    }

    pub fn is_terminal(&self, s: usize) -> bool {
        self.is_terminal[s]
    }

    /// Transition row `P(. | s, a)`.
    pub fn row(&self, s: usize, a: usize) -> &[f64] {
        &self.transition[s][a]
    }

    pub fn reward(&self, s: usize, a: usize) -> f64 {
        self.reward[s][a]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    fn backup(&self, s: usize, a: usize, gamma: f64, values: &[f64]) -> f64 {
        let row = &self.transition[s][a];
        let next: f64 = row.iter().zip(values).map(|(p, v)| p * v).sum();
        self.reward[s][a] + gamma * next
    }

    fn same_shape(&self, other: &TabularMdp) -> Result<()> {
        if self.n_states != other.n_states || self.n_actions != other.n_actions {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.n_states, self.n_actions, other.n_states, other.n_actions
            )));
        }
        Ok(())
    }
}

/// State-action values, `values[s][a]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    pub values: Vec<Vec<f64>>,
    pub gamma: f64,
}

impl QTable {
    pub fn zeros(n_states: usize, n_actions: usize, gamma: f64) -> Self {
        Self {
            values: vec![vec![0.0; n_actions]; n_states],
            gamma,
        }
    }

    pub fn n_states(&self) -> usize {
        self.values.len()
    }

    pub fn n_actions(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.values[s]
    }

    /// `max_a Q(s, a)` for every state.
    pub fn state_values(&self) -> Vec<f64> {
        self.values.iter().map(|row| row[argmax(row)]).collect()
    }

    pub fn greedy_policy(&self) -> PolicyTable {
        PolicyTable {
            actions: self.values.iter().map(|row| argmax(row)).collect(),
        }
    }

    /// Max-norm distance between two tables of the same shape.
    pub fn max_abs_diff(&self, other: &QTable) -> Result<f64> {
        if self.n_states() != other.n_states() || self.n_actions() != other.n_actions() {
            return Err(Error::Shape("q tables differ in shape".into()));
        }
        Ok(self
            .values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Max-norm Bellman optimality residual of this table on `mdp`.
    pub fn bellman_residual(&self, mdp: &TabularMdp) -> f64 {
        let v = self.state_values();
        let mut worst: f64 = 0.0;
        for s in 0..mdp.n_states() {
            for a in 0..mdp.n_actions() {
                let target = mdp.backup(s, a, self.gamma, &v);
                worst = worst.max((target - self.values[s][a]).abs());
            }
        }
        worst
    }
}

/// A deterministic policy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyTable {
    pub actions: Vec<usize>,
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::Domain(format!("discount {gamma} outside [0, 1)")));
    }
    Ok(())
}

/// Optimal Q-values by value iteration, using the default sweep cap.
pub fn value_iteration(mdp: &TabularMdp, gamma: f64, tol: f64) -> Result<QTable> {
    value_iteration_capped(mdp, gamma, tol, MAX_SWEEPS)
}

/// Value iteration with an explicit sweep cap.
///
/// Iterates until successive tables differ by at most `tol * (1 - gamma)`,
/// which puts the returned table within `tol` of the fixed point and its
/// Bellman residual below `tol`.
pub fn value_iteration_capped(
    mdp: &TabularMdp,
    gamma: f64,
    tol: f64,
    max_sweeps: usize,
) -> Result<QTable> {
    check_gamma(gamma)?;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let (ns, na) = (mdp.n_states(), mdp.n_actions());
    let threshold = tol * (1.0 - gamma);
    let mut q = vec![vec![0.0; na]; ns];
    let mut v = vec![0.0; ns];
    let mut residual = f64::INFINITY;
    for _ in 0..max_sweeps {
        residual = 0.0;
        for s in 0..ns {
            for a in 0..na {
                let updated = mdp.backup(s, a, gamma, &v);
                residual = residual.max((updated - q[s][a]).abs());
                q[s][a] = updated;
            }
        }
        for (vs, row) in v.iter_mut().zip(&q) {
            *vs = row[argmax(row)];
        }
        if residual <= threshold {
            return Ok(QTable { values: q, gamma });
        }
    }
    Err(Error::SolverFailure {
        sweeps: max_sweeps,
        residual,
    })
}

/// State values of a fixed deterministic policy by iterative evaluation.
pub fn policy_evaluation(
    mdp: &TabularMdp,
    policy: &PolicyTable,
    gamma: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    check_gamma(gamma)?;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    if policy.actions.len() != mdp.n_states() {
        return Err(Error::Shape(format!(
            "policy covers {} states, mdp has {}",
            policy.actions.len(),
            mdp.n_states()
        )));
    }
    if let Some(&bad) = policy.actions.iter().find(|&&a| a >= mdp.n_actions()) {
        return Err(Error::Shape(format!("policy action {bad} out of range")));
    }
    let threshold = tol * (1.0 - gamma);
    let mut v = vec![0.0; mdp.n_states()];
    let mut next = v.clone();
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        residual = 0.0;
        for s in 0..mdp.n_states() {
            next[s] = mdp.backup(s, policy.actions[s], gamma, &v);
            residual = residual.max((next[s] - v[s]).abs());
        }
        std::mem::swap(&mut v, &mut next);
        if residual <= threshold {
            return Ok(v);
        }
    }
    Err(Error::SolverFailure {
        sweeps: MAX_SWEEPS,
        residual,
    })
}

/// Greedy action at `s`, ties broken to the lowest index.
pub fn greedy_action(q: &QTable, s: usize) -> usize {
    argmax(q.row(s))
}

/// The smallest `eta` with `sum_s' |P_t(s'|s,a) - P_0(s'|s,a)| <= eta` for
/// every `(s, a)`.
pub fn compute_eta(mdp0: &TabularMdp, mdpt: &TabularMdp) -> Result<f64> {
    mdp0.same_shape(mdpt)?;
    let mut eta: f64 = 0.0;
    for s in 0..mdp0.n_states() {
        for a in 0..mdp0.n_actions() {
            let l1: f64 = mdp0
                .row(s, a)
                .iter()
                .zip(mdpt.row(s, a))
                .map(|(p, q)| (p - q).abs())
                .sum();
            eta = eta.max(l1);
        }
    }
    Ok(eta)
}

/// Worst-case optimal Q-value drift `gamma * eta * R / (1 - gamma)^2`.
pub fn epsilon_bound(eta: f64, reward_bound: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(eta >= 0.0) || !(reward_bound >= 0.0) {
        return Err(Error::Domain(format!(
            "eta {eta} and reward bound {reward_bound} must be non-negative"
        )));
    }
    Ok(gamma * eta * reward_bound / ((1.0 - gamma) * (1.0 - gamma)))
}

/// Gap between the best and second-best entry of `row`.
pub fn psi_gap_row(row: &[f64]) -> Result<f64> {
    if row.len() < 2 {
        return Err(Error::Domain("action gap needs at least two actions".into()));
    }
    let best = argmax(row);
    let runner_up = row
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let gap = row[best] - runner_up;
    if gap < TIE_TOL {
        return Err(Error::Tie { gap });
    }
    Ok(gap)
}

/// Action gap `psi(s)` of a Q-table.
pub fn psi_gap(q: &QTable, s: usize) -> Result<f64> {
    psi_gap_row(q.row(s))
}
