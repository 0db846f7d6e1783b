//! The optimality and regret bounds as executable predicates, with
//! randomized harnesses that check them against exact DP solutions.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{
    argmax, compute_eta, epsilon_bound, policy_evaluation, psi_gap_row, value_iteration, PolicyTable, QTable,
    TabularMdp, DEFAULT_TOL,
};
use crate::pamcts::pamcts_select;
use crate::par::par_map;
use crate::seed::{derive_seed, rng_for, SimRng};

/// Slack allowed for solver error when comparing exact quantities to bounds.
const NUMERIC_SLACK: f64 = 1e-8;

/// Single-epoch optimality condition on the current action gap:
/// `alpha * epsilon + (1 - alpha) * delta <= psi_t / 2`.
pub fn theorem2_check(alpha: f64, epsilon: f64, delta: f64, psi_t: f64) -> bool {
    alpha * epsilon + (1.0 - alpha) * delta <= psi_t / 2.0
}

/// Upper bound `psi_0 + 2 epsilon` on the current action gap.
pub fn psi_relation_bound(psi_0: f64, epsilon: f64) -> f64 {
    psi_0 + 2.0 * epsilon
}

/// The decision-time form of [`theorem2_check`] with `psi_t` replaced by
/// [`psi_relation_bound`]: `alpha * epsilon + (1 - alpha) * delta <= psi_0 / 2 + epsilon`.
///
/// This is weaker than [`theorem2_check`]; substituting an upper bound of
/// `psi_t` into the right-hand side does not preserve the guarantee, and at
/// `alpha = 1` the condition holds for every input.
pub fn corollary22_check(alpha: f64, epsilon: f64, delta: f64, psi_0: f64) -> bool {
    alpha * epsilon + (1.0 - alpha) * delta <= psi_0 / 2.0 + epsilon
}

/// The set of `alpha` in `[0, 1]` satisfying [`corollary22_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum AlphaRange {
    All,
    None,
    Interval { lo: f64, hi: f64 },
}

impl AlphaRange {
    pub fn contains(&self, alpha: f64) -> bool {
        match *self {
            AlphaRange::All => (0.0..=1.0).contains(&alpha),
            AlphaRange::None => false,
            AlphaRange::Interval { lo, hi } => lo <= alpha && alpha <= hi,
        }
    }

    fn clamp(lo: f64, hi: f64) -> Self {
        let (lo, hi) = (lo.max(0.0), hi.min(1.0));
        if lo > hi {
            AlphaRange::None
        } else if lo == 0.0 && hi == 1.0 {
            AlphaRange::All
        } else {
            AlphaRange::Interval { lo, hi }
        }
    }
}

/// Solve `alpha (epsilon - delta) + delta <= psi_0 / 2 + epsilon` for alpha.
///
/// For `epsilon > delta` the solutions are `alpha <= 1 + psi_0 / (2 (epsilon - delta))`,
/// for `epsilon < delta` they are `alpha >= 1 - psi_0 / (2 (delta - epsilon))`,
/// and for `epsilon == delta` the condition does not depend on alpha.
pub fn alpha_feasible_range(epsilon: f64, delta: f64, psi_0: f64) -> Result<AlphaRange> {
    if ![epsilon, delta, psi_0].iter().all(|v| v.is_finite()) {
        return Err(Error::Domain("alpha range inputs must be finite".into()));
    }
    let d = epsilon - delta;
    Ok(if d > 0.0 {
        AlphaRange::clamp(0.0, 1.0 + psi_0 / (2.0 * d))
    } else if d < 0.0 {
        AlphaRange::clamp(1.0 + psi_0 / (2.0 * d), 1.0)
    } else if corollary22_check(0.0, epsilon, delta, psi_0) {
        AlphaRange::All
    } else {
        AlphaRange::None
    })
}

/// Outcome of the decision-time certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// Both rules pick the same action.
    NotApplicable,
    GuaranteedBetter,
    Inconclusive,
}

fn zeta(q0: &[f64], g: &[f64], chosen: usize, other: usize) -> f64 {
    (q0[chosen] + g[chosen]) - (q0[other] + g[other])
}

fn check_rows(q0: &[f64], g: &[f64]) -> Result<()> {
    if q0.len() != g.len() || q0.is_empty() {
        return Err(Error::Shape(format!("rows of length {} and {}", q0.len(), g.len())));
    }
    Ok(())
}

/// Whether the blended choice provably beats the pure-search choice, given
/// stale values within `epsilon` of the current optimum.
pub fn prop1_check(q0_row: &[f64], g_row: &[f64], alpha: f64, epsilon: f64) -> Result<Certificate> {
    check_rows(q0_row, g_row)?;
    let chosen = pamcts_select(q0_row, g_row, alpha)?;
    let search = argmax(g_row);
    if chosen == search {
        return Ok(Certificate::NotApplicable);
    }
    Ok(if 2.0 * epsilon <= zeta(q0_row, g_row, chosen, search) {
        Certificate::GuaranteedBetter
    } else {
        Certificate::Inconclusive
    })
}

/// Whether the blended choice provably beats the stale greedy choice, given
/// search estimates within `delta` of the current optimum.
pub fn prop2_check(q0_row: &[f64], g_row: &[f64], alpha: f64, delta: f64) -> Result<Certificate> {
    check_rows(q0_row, g_row)?;
    let chosen = pamcts_select(q0_row, g_row, alpha)?;
    let greedy = argmax(q0_row);
    if chosen == greedy {
        return Ok(Certificate::NotApplicable);
    }
    Ok(if 2.0 * delta <= zeta(q0_row, g_row, chosen, greedy) {
        Certificate::GuaranteedBetter
    } else {
        Certificate::Inconclusive
    })
}

/// Bound `2 (alpha epsilon - alpha delta + delta) / (1 - gamma)` on the value
/// lost by following PA-MCTS instead of the current optimal policy.
pub fn theorem3_bound(alpha: f64, epsilon: f64, delta: f64, gamma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::Domain(format!("discount {gamma} outside [0, 1)")));
    }
    Ok(2.0 * (alpha * epsilon - alpha * delta + delta) / (1.0 - gamma))
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

fn random_distribution(n: usize, rng: &mut SimRng) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// A dense random MDP with rewards uniform in `[-reward_bound, reward_bound]`
/// and no terminal states.
pub fn random_mdp(n_states: usize, n_actions: usize, reward_bound: f64, rng: &mut SimRng) -> Result<TabularMdp> {
    if n_states == 0 || n_actions == 0 {
        return Err(Error::Domain("random MDP needs states and actions".into()));
    }
    let transition = (0..n_states)
        .map(|_| (0..n_actions).map(|_| random_distribution(n_states, rng)).collect())
        .collect();
    let reward = (0..n_states)
        .map(|_| {
            (0..n_actions)
                .map(|_| {
                    if reward_bound > 0.0 {
                        rng.random_range(-reward_bound..=reward_bound)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    TabularMdp::new(transition, reward, Vec::new(), reward_bound)
}

/// Move every transition row of `mdp` toward a random distribution by L1
/// distance at most `eta`, keeping rewards and terminals. Terminal rows are
/// left untouched.
pub fn perturb_transitions(mdp: &TabularMdp, eta: f64, rng: &mut SimRng) -> Result<TabularMdp> {
    if !(eta >= 0.0) {
        return Err(Error::Domain(format!("eta {eta} must be non-negative")));
    }
    let n = mdp.n_states();
    let mut transition = Vec::with_capacity(n);
    let mut reward = Vec::with_capacity(n);
    for s in 0..n {
        let mut rows = Vec::with_capacity(mdp.n_actions());
        for a in 0..mdp.n_actions() {
            let p = mdp.row(s, a);
            if mdp.is_terminal(s) || eta == 0.0 {
                rows.push(p.to_vec());
                continue;
            }
            let target = random_distribution(n, rng);
            let dist: f64 = p.iter().zip(&target).map(|(x, y)| (x - y).abs()).sum();
            // Shrink slightly so renormalization cannot push the row past eta.
            let lambda = if dist > 0.0 { (eta * (1.0 - 1e-9) / dist).min(1.0) } else { 0.0 };
            let mixed: Vec<f64> = p.iter().zip(&target).map(|(x, y)| (1.0 - lambda) * x + lambda * y).collect();
            let total: f64 = mixed.iter().sum();
            rows.push(mixed.into_iter().map(|x| x / total).collect());
        }
        transition.push(rows);
        reward.push((0..mdp.n_actions()).map(|a| mdp.reward(s, a)).collect());
    }
    TabularMdp::new(transition, reward, mdp.terminal().to_vec(), mdp.reward_bound())
}

/// Search estimates `q_t` corrupted by `delta` against the optimal action:
/// the argmax is lowered by `delta` and every other action raised by `delta`.
pub fn adversarial_estimates(q_t_row: &[f64], delta: f64) -> Vec<f64> {
    let best = argmax(q_t_row);
    q_t_row
        .iter()
        .enumerate()
        .map(|(a, &q)| if a == best { q - delta } else { q + delta })
        .collect()
}

// ---------------------------------------------------------------------------
// Harnesses
// ---------------------------------------------------------------------------

/// Aggregate outcome of a randomized bound check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub bound: String,
    pub trials: usize,
    pub violations: usize,
    /// Largest observed quantity divided by its bound. Values above 1 are
    /// violations; values far below 1 show slack.
    pub max_ratio: f64,
    pub master_seed: u64,
    /// Seeds of the trials that violated the bound.
    pub seeds: Vec<u64>,
}

impl VerificationReport {
    fn from_samples(bound: &str, master_seed: u64, samples: impl IntoIterator<Item = (u64, f64, bool)>) -> Self {
        let mut report = VerificationReport {
            bound: bound.to_string(),
            trials: 0,
            violations: 0,
            max_ratio: 0.0,
            master_seed,
            seeds: Vec::new(),
        };
        for (seed, ratio, violated) in samples {
            report.trials += 1;
            if ratio.is_finite() {
                report.max_ratio = report.max_ratio.max(ratio);
            }
            if violated {
                report.violations += 1;
                report.seeds.push(seed);
            }
        }
        report
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn ratio(observed: f64, bound: f64) -> f64 {
    if bound > 0.0 {
        observed / bound
    } else if observed <= NUMERIC_SLACK {
        0.0
    } else {
        f64::INFINITY
    }
}

/// One random pair for the optimal-value drift bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSample {
    pub seed: u64,
    pub eta: f64,
    pub epsilon: f64,
    pub max_q_diff: f64,
    pub violated: bool,
}

/// Generate a random MDP and a perturbation with `eta <= eta_target`, solve
/// both and compare the optimal Q drift with `epsilon_bound`.
pub fn verify_theorem1_sample(
    n_states: usize,
    n_actions: usize,
    eta_target: f64,
    gamma: f64,
    seed: u64,
) -> Result<DriftSample> {
    let mut rng = rng_for(seed, &[]);
    let mdp0 = random_mdp(n_states, n_actions, 1.0, &mut rng)?;
    let mdpt = perturb_transitions(&mdp0, eta_target, &mut rng)?;
    theorem1_pair(&mdp0, &mdpt, gamma, seed)
}

/// Drift bound check on a given pair.
pub fn theorem1_pair(mdp0: &TabularMdp, mdpt: &TabularMdp, gamma: f64, seed: u64) -> Result<DriftSample> {
    let eta = compute_eta(mdp0, mdpt)?;
    let r = mdp0.reward_bound().max(mdpt.reward_bound());
    let epsilon = epsilon_bound(eta, r, gamma)?;
    let q0 = value_iteration(mdp0, gamma, DEFAULT_TOL)?;
    let qt = value_iteration(mdpt, gamma, DEFAULT_TOL)?;
    let max_q_diff = q0.max_abs_diff(&qt)?;
    Ok(DriftSample {
        seed,
        eta,
        epsilon,
        max_q_diff,
        violated: max_q_diff > epsilon + NUMERIC_SLACK,
    })
}

pub fn verify_theorem1_batch(
    trials: usize,
    max_states: usize,
    n_actions: usize,
    eta_target: f64,
    gamma: f64,
    master_seed: u64,
) -> Result<VerificationReport> {
    let ids: Vec<u64> = (0..trials as u64).collect();
    let samples = par_map(&ids, |&i| {
        let seed = derive_seed(master_seed, &[i]);
        let n_states = 2 + (seed % (max_states.max(2) as u64 - 1)) as usize;
        verify_theorem1_sample(n_states, n_actions, eta_target, gamma, seed)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::from_samples(
        "value drift: max|Q0 - Qt| <= gamma eta R / (1 - gamma)^2",
        master_seed,
        samples.iter().map(|s| (s.seed, ratio(s.max_q_diff, s.epsilon), s.violated)),
    ))
}

/// Exact quantities of one tabular pair used by the single-step checks.
struct SolvedPair {
    q0: QTable,
    qt: QTable,
    epsilon: f64,
}

fn solve_pair(mdp0: &TabularMdp, mdpt: &TabularMdp, gamma: f64) -> Result<SolvedPair> {
    let q0 = value_iteration(mdp0, gamma, DEFAULT_TOL)?;
    let qt = value_iteration(mdpt, gamma, DEFAULT_TOL)?;
    let epsilon = q0.max_abs_diff(&qt)?;
    Ok(SolvedPair { q0, qt, epsilon })
}

/// Results of the single-step selection soundness sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub current_gap: VerificationReport,
    pub stale_gap: VerificationReport,
    /// Instances where each check passed (the ones that can be counterexamples).
    pub current_gap_applicable: usize,
    pub stale_gap_applicable: usize,
    /// Instances skipped because the current gap was a tie.
    pub skipped_ties: usize,
}

/// One soundness instance: a random pair, a random state, alpha and delta.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoundnessSample {
    pub seed: u64,
    pub alpha: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub psi_0: f64,
    pub psi_t: f64,
    pub selected: usize,
    pub optimal: usize,
    pub current_gap: bool,
    pub stale_gap: bool,
}

/// Draw one instance. Returns `None` when the sampled state has tied values.
pub fn soundness_sample(seed: u64) -> Result<Option<SoundnessSample>> {
    let mut rng = rng_for(seed, &[]);
    let n_states = rng.random_range(2..=6);
    let gamma = 0.9;
    let mdp0 = random_mdp(n_states, 3, 1.0, &mut rng)?;
    let eta = rng.random_range(0.0..=1.0);
    let mdpt = perturb_transitions(&mdp0, eta, &mut rng)?;
    let solved = solve_pair(&mdp0, &mdpt, gamma)?;
    let s = rng.random_range(0..n_states);
    let alpha: f64 = rng.random_range(0.0..=1.0);
    let delta: f64 = rng.random_range(0.0..=0.5);
    let (q0_row, qt_row) = (solved.q0.row(s), solved.qt.row(s));
    let (psi_0, psi_t) = match (psi_gap_row(q0_row), psi_gap_row(qt_row)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(Error::Tie { .. }), _) | (_, Err(Error::Tie { .. })) => return Ok(None),
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let g_row = adversarial_estimates(qt_row, delta);
    let selected = pamcts_select(q0_row, &g_row, alpha)?;
    Ok(Some(SoundnessSample {
        seed,
        alpha,
        epsilon: solved.epsilon,
        delta,
        psi_0,
        psi_t,
        selected,
        optimal: argmax(qt_row),
        current_gap: theorem2_check(alpha, solved.epsilon, delta, psi_t),
        stale_gap: corollary22_check(alpha, solved.epsilon, delta, psi_0),
    }))
}

/// Whenever a check passes, the blended choice under worst-case search noise
/// must be the current optimal action.
pub fn verify_selection_soundness(trials: usize, master_seed: u64) -> Result<SoundnessReport> {
    let ids: Vec<u64> = (0..trials as u64).collect();
    let samples = par_map(&ids, |&i| soundness_sample(derive_seed(master_seed, &[i])))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let skipped_ties = samples.iter().filter(|s| s.is_none()).count();
    let solved: Vec<&SoundnessSample> = samples.iter().flatten().collect();
    let lhs = |s: &SoundnessSample| s.alpha * s.epsilon + (1.0 - s.alpha) * s.delta;
    let current_gap = VerificationReport::from_samples(
        "current-gap check => optimal action",
        master_seed,
        solved
            .iter()
            .filter(|s| s.current_gap)
            .map(|s| (s.seed, ratio(lhs(s), s.psi_t / 2.0), s.selected != s.optimal)),
    );
    let stale_gap = VerificationReport::from_samples(
        "stale-gap check => optimal action",
        master_seed,
        solved
            .iter()
            .filter(|s| s.stale_gap)
            .map(|s| (s.seed, ratio(lhs(s), s.psi_0 / 2.0 + s.epsilon), s.selected != s.optimal)),
    );
    Ok(SoundnessReport {
        current_gap_applicable: current_gap.trials,
        stale_gap_applicable: stale_gap.trials,
        current_gap,
        stale_gap,
        skipped_ties,
    })
}

/// Checks `psi_t <= psi_0 + 2 epsilon` at every untied state of random pairs.
pub fn verify_psi_relation_batch(trials: usize, master_seed: u64) -> Result<VerificationReport> {
    let ids: Vec<u64> = (0..trials as u64).collect();
    let samples = par_map(&ids, |&i| -> Result<Vec<(u64, f64, bool)>> {
        let seed = derive_seed(master_seed, &[i]);
        let mut rng = rng_for(seed, &[]);
        let n_states = rng.random_range(2..=6);
        let mdp0 = random_mdp(n_states, 3, 1.0, &mut rng)?;
        let mdpt = perturb_transitions(&mdp0, rng.random_range(0.0..=1.0), &mut rng)?;
        let solved = solve_pair(&mdp0, &mdpt, 0.9)?;
        let mut out = Vec::new();
        for s in 0..n_states {
            if let (Ok(p0), Ok(pt)) = (psi_gap_row(solved.q0.row(s)), psi_gap_row(solved.qt.row(s))) {
                let bound = psi_relation_bound(p0, solved.epsilon);
                out.push((seed, ratio(pt, bound), pt > bound + NUMERIC_SLACK));
            }
        }
        Ok(out)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::from_samples(
        "gap relation: psi_t <= psi_0 + 2 epsilon",
        master_seed,
        samples.into_iter().flatten(),
    ))
}

/// One regret-bound instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueGapSample {
    pub seed: u64,
    pub alpha: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub bound: f64,
    /// `max_s V*(s) - V^pi(s)` for the blended policy.
    pub max_gap: f64,
    pub violated: bool,
}

/// Follow the blended rule with stale values from `mdp0` and adversarially
/// corrupted exact values of `mdpt` as search estimates, evaluate the
/// resulting policy exactly on `mdpt` and compare the loss with
/// [`theorem3_bound`] at the exact `epsilon = max|Q0 - Qt|`.
pub fn verify_theorem3_sample(
    mdp0: &TabularMdp,
    mdpt: &TabularMdp,
    alpha: f64,
    delta: f64,
    gamma: f64,
    seed: u64,
) -> Result<ValueGapSample> {
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!("delta {delta} must be non-negative")));
    }
    let solved = solve_pair(mdp0, mdpt, gamma)?;
    let actions = (0..mdpt.n_states())
        .map(|s| pamcts_select(solved.q0.row(s), &adversarial_estimates(solved.qt.row(s), delta), alpha))
        .collect::<Result<Vec<_>>>()?;
    let v_pi = policy_evaluation(mdpt, &PolicyTable { actions }, gamma, DEFAULT_TOL)?;
    let v_star = solved.qt.state_values();
    let max_gap = v_star.iter().zip(&v_pi).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
    let bound = theorem3_bound(alpha, solved.epsilon, delta, gamma)?;
    Ok(ValueGapSample {
        seed,
        alpha,
        delta,
        epsilon: solved.epsilon,
        bound,
        max_gap,
        violated: max_gap > bound + NUMERIC_SLACK,
    })
}

pub fn verify_theorem3_batch(trials: usize, n_states: usize, gamma: f64, master_seed: u64) -> Result<VerificationReport> {
    let ids: Vec<u64> = (0..trials as u64).collect();
    let samples = par_map(&ids, |&i| {
        let seed = derive_seed(master_seed, &[i]);
        let mut rng = rng_for(seed, &[]);
        let mdp0 = random_mdp(n_states, 3, 1.0, &mut rng)?;
        let mdpt = perturb_transitions(&mdp0, rng.random_range(0.0..=1.0), &mut rng)?;
        let alpha = (rng.random_range(0..=4) as f64) / 4.0;
        let delta = rng.random_range(0.0..=1.0);
        verify_theorem3_sample(&mdp0, &mdpt, alpha, delta, gamma, seed)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::from_samples(
        "blended value gap: V* - V^pa <= 2 (alpha eps - alpha delta + delta) / (1 - gamma)",
        master_seed,
        samples.iter().map(|s| (s.seed, ratio(s.max_gap.max(0.0), s.bound), s.violated)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn current_gap_check_examples() {
        assert!(theorem2_check(0.5, 0.2, 0.2, 1.0));
        assert!(theorem2_check(0.3, 0.0, 0.0, 1e-6));
        assert!(!theorem2_check(1.0, 1.0, 0.0, 1.0));
    }

    #[test]
    fn stale_gap_check_examples() {
        assert!(corollary22_check(0.0, 5.0, 0.0, 0.1));
        assert!(corollary22_check(1.0, 7.0, 100.0, 0.1));
        assert!(!corollary22_check(0.0, 0.0, 2.0, 1.0));
        assert_eq!(psi_relation_bound(1.0, 0.0), 1.0);
        assert_eq!(psi_relation_bound(1.0, 0.25), 1.5);
    }

    #[test]
    fn alpha_range_examples() {
        assert_eq!(alpha_feasible_range(1.0, 0.0, 1.0).unwrap(), AlphaRange::All);
        assert_eq!(alpha_feasible_range(0.1, 0.1, 1.0).unwrap(), AlphaRange::All);
        // eps < delta: alpha >= 1 - 1 / (2 * 2) = 0.75
        assert_eq!(
            alpha_feasible_range(0.0, 2.0, 1.0).unwrap(),
            AlphaRange::Interval { lo: 0.75, hi: 1.0 }
        );
        assert_eq!(alpha_feasible_range(0.1, 0.1, -1.0).unwrap(), AlphaRange::None);
        assert!(alpha_feasible_range(f64::NAN, 0.1, 1.0).is_err());
    }

    #[test]
    fn certificate_examples() {
        assert_eq!(prop1_check(&[2.0, 0.0], &[0.0, 1.0], 0.9, 0.4).unwrap(), Certificate::GuaranteedBetter);
        assert_eq!(prop1_check(&[2.0, 0.0], &[0.0, 1.0], 0.9, 0.6).unwrap(), Certificate::Inconclusive);
        assert_eq!(prop1_check(&[2.0, 0.0], &[3.0, 1.0], 0.9, 0.6).unwrap(), Certificate::NotApplicable);
        assert_eq!(prop2_check(&[1.0, 0.0], &[0.0, 2.0], 0.1, 0.3).unwrap(), Certificate::GuaranteedBetter);
        assert_eq!(prop2_check(&[1.0, 0.0], &[0.0, 2.0], 0.1, 0.6).unwrap(), Certificate::Inconclusive);
        assert_eq!(prop2_check(&[1.0, 0.0], &[0.0, 2.0], 0.9, 0.6).unwrap(), Certificate::NotApplicable);
        assert!(matches!(prop1_check(&[1.0], &[0.0, 2.0], 0.1, 0.6), Err(Error::Shape(_))));
    }

    #[test]
    fn value_gap_bound_examples() {
        assert!((theorem3_bound(1.0, 0.3, 0.0, 0.9).unwrap() - 6.0).abs() < 1e-12);
        assert!((theorem3_bound(0.0, 0.3, 0.2, 0.9).unwrap() - 4.0).abs() < 1e-12);
        assert!((theorem3_bound(0.5, 1.0, 0.1, 0.9).unwrap() - 11.0).abs() < 1e-12);
        assert!(theorem3_bound(0.5, 1.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn perturbation_respects_eta() {
        let mut rng = rng_for(5, &[]);
        let m0 = random_mdp(5, 2, 1.0, &mut rng).unwrap();
        let mt = perturb_transitions(&m0, 0.3, &mut rng).unwrap();
        let eta = compute_eta(&m0, &mt).unwrap();
        assert!(eta <= 0.3 && eta > 0.29);
        assert_eq!(perturb_transitions(&m0, 0.0, &mut rng).unwrap(), m0);
    }

    #[test]
    fn adversarial_noise_shape() {
        assert_eq!(adversarial_estimates(&[1.0, 3.0, 2.0], 0.5), vec![1.5, 2.5, 2.5]);
    }
}
