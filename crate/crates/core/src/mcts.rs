//! UCT search over a generative model.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::GenerativeModel;
use crate::error::{Error, Result};
use crate::seed::SimRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UctConfig {
    pub iterations: usize,
    pub exploration: f64,
    pub max_depth: usize,
    pub gamma: f64,
}

impl Default for UctConfig {
    fn default() -> Self {
        Self {
            iterations: 500,
            exploration: 50.0,
            max_depth: 500,
            gamma: 0.99,
        }
    }
}

impl UctConfig {
    pub fn with_iterations(iterations: usize) -> Self {
        Self {
            iterations,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if self.max_depth == 0 {
            return Err(Error::Config("max_depth must be at least 1".into()));
        }
        if !(self.exploration >= 0.0 && self.exploration.is_finite()) {
            return Err(Error::Config(format!("exploration {} must be >= 0", self.exploration)));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::Config(format!("gamma {} outside [0, 1)", self.gamma)));
        }
        Ok(())
    }
}

/// UCB1 score. Unvisited edges score `+inf`.
pub fn ucb_score(edge_mean: f64, parent_visits: u64, edge_visits: u64, c: f64) -> f64 {
    if edge_visits == 0 {
        return f64::INFINITY;
    }
    if c == 0.0 {
        return edge_mean;
    }
    edge_mean + c * ((parent_visits as f64).ln() / edge_visits as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub visits: u64,
    pub value_sum: f64,
    /// Node ids of the sampled successors seen through this edge.
    pub children: Vec<usize>,
}

impl Edge {
    pub fn mean(&self) -> f64 {
        if self.visits == 0 {
            0.0
        } else {
            self.value_sum / self.visits as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node<S> {
    pub state: S,
    pub visits: u64,
    pub edges: Vec<Edge>,
}

/// Search statistics. Node 0 is the root; children are keyed by sampled
/// successor state.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchTree<S> {
    pub nodes: Vec<Node<S>>,
}

impl<S: Clone + PartialEq> SearchTree<S> {
    fn new_node(&mut self, state: S, n_actions: usize) -> usize {
        self.nodes.push(Node {
            state,
            visits: 0,
            edges: vec![
                Edge {
                    visits: 0,
                    value_sum: 0.0,
                    children: Vec::new(),
                };
                n_actions
            ],
        });
        self.nodes.len() - 1
    }

    fn select(&self, node: usize, c: f64) -> usize {
        let n = &self.nodes[node];
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (a, e) in n.edges.iter().enumerate() {
            let score = ucb_score(e.mean(), n.visits, e.visits, c);
            if score > best_score {
                best = a;
                best_score = score;
                if score == f64::INFINITY {
                    break;
                }
            }
        }
        best
    }

    pub fn root(&self) -> &Node<S> {
        &self.nodes[0]
    }

    /// Mean return per root action; unvisited actions report 0.
    pub fn root_estimates(&self) -> Vec<f64> {
        self.root().edges.iter().map(Edge::mean).collect()
    }

    pub fn root_visits(&self) -> Vec<u64> {
        self.root().edges.iter().map(|e| e.visits).collect()
    }
}

/// Per-action return estimates at the search root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub estimates: Vec<f64>,
    pub visits: Vec<u64>,
}

fn rollout<M: GenerativeModel>(
    model: &M,
    mut state: M::State,
    steps: usize,
    gamma: f64,
    rng: &mut SimRng,
) -> f64 {
    let n_actions = model.action_count();
    let mut total = 0.0;
    let mut discount = 1.0;
    for _ in 0..steps {
        let a = rng.random_range(0..n_actions);
        let t = model.sample_step(&state, a, rng);
        total += discount * t.reward;
        discount *= gamma;
        if t.done {
            break;
        }
        state = t.next;
    }
    total
}

/// Build a UCT tree rooted at `root` with exactly `config.iterations`
/// select/expand/rollout/backup cycles.
pub fn build_tree<M: GenerativeModel>(
    model: &M,
    root: &M::State,
    config: &UctConfig,
    rng: &mut SimRng,
) -> Result<SearchTree<M::State>> {
    config.validate()?;
    if model.is_terminal(root) {
        return Err(Error::Domain(format!("search root {root:?} is terminal")));
    }
    let n_actions = model.action_count();
    let mut tree = SearchTree { nodes: Vec::new() };
    tree.new_node(root.clone(), n_actions);
    let mut path: Vec<(usize, usize, f64)> = Vec::new();
    for _ in 0..config.iterations {
        path.clear();
        let mut node = 0;
        let mut leaf_value = 0.0;
        while path.len() < config.max_depth {
            let a = tree.select(node, config.exploration);
            let t = model.sample_step(&tree.nodes[node].state, a, rng);
            path.push((node, a, t.reward));
            if t.done {
                break;
            }
            let known = tree.nodes[node].edges[a]
                .children
                .iter()
                .copied()
                .find(|&c| tree.nodes[c].state == t.next);
            match known {
                Some(child) => node = child,
                None => {
                    let remaining = config.max_depth - path.len();
                    leaf_value = rollout(model, t.next.clone(), remaining, config.gamma, rng);
                    let child = tree.new_node(t.next, n_actions);
                    tree.nodes[node].edges[a].children.push(child);
                    break;
                }
            }
        }
        let mut ret = leaf_value;
        for &(n, a, r) in path.iter().rev() {
            ret = r + config.gamma * ret;
            let node = &mut tree.nodes[n];
            node.visits += 1;
            node.edges[a].visits += 1;
            node.edges[a].value_sum += ret;
        }
    }
    Ok(tree)
}

/// Run UCT from `root` and report the per-action estimates and visit counts.
pub fn mcts_search<M: GenerativeModel>(
    model: &M,
    root: &M::State,
    config: &UctConfig,
    rng: &mut SimRng,
) -> Result<SearchResult> {
    let tree = build_tree(model, root, config, rng)?;
    Ok(SearchResult {
        estimates: tree.root_estimates(),
        visits: tree.root_visits(),
    })
}

/// `max_a |q_exact[a] - estimates[a]|`.
pub fn empirical_delta(estimates: &[f64], q_exact: &[f64]) -> Result<f64> {
    if estimates.len() != q_exact.len() {
        return Err(Error::Shape(format!(
            "{} estimates vs {} exact values",
            estimates.len(),
            q_exact.len()
        )));
    }
    Ok(estimates
        .iter()
        .zip(q_exact)
        .map(|(g, q)| (g - q).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ucb_examples() {
        assert_eq!(ucb_score(0.7, 10, 3, 0.0), 0.7);
        assert_eq!(ucb_score(0.7, 10, 0, 1.0), f64::INFINITY);
        assert!((ucb_score(0.5, 100, 10, 1.0) - 1.178_6).abs() < 1e-4);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(empirical_delta(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!((empirical_delta(&[1.1, 2.0], &[1.0, 2.0]).unwrap() - 0.1).abs() < 1e-12);
        assert!(matches!(empirical_delta(&[1.0], &[1.0, 2.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn config_validation() {
        assert!(UctConfig::default().validate().is_ok());
        assert!(UctConfig::with_iterations(0).validate().is_err());
        let mut c = UctConfig::default();
        c.gamma = 1.0;
        assert!(c.validate().is_err());
    }
}
