//! Frozen Lake and Cliff Walking as tabular gridworlds.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{GenerativeModel, Transition};
use crate::error::{Error, Result};
use crate::mdp::TabularMdp;
use crate::seed::SimRng;

const DEFAULT_GRID_CAP: usize = 100;

fn default_grid_cap() -> usize {
    DEFAULT_GRID_CAP
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    Left,
    Down,
    Right,
    Up,
}

/// Frozen Lake action order: 0 left, 1 down, 2 right, 3 up.
const LAKE_ACTIONS: [Dir; 4] = [Dir::Left, Dir::Down, Dir::Right, Dir::Up];
/// Cliff Walking action order: 0 up, 1 right, 2 down, 3 left.
const CLIFF_ACTIONS: [Dir; 4] = [Dir::Up, Dir::Right, Dir::Down, Dir::Left];

fn shift(cell: usize, dir: Dir, width: usize, height: usize) -> usize {
    let (r, c) = (cell / width, cell % width);
    let (r, c) = match dir {
        Dir::Left => (r, c.saturating_sub(1)),
        Dir::Right => (r, (c + 1).min(width - 1)),
        Dir::Up => (r.saturating_sub(1), c),
        Dir::Down => ((r + 1).min(height - 1), c),
    };
    r * width + c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cell {
    Free,
    Hole,
    Goal,
}

#[derive(Debug, Clone, PartialEq)]
struct Outcome {
    next: usize,
    prob: f64,
    reward: f64,
    done: bool,
}

/// Frozen Lake layout and slip model.
///
/// `slip = [p_intended, p_perp1, p_perp2]`, where the perpendicular
/// directions of action `a` are `(a + 3) % 4` and `(a + 1) % 4` in the
/// left/down/right/up order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrozenLakeParams {
    pub width: usize,
    pub height: usize,
    pub start: usize,
    pub goal: usize,
    pub holes: Vec<usize>,
    pub slip: [f64; 3],
    #[serde(default = "default_grid_cap")]
    pub max_steps: usize,
}

impl FrozenLakeParams {
    /// 3x3 map: start 0, goal 8, holes 1 and 6.
    pub fn small(slip: [f64; 3]) -> Self {
        Self {
            width: 3,
            height: 3,
            start: 0,
            goal: 8,
            holes: vec![1, 6],
            slip,
            max_steps: DEFAULT_GRID_CAP,
        }
    }

    /// 4x4 map: start 10, goal 15, holes 5, 7 and 12.
    pub fn large(slip: [f64; 3]) -> Self {
        Self {
            width: 4,
            height: 4,
            start: 10,
            goal: 15,
            holes: vec![5, 7, 12],
            slip,
            max_steps: DEFAULT_GRID_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.width * self.height;
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidLayout("empty grid".into()));
        }
        let mut cells = vec![self.start, self.goal];
        cells.extend(&self.holes);
        if let Some(&c) = cells.iter().find(|&&c| c >= n) {
            return Err(Error::InvalidLayout(format!("cell {c} outside {n}-cell grid")));
        }
        let mut sorted = cells.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != cells.len() {
            return Err(Error::InvalidLayout("start, goal and holes must be distinct".into()));
        }
        if self.slip.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidLayout(format!("slip {:?} outside [0,1]", self.slip)));
        }
        let sum: f64 = self.slip.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidLayout(format!("slip {:?} sums to {sum}", self.slip)));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidLayout("max_steps must be positive".into()));
        }
        Ok(())
    }
}

/// Cliff Walking on the fixed 12x4 board: start 36, goal 47, cliff 37..=46.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliffWalkParams {
    pub slip_factor: f64,
    #[serde(default = "default_grid_cap")]
    pub max_steps: usize,
}

impl CliffWalkParams {
    pub const WIDTH: usize = 12;
    pub const HEIGHT: usize = 4;
    pub const START: usize = 36;
    pub const GOAL: usize = 47;
    pub const CLIFF: std::ops::RangeInclusive<usize> = 37..=46;

    pub fn new(slip_factor: f64) -> Self {
        Self {
            slip_factor,
            max_steps: DEFAULT_GRID_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.slip_factor) {
            return Err(Error::InvalidLayout(format!(
                "slip factor {} outside [0,1]",
                self.slip_factor
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidLayout("max_steps must be positive".into()));
        }
        Ok(())
    }
}

/// A finite gridworld with precompiled transition outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWorld {
    width: usize,
    height: usize,
    start: usize,
    cells: Vec<Cell>,
    outcomes: Vec<Vec<Vec<Outcome>>>,
    max_steps: usize,
}

impl GridWorld {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn n_states(&self) -> usize {
        self.cells.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_goal(&self, s: usize) -> bool {
        self.cells[s] == Cell::Goal
    }

    pub fn is_hole(&self, s: usize) -> bool {
        self.cells[s] == Cell::Hole
    }

    /// Assemble the outcome table from a per-(cell, action) list of
    /// `(destination, probability)` pairs.
    fn compile(
        width: usize,
        height: usize,
        start: usize,
        cells: Vec<Cell>,
        max_steps: usize,
        moves: impl Fn(usize, usize) -> Vec<(usize, f64)>,
    ) -> Self {
        let n = cells.len();
        let outcomes = (0..n)
            .map(|s| {
                (0..4)
                    .map(|a| {
                        if cells[s] != Cell::Free {
                            return vec![Outcome {
                                next: s,
                                prob: 1.0,
                                reward: 0.0,
                                done: true,
                            }];
                        }
                        let mut merged: Vec<Outcome> = Vec::new();
                        for (next, prob) in moves(s, a) {
                            if prob <= 0.0 {
                                continue;
                            }
                            if let Some(o) = merged.iter_mut().find(|o| o.next == next) {
                                o.prob += prob;
                            } else {
                                merged.push(Outcome {
                                    next,
                                    prob,
                                    reward: if cells[next] == Cell::Goal { 1.0 } else { 0.0 },
                                    done: cells[next] != Cell::Free,
                                });
                            }
                        }
                        merged
                    })
                    .collect()
            })
            .collect();
        Self {
            width,
            height,
            start,
            cells,
            outcomes,
            max_steps,
        }
    }
}

pub fn build_frozen_lake(params: &FrozenLakeParams) -> Result<GridWorld> {
    params.validate()?;
    let (w, h) = (params.width, params.height);
    let mut cells = vec![Cell::Free; w * h];
    for &hole in &params.holes {
        cells[hole] = Cell::Hole;
    }
    cells[params.goal] = Cell::Goal;
    let slip = params.slip;
    Ok(GridWorld::compile(w, h, params.start, cells, params.max_steps, |s, a| {
        [(a, slip[0]), ((a + 3) % 4, slip[1]), ((a + 1) % 4, slip[2])]
            .into_iter()
            .map(|(d, p)| (shift(s, LAKE_ACTIONS[d], w, h), p))
            .collect()
    }))
}

pub fn build_cliff_walk(params: &CliffWalkParams) -> Result<GridWorld> {
    params.validate()?;
    let (w, h) = (CliffWalkParams::WIDTH, CliffWalkParams::HEIGHT);
    let mut cells = vec![Cell::Free; w * h];
    for c in CliffWalkParams::CLIFF {
        cells[c] = Cell::Hole;
    }
    cells[CliffWalkParams::GOAL] = Cell::Goal;
    let slip = params.slip_factor;
    Ok(GridWorld::compile(w, h, CliffWalkParams::START, cells, params.max_steps, |s, a| {
        let dir = CLIFF_ACTIONS[a];
        let intended = shift(s, dir, w, h);
        if dir == Dir::Down {
            vec![(intended, 1.0)]
        } else {
            vec![(intended, 1.0 - slip), (shift(s, Dir::Down, w, h), slip)]
        }
    }))
}

impl GenerativeModel for GridWorld {
    type State = usize;

    fn action_count(&self) -> usize {
        4
    }

    fn initial_state(&self, _rng: &mut SimRng) -> usize {
        self.start
    }

    fn sample_step(&self, state: &usize, action: usize, rng: &mut SimRng) -> Transition<usize> {
        let row = &self.outcomes[*state][action];
        let pick = if row.len() == 1 {
            &row[0]
        } else {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            row.iter()
                .find(|o| {
                    acc += o.prob;
                    u < acc
                })
                .unwrap_or(&row[row.len() - 1])
        };
        Transition {
            next: pick.next,
            reward: pick.reward,
            done: pick.done,
        }
    }

    fn is_terminal(&self, state: &usize) -> bool {
        self.cells[*state] != Cell::Free
    }

    fn reward_bound(&self) -> f64 {
        1.0
    }

    fn episode_cap(&self) -> usize {
        self.max_steps
    }

    fn exact_mdp(&self) -> Option<TabularMdp> {
        let n = self.cells.len();
        let mut transition = vec![vec![vec![0.0; n]; 4]; n];
        let mut reward = vec![vec![0.0; 4]; n];
        for s in 0..n {
            for a in 0..4 {
                for o in &self.outcomes[s][a] {
                    transition[s][a][o.next] += o.prob;
                    reward[s][a] += o.prob * o.reward;
                }
            }
        }
        let terminal = (0..n).filter(|&s| self.cells[s] != Cell::Free).collect();
        TabularMdp::new(transition, reward, terminal, 1.0).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_for;

    const THIRD: f64 = 1.0 / 3.0;

    #[test]
    fn deterministic_lake_follows_intended_move() {
        let lake = build_frozen_lake(&FrozenLakeParams::small([1.0, 0.0, 0.0])).unwrap();
        let mut rng = rng_for(0, &[]);
        // 0 -> down -> 3, 3 -> right -> 4, 4 -> left -> 3, 2 -> up clamps.
        assert_eq!(lake.sample_step(&0, 1, &mut rng).next, 3);
        assert_eq!(lake.sample_step(&3, 2, &mut rng).next, 4);
        assert_eq!(lake.sample_step(&4, 0, &mut rng).next, 3);
        assert_eq!(lake.sample_step(&2, 3, &mut rng).next, 2);
        let t = lake.sample_step(&0, 2, &mut rng);
        assert_eq!((t.next, t.reward, t.done), (1, 0.0, true));
        let t = lake.sample_step(&5, 1, &mut rng);
        assert_eq!((t.next, t.reward, t.done), (8, 1.0, true));
    }

    #[test]
    fn uniform_slip_splits_three_ways() {
        let lake = build_frozen_lake(&FrozenLakeParams::small([THIRD; 3])).unwrap();
        let mdp = lake.exact_mdp().unwrap();
        // From 4, moving right: right to 5, perpendicular up to 1 and down to 7.
        let row = mdp.row(4, 2);
        for cell in [5, 1, 7] {
            assert!((row[cell] - THIRD).abs() < 1e-12);
        }
        // From 0 moving left: left clamps to 0, up clamps to 0, down to 3.
        let row = mdp.row(0, 0);
        assert!((row[0] - 2.0 * THIRD).abs() < 1e-12);
        assert!((row[3] - THIRD).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_layouts() {
        let mut p = FrozenLakeParams::small([1.0, 0.0, 0.0]);
        p.holes.push(8);
        assert!(matches!(build_frozen_lake(&p), Err(Error::InvalidLayout(_))));
        let mut p = FrozenLakeParams::small([0.5, 0.5, 0.5]);
        assert!(build_frozen_lake(&p).is_err());
        p.slip = [1.0, 0.0, 0.0];
        p.goal = 9;
        assert!(build_frozen_lake(&p).is_err());
        assert!(build_cliff_walk(&CliffWalkParams::new(1.5)).is_err());
    }

    #[test]
    fn cliff_layout() {
        let cliff = build_cliff_walk(&CliffWalkParams::new(0.0)).unwrap();
        let mut rng = rng_for(0, &[]);
        let t = cliff.sample_step(&36, 1, &mut rng);
        assert_eq!((t.next, t.reward, t.done), (37, 0.0, true));
        let t = cliff.sample_step(&35, 2, &mut rng);
        assert_eq!((t.next, t.reward, t.done), (47, 1.0, true));
        assert_eq!(cliff.sample_step(&36, 3, &mut rng).next, 36);
        assert_eq!(cliff.sample_step(&36, 0, &mut rng).next, 24);
    }

    #[test]
    fn cliff_slip_row() {
        let mdp = build_cliff_walk(&CliffWalkParams::new(0.3)).unwrap().exact_mdp().unwrap();
        let row = mdp.row(24, 1);
        assert!((row[36] - 0.3).abs() < 1e-12);
        assert!((row[25] - 0.7).abs() < 1e-12);
        // down never slips
        assert_eq!(mdp.row(24, 2)[36], 1.0);
    }

    #[test]
    fn deterministic_rows_draw_nothing() {
        use rand::RngCore;
        let lake = build_frozen_lake(&FrozenLakeParams::small([1.0, 0.0, 0.0])).unwrap();
        let mut a = rng_for(3, &[]);
        let mut b = rng_for(3, &[]);
        lake.sample_step(&0, 1, &mut a);
        assert_eq!(a.next_u64(), b.next_u64());
    }
}
