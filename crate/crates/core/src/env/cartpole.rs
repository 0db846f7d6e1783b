//! Cart-pole balancing with classic-control dynamics.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{GenerativeModel, Transition};
use crate::error::{Error, Result};
use crate::seed::{rng_for, SimRng};

/// `(x, x_dot, theta, theta_dot)`.
pub type CartPoleState = [f64; 4];

const NOISE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CartPoleParams {
    pub gravity: f64,
    pub cart_mass: f64,
    pub pole_mass: f64,
    pub half_length: f64,
    pub force: f64,
    pub dt: f64,
    pub x_threshold: f64,
    pub theta_threshold: f64,
    pub max_steps: usize,
}

impl Default for CartPoleParams {
    fn default() -> Self {
        Self {
            gravity: 9.8,
            cart_mass: 1.0,
            pole_mass: 0.1,
            half_length: 0.5,
            force: 10.0,
            dt: 0.02,
            x_threshold: 2.4,
            theta_threshold: 12.0_f64.to_radians(),
            max_steps: 2500,
        }
    }
}

impl CartPoleParams {
    pub fn with_gravity(gravity: f64) -> Self {
        Self {
            gravity,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("cart_mass", self.cart_mass),
            ("pole_mass", self.pole_mass),
            ("half_length", self.half_length),
            ("dt", self.dt),
            ("x_threshold", self.x_threshold),
            ("theta_threshold", self.theta_threshold),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} = {v} must be positive")));
            }
        }
        if !self.gravity.is_finite() || !self.force.is_finite() || self.force < 0.0 {
            return Err(Error::Config("gravity and force must be finite, force >= 0".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn failed(&self, s: &CartPoleState) -> bool {
        s[0].abs() > self.x_threshold || s[2].abs() > self.theta_threshold
    }
}

/// One explicit Euler step. Action 0 pushes left, anything else right.
///
/// `done` reports threshold failure only; the step cap is enforced by the
/// episode runner.
pub fn cartpole_step(p: &CartPoleParams, s: &CartPoleState, action: usize) -> Transition<CartPoleState> {
    let [x, x_dot, theta, theta_dot] = *s;
    let force = if action == 0 { -p.force } else { p.force };
    let total_mass = p.cart_mass + p.pole_mass;
    let pole_ml = p.pole_mass * p.half_length;
    let (sin, cos) = theta.sin_cos();
    let temp = (force + pole_ml * theta_dot * theta_dot * sin) / total_mass;
    let theta_acc = (p.gravity * sin - cos * temp)
        / (p.half_length * (4.0 / 3.0 - p.pole_mass * cos * cos / total_mass));
    let x_acc = temp - pole_ml * theta_acc * cos / total_mass;
    let next = [
        x + p.dt * x_dot,
        x_dot + p.dt * x_acc,
        theta + p.dt * theta_dot,
        theta_dot + p.dt * theta_acc,
    ];
    Transition {
        done: p.failed(&next),
        next,
        reward: 1.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartPole {
    params: CartPoleParams,
}

impl CartPole {
    pub fn new(params: CartPoleParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &CartPoleParams {
        &self.params
    }
}

impl GenerativeModel for CartPole {
    type State = CartPoleState;

    fn action_count(&self) -> usize {
        2
    }

    fn initial_state(&self, rng: &mut SimRng) -> CartPoleState {
        std::array::from_fn(|_| rng.random_range(-0.05..0.05))
    }

    fn sample_step(&self, state: &CartPoleState, action: usize, _rng: &mut SimRng) -> Transition<CartPoleState> {
        cartpole_step(&self.params, state, action)
    }

    fn is_terminal(&self, state: &CartPoleState) -> bool {
        self.params.failed(state)
    }

    fn reward_bound(&self) -> f64 {
        1.0
    }

    fn episode_cap(&self) -> usize {
        self.params.max_steps
    }
}

/// Perception noise for a cart-pole planning model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisyModelSpec {
    pub base: CartPoleParams,
    #[serde(default)]
    pub gravity_sigma: f64,
    #[serde(default)]
    pub pole_mass_sigma: f64,
    pub seed: u64,
}

fn perceive(truth: f64, sigma: f64, rng: &mut SimRng) -> f64 {
    if sigma == 0.0 {
        return truth;
    }
    let draw = Normal::new(truth, sigma)
        .expect("sigma validated as finite and non-negative")
        .sample(rng);
    draw.max(NOISE_FLOOR * truth)
}

/// Build the planning model an agent would hold under noisy perception.
/// Each perturbed parameter is drawn once from `N(truth, sigma^2)`.
pub fn make_noisy_model(spec: &NoisyModelSpec) -> Result<CartPole> {
    for sigma in [spec.gravity_sigma, spec.pole_mass_sigma] {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!("noise sigma {sigma} must be >= 0")));
        }
    }
    let mut rng = rng_for(spec.seed, &[]);
    let mut params = spec.base.clone();
    params.gravity = perceive(params.gravity, spec.gravity_sigma, &mut rng);
    params.pole_mass = perceive(params.pole_mass, spec.pole_mass_sigma, &mut rng);
    CartPole::new(params)
}
