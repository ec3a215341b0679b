//! One-dimensional point-to-goal task sharing the locomotion reward shape.

use crate::env::{compute_reward, RewardState, RewardWeights};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::scalar::Real;

use super::{EnvStep, Environment};

/// A point on a line; the action is its velocity as a fraction of `max_speed`.
#[derive(Clone, Debug)]
pub struct PointGoalEnv<T> {
    pub goal: T,
    /// Displacement per step at full action.
    pub max_speed: T,
    pub horizon: usize,
    pub goal_radius: T,
    pub weights: RewardWeights<T>,
    x: T,
    t: usize,
}

impl<T: Real> PointGoalEnv<T> {
    pub fn new(goal: T, max_speed: T, horizon: usize, goal_radius: T) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::ZeroHorizon);
        }
        if !(max_speed > T::zero()) || !(goal_radius > T::zero()) {
            return Err(Error::InvalidParameter("speed and goal radius must be positive".into()));
        }
        Ok(Self {
            goal,
            max_speed,
            horizon,
            goal_radius,
            weights: RewardWeights {
                w1: T::one(),
                w2: T::one(),
                w3: T::zero(),
                w4: T::lit(-0.01),
                healthy: T::lit(0.01),
            },
            x: T::zero(),
            t: 0,
        })
    }

    pub fn position(&self) -> T {
        self.x
    }

    fn obs(&self) -> Vec<T> {
        vec![self.x, self.goal - self.x]
    }

    fn reward_state(&self) -> RewardState<T> {
        RewardState {
            position: Vec2::new(self.x, T::zero()),
            goal: Vec2::new(self.goal, T::zero()),
        }
    }
}

impl<T: Real> Default for PointGoalEnv<T> {
    fn default() -> Self {
        Self::new(T::lit(2.0), T::lit(0.1), 50, T::lit(0.05)).expect("defaults are valid")
    }
}

impl<T: Real> Environment<T> for PointGoalEnv<T> {
    fn obs_dim(&self) -> usize {
        2
    }

    fn action_dim(&self) -> usize {
        1
    }

    fn reset(&mut self, _seed: u64) -> Vec<T> {
        self.x = T::zero();
        self.t = 0;
        self.obs()
    }

    fn step(&mut self, action: &[T]) -> Result<EnvStep<T>> {
        if action.len() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: action.len(),
            });
        }
        let a = action[0].max(-T::one()).min(T::one());
        let prev = self.reward_state();
        self.x = self.x + self.max_speed * a;
        self.t += 1;
        let next = self.reward_state();
        let r = compute_reward(prev, next, &[a], &self.weights, true);
        let dist = (self.goal - self.x).abs();
        let reached = dist < self.goal_radius;
        Ok(EnvStep {
            obs: self.obs(),
            reward: r.total,
            done: reached || self.t >= self.horizon,
            terminal: reached,
            goal_distance: dist,
        })
    }
}
