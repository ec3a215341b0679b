//! Composite locomotion reward `w1 dx + w2 dd + w3 dy + w4 C + H`.

use serde::{Deserialize, Serialize};

use crate::config::RewardConfig;
use crate::geometry::Vec2;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights<T> {
    pub w1: T,
    pub w2: T,
    pub w3: T,
    pub w4: T,
    /// Constant per-step bonus while the robot stays healthy.
    pub healthy: T,
}

impl<T: Real> RewardWeights<T> {
    pub fn from_config(c: &RewardConfig) -> Self {
        Self {
            w1: T::lit(c.w1),
            w2: T::lit(c.w2),
            w3: T::lit(c.w3),
            w4: T::lit(c.w4),
            healthy: T::lit(c.healthy),
        }
    }
}

impl<T: Real> Default for RewardWeights<T> {
    fn default() -> Self {
        Self::from_config(&RewardConfig::default())
    }
}

/// Raw reward inputs and the five weighted terms that sum to `total`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardTerms<T> {
    /// Forward displacement `x_next - x_prev`.
    pub dx: T,
    /// Goal approach `dist_prev - dist_next`, positive when closing in.
    pub dd: T,
    /// Lateral drift growth `|y_next| - |y_prev|`.
    pub dy: T,
    /// Control cost `sum a_j^2`.
    pub control: T,
    /// `[w1 dx, w2 dd, w3 dy, w4 C, H]`.
    pub weighted: [T; 5],
    pub total: T,
}

/// Minimal view of a state the reward needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RewardState<T> {
    pub position: Vec2<T>,
    pub goal: Vec2<T>,
}

/// Evaluates the reward for one transition. `H` is only paid while `healthy`.
pub fn compute_reward<T: Real>(
    prev: RewardState<T>,
    next: RewardState<T>,
    action: &[T],
    w: &RewardWeights<T>,
    healthy: bool,
) -> RewardTerms<T> {
    let dx = next.position.x - prev.position.x;
    let dd = (prev.goal - prev.position).norm() - (next.goal - next.position).norm();
    let dy = next.position.y.abs() - prev.position.y.abs();
    let control: T = action.iter().map(|a| *a * *a).sum();
    let h = if healthy { w.healthy } else { T::zero() };
    let weighted = [w.w1 * dx, w.w2 * dd, w.w3 * dy, w.w4 * control, h];
    let total = weighted[0] + weighted[1] + weighted[2] + weighted[3] + weighted[4];
    RewardTerms {
        dx,
        dd,
        dy,
        control,
        weighted,
        total,
    }
}
