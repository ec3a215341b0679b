//! Soft actor-critic learner, its building blocks and the environment
//! interface it trains against.

pub mod checkpoint;
pub mod nn;
pub mod policy;
pub mod replay;
pub mod sac;
pub mod toy;
pub mod train;

pub use checkpoint::Checkpoint;
pub use nn::{Activation, Adam, DenseNet, GradTape, Gradients, LayerShape};
pub use policy::{discrete_entropy, squashed_sample, ActionScale, GaussianPolicyOutput, LOG_STD_MAX, LOG_STD_MIN};
pub use replay::{ReplayBuffer, SharedReplay, Transition};
pub use sac::{ActorGradient, LossReport, PolicySnapshot, SacAgent, SacConfig};
pub use toy::PointGoalEnv;
pub use train::{evaluate, random_policy_return, train, CurvePoint, LearningCurve, TrainConfig, CURVE_HEADER};

use crate::error::{Error, Result};
use crate::gait::{joint_targets, GaitParams};
use crate::robot::{JointVector, RobotModel, SPINE};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct EnvStep<T> {
    pub obs: Vec<T>,
    pub reward: T,
    /// Episode over for any reason, including timeout.
    pub done: bool,
    /// Episode over for a reason that should stop bootstrapping (not timeout).
    pub terminal: bool,
    pub goal_distance: T,
}

/// Episodic control problem with actions in `[-1, 1]^action_dim`.
pub trait Environment<T> {
    fn obs_dim(&self) -> usize;
    fn action_dim(&self) -> usize;
    fn reset(&mut self, seed: u64) -> Vec<T>;
    fn step(&mut self, action: &[T]) -> Result<EnvStep<T>>;
}

/// Deterministic map from observations to normalized actions.
pub trait Policy<T> {
    fn action_dim(&self) -> usize;
    fn act(&self, obs: &[T]) -> Result<Vec<T>>;
}

/// Limb joints from the open-loop gait at time `t`, spine from a normalized
/// command in `[-1, 1]` mapped onto the spine's range.
pub fn hybrid_targets<T: Real>(
    gait: &GaitParams<T>,
    model: &RobotModel<T>,
    spine_action: T,
    t: T,
) -> Result<JointVector<T>> {
    if !model.has_spine() {
        return Err(Error::SpinelessHybrid);
    }
    let mut q = joint_targets(gait, model, t)?;
    let lim = model.joint_limits()[SPINE];
    let a = spine_action.max(-T::one()).min(T::one());
    q[SPINE] = lim.clamp(lim.center() + lim.half_range() * a);
    Ok(q)
}

/// Joint targets for the gait-plus-learned-spine controller.
pub fn hybrid_controller<T: Real, P: Policy<T> + ?Sized>(
    gait: &GaitParams<T>,
    policy: &P,
    model: &RobotModel<T>,
    obs: &[T],
    t: T,
) -> Result<JointVector<T>> {
    if !model.has_spine() {
        return Err(Error::SpinelessHybrid);
    }
    if policy.action_dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: policy.action_dim(),
        });
    }
    let a = policy.act(obs)?;
    hybrid_targets(gait, model, a[0], t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{RobotVersion, ScenarioConfig};
    use crate::robot::build_robot;

    struct Fixed(f64);

    impl Policy<f64> for Fixed {
        fn action_dim(&self) -> usize {
            1
        }
        fn act(&self, _: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![self.0])
        }
    }

    fn setup(version: RobotVersion) -> (GaitParams<f64>, RobotModel<f64>) {
        let cfg = ScenarioConfig::for_version(version);
        (GaitParams::from_config(&cfg).unwrap(), build_robot(&cfg).unwrap())
    }

    #[test]
    fn zero_spine_command_keeps_limbs() {
        let (gait, model) = setup(RobotVersion::HildebrandSpineRl);
        for i in 0..50 {
            let t = i as f64 * 0.037;
            let pure = joint_targets(&gait, &model, t).unwrap();
            let a = hybrid_controller(&gait, &Fixed(0.0), &model, &[], t).unwrap();
            let b = hybrid_controller(&gait, &Fixed(0.9), &model, &[], t).unwrap();
            assert_eq!(a.len(), 9);
            for j in 0..SPINE {
                assert_eq!(a[j], pure[j]);
                assert_eq!(b[j], pure[j]);
            }
            assert!(b[SPINE] > a[SPINE]);
        }
    }

    #[test]
    fn spineless_model_is_rejected() {
        let (gait, model) = setup(RobotVersion::Rl8);
        assert!(matches!(
            hybrid_controller(&gait, &Fixed(0.0), &model, &[], 0.0),
            Err(Error::SpinelessHybrid)
        ));
    }
}
