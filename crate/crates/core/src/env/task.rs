//! Adapter exposing [`SimEnv`] to the learner with normalized actions.

use crate::config::{ControllerKind, ScenarioConfig};
use crate::error::{Error, Result};
use crate::gait::{joint_targets, GaitParams};
use crate::rl::{hybrid_targets, EnvStep, Environment};
use crate::robot::JointVector;
use crate::scalar::Real;

use super::SimEnv;

/// Which joints the learner commands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionMode {
    /// Every joint; action `a_j` in `[-1, 1]` maps linearly onto joint `j`'s range.
    AllJoints,
    /// Only the spine; limbs follow the open-loop gait.
    Spine,
    /// No learned input; the open-loop gait drives every joint.
    Gait,
}

impl ActionMode {
    pub fn for_controller(kind: ControllerKind) -> Self {
        match kind {
            ControllerKind::Policy => ActionMode::AllJoints,
            ControllerKind::Hybrid => ActionMode::Spine,
            ControllerKind::Hildebrand | ControllerKind::Cpg => ActionMode::Gait,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LocomotionTask<T> {
    env: SimEnv<T>,
    mode: ActionMode,
    gait: GaitParams<T>,
}

impl<T: Real> LocomotionTask<T> {
    pub fn new(env: SimEnv<T>, mode: ActionMode, gait: GaitParams<T>) -> Result<Self> {
        if mode == ActionMode::Spine && !env.model().has_spine() {
            return Err(Error::SpinelessHybrid);
        }
        Ok(Self { env, mode, gait })
    }

    /// Task for a scenario's version; `horizon` caps episode length when given.
    pub fn from_config(config: &ScenarioConfig, horizon: Option<usize>) -> Result<Self> {
        let mut env = SimEnv::from_config(config)?;
        if let Some(h) = horizon {
            if h == 0 {
                return Err(Error::ZeroHorizon);
            }
            env.settings_mut().horizon = h;
        }
        let mode = ActionMode::for_controller(config.version.controller());
        Self::new(env, mode, GaitParams::from_config(config)?)
    }

    pub fn env(&self) -> &SimEnv<T> {
        &self.env
    }

    pub fn mode(&self) -> ActionMode {
        self.mode
    }

    pub fn gait(&self) -> &GaitParams<T> {
        &self.gait
    }

    /// Joint targets for a normalized action at the next control instant.
    pub fn targets(&self, action: &[T]) -> Result<JointVector<T>> {
        map_action(self.mode, &self.gait, &self.env, action)
    }
}

/// Joint targets for a normalized action in `mode`, evaluated at the
/// environment's next control instant.
pub fn map_action<T: Real>(
    mode: ActionMode,
    gait: &GaitParams<T>,
    env: &SimEnv<T>,
    action: &[T],
) -> Result<JointVector<T>> {
    let model = env.model();
    let t_next = T::from_count(env.state().t + 1) * env.settings().dt;
    match mode {
        ActionMode::AllJoints => {
            if action.len() != model.n_joints() {
                return Err(Error::DimensionMismatch {
                    expected: model.n_joints(),
                    got: action.len(),
                });
            }
            let v = action
                .iter()
                .zip(model.joint_limits())
                .map(|(a, lim)| lim.center() + lim.half_range() * a.max(-T::one()).min(T::one()))
                .collect();
            JointVector::new(v)
        }
        ActionMode::Spine => {
            if action.len() != 1 {
                return Err(Error::DimensionMismatch {
                    expected: 1,
                    got: action.len(),
                });
            }
            hybrid_targets(gait, model, action[0], t_next)
        }
        ActionMode::Gait => joint_targets(gait, model, t_next),
    }
}

impl<T: Real> Environment<T> for LocomotionTask<T> {
    fn obs_dim(&self) -> usize {
        self.env.obs_dim()
    }

    fn action_dim(&self) -> usize {
        match self.mode {
            ActionMode::AllJoints => self.env.model().n_joints(),
            ActionMode::Spine => 1,
            ActionMode::Gait => 0,
        }
    }

    fn reset(&mut self, seed: u64) -> Vec<T> {
        self.env.reset(seed).as_slice().to_vec()
    }

    fn step(&mut self, action: &[T]) -> Result<EnvStep<T>> {
        let targets = self.targets(action)?;
        let r = self.env.step(&targets)?;
        Ok(EnvStep {
            terminal: r.info.unhealthy,
            obs: r.obs.as_slice().to_vec(),
            reward: r.reward,
            done: r.done,
            goal_distance: r.info.goal_distance,
        })
    }
}
