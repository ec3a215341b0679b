//! Closed-loop joint-target sources the harness can run.

use crate::config::{ControllerKind, ScenarioConfig};
use crate::cpg::CpgNetwork;
use crate::env::{map_action, ActionMode, Observation, SimEnv};
use crate::error::{Error, Result};
use crate::gait::{joint_targets, GaitParams};
use crate::rl::{hybrid_controller, Policy};
use crate::robot::{build_robot, JointVector};
use crate::scalar::Real;

/// Produces the next joint targets from the environment's current state.
pub trait Controller<T> {
    /// Restores any internal state to its value at episode start.
    fn reset(&mut self) {}
    fn targets(&mut self, env: &SimEnv<T>) -> Result<JointVector<T>>;
}

fn next_time<T: Real>(env: &SimEnv<T>) -> T {
    T::from_count(env.state().t + 1) * env.settings().dt
}

/// Open-loop Hildebrand gait.
#[derive(Clone, Debug)]
pub struct GaitController<T> {
    pub gait: GaitParams<T>,
}

impl<T: Real> Controller<T> for GaitController<T> {
    fn targets(&mut self, env: &SimEnv<T>) -> Result<JointVector<T>> {
        joint_targets(&self.gait, env.model(), next_time(env))
    }
}

/// Learned policy over all joints, or over the spine with the gait driving
/// the limbs.
#[derive(Clone, Debug)]
pub struct PolicyController<T, P> {
    pub policy: P,
    pub mode: ActionMode,
    pub gait: GaitParams<T>,
}

impl<T: Real, P: Policy<T>> Controller<T> for PolicyController<T, P> {
    fn targets(&mut self, env: &SimEnv<T>) -> Result<JointVector<T>> {
        let obs = Observation::from_state(env.state());
        match self.mode {
            ActionMode::Spine => {
                hybrid_controller(&self.gait, &self.policy, env.model(), obs.as_slice(), next_time(env))
            }
            mode => {
                let a = self.policy.act(obs.as_slice())?;
                map_action(mode, &self.gait, env, &a)
            }
        }
    }
}

/// Hopf CPG network integrated alongside the environment.
#[derive(Clone, Debug)]
pub struct CpgController<T> {
    initial: CpgNetwork<T>,
    net: CpgNetwork<T>,
    substeps: usize,
}

impl<T: Real> CpgController<T> {
    pub fn new(net: CpgNetwork<T>, substeps: usize) -> Result<Self> {
        if substeps == 0 {
            return Err(Error::InvalidParameter("CPG substeps must be positive".into()));
        }
        Ok(Self {
            initial: net.clone(),
            net,
            substeps,
        })
    }

    pub fn network(&self) -> &CpgNetwork<T> {
        &self.net
    }
}

impl<T: Real> Controller<T> for CpgController<T> {
    fn reset(&mut self) {
        self.net = self.initial.clone();
    }

    fn targets(&mut self, env: &SimEnv<T>) -> Result<JointVector<T>> {
        let h = env.settings().dt / T::from_count(self.substeps);
        for _ in 0..self.substeps {
            self.net.advance(h)?;
        }
        self.net.cpg_to_joints(env.model())
    }
}

/// Holds the current posture.
#[derive(Clone, Copy, Debug, Default)]
pub struct StationaryController;

impl<T: Real> Controller<T> for StationaryController {
    fn targets(&mut self, env: &SimEnv<T>) -> Result<JointVector<T>> {
        Ok(env.state().q.clone())
    }
}

/// Controller for a scenario's version. Learned versions need `policy`.
pub fn controller_for<T, P>(config: &ScenarioConfig, policy: Option<P>) -> Result<Box<dyn Controller<T>>>
where
    T: Real,
    P: Policy<T> + 'static,
{
    let kind = config.version.controller();
    let gait = GaitParams::from_config(config)?;
    match kind {
        ControllerKind::Hildebrand => Ok(Box::new(GaitController { gait })),
        ControllerKind::Cpg => {
            let model = build_robot(config)?;
            Ok(Box::new(CpgController::new(
                CpgNetwork::from_config(config, &model)?,
                config.cpg.substeps,
            )?))
        }
        ControllerKind::Policy | ControllerKind::Hybrid => {
            let policy = policy.ok_or_else(|| {
                Error::InvalidParameter(format!("version `{}` needs a trained policy", config.version.id()))
            })?;
            Ok(Box::new(PolicyController {
                policy,
                mode: ActionMode::for_controller(kind),
                gait,
            }))
        }
    }
}
