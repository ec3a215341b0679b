//! Deterministic kinematic goal-reaching environment.
//!
//! Feet on the ground stay pinned to their world anchors; each step the body
//! pose is the least-squares rigid fit that keeps the pinned feet where they
//! are, given the new joint configuration. A foot that lands is pinned where
//! it touches down.

mod motion;
mod reward;
mod task;

pub use motion::{fit_residual, solve_base_motion, BaseMotion};
pub use reward::{compute_reward, RewardState, RewardTerms, RewardWeights};
pub use task::{map_action, ActionMode, LocomotionTask};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::{BodyPose, Vec2};
use crate::robot::{build_robot, JointVector, RobotModel};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvSettings<T> {
    /// Control period, seconds.
    pub dt: T,
    pub horizon: usize,
    pub goal: Vec2<T>,
    /// Half-width of the uniform per-axis goal jitter applied at reset.
    pub goal_jitter: T,
    pub goal_radius: T,
}

impl<T: Real> EnvSettings<T> {
    pub fn from_config(config: &ScenarioConfig) -> Result<Self> {
        let e = &config.env;
        if !(e.dt > 0.0) {
            return Err(Error::NonPositiveStep(e.dt));
        }
        if e.horizon == 0 {
            return Err(Error::ZeroHorizon);
        }
        if !(e.goal_radius > 0.0) || !(e.goal_jitter >= 0.0) {
            return Err(Error::InvalidParameter(
                "goal radius must be positive and jitter non-negative".into(),
            ));
        }
        Ok(Self {
            dt: T::lit(e.dt),
            horizon: e.horizon,
            goal: Vec2::new(T::lit(e.goal_x), T::lit(e.goal_y)),
            goal_jitter: T::lit(e.goal_jitter),
            goal_radius: T::lit(e.goal_radius),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimState<T> {
    pub pose: BodyPose<T>,
    pub q: JointVector<T>,
    pub q_prev: JointVector<T>,
    pub goal: Vec2<T>,
    /// Steps taken since reset.
    pub t: usize,
    /// World anchor of every foot currently on the ground, limb order.
    pub anchors: [Option<Vec2<T>>; 4],
}

impl<T: Real> SimState<T> {
    pub fn goal_distance(&self) -> T {
        (self.goal - self.pose.position()).norm()
    }

    fn reward_view(&self) -> RewardState<T> {
        RewardState {
            position: self.pose.position(),
            goal: self.goal,
        }
    }

    pub fn stance_mask(&self) -> [bool; 4] {
        self.anchors.map(|a| a.is_some())
    }
}

/// RL-facing view of the state: joint angles, joint velocities (rad/step),
/// heading sin/cos, goal vector in the body frame, goal distance and lateral
/// offset. Length `2 n + 6`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation<T>(Vec<T>);

impl<T: Real> Observation<T> {
    pub fn len_for(n_joints: usize) -> usize {
        2 * n_joints + 6
    }

    pub fn from_state(state: &SimState<T>) -> Self {
        let n = state.q.len();
        let mut v = Vec::with_capacity(Self::len_for(n));
        v.extend_from_slice(state.q.as_slice());
        v.extend(state.q.iter().zip(state.q_prev.iter()).map(|(a, b)| *a - *b));
        let (s, c) = state.pose.theta.sin_cos();
        v.push(s);
        v.push(c);
        let goal_body = state.pose.to_body(state.goal);
        v.push(goal_body.x);
        v.push(goal_body.y);
        v.push(state.goal_distance());
        v.push(state.pose.y);
        Self(v)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepInfo<T> {
    pub reward: RewardTerms<T>,
    pub goal_distance: T,
    /// Smallest goal distance seen since reset.
    pub mdb_so_far: T,
    pub goal_reached: bool,
    pub timeout: bool,
    /// No foot on the ground, or heading beyond +-pi/2.
    pub unhealthy: bool,
    pub stance: [bool; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepResult<T> {
    pub obs: Observation<T>,
    pub reward: T,
    pub done: bool,
    pub info: StepInfo<T>,
}

impl<T: Real> StepResult<T> {
    /// True when the episode ended for a reason other than running out of time.
    pub fn terminal(&self) -> bool {
        self.info.goal_reached || self.info.unhealthy
    }
}

#[derive(Clone, Debug)]
pub struct SimEnv<T> {
    model: RobotModel<T>,
    settings: EnvSettings<T>,
    weights: RewardWeights<T>,
    state: SimState<T>,
    mdb: T,
}

impl<T: Real> SimEnv<T> {
    pub fn new(model: RobotModel<T>, settings: EnvSettings<T>, weights: RewardWeights<T>) -> Self {
        let home = model.home_posture();
        let state = SimState {
            pose: BodyPose::origin(),
            q: home.clone(),
            q_prev: home,
            goal: settings.goal,
            t: 0,
            anchors: [None; 4],
        };
        let mut env = Self {
            model,
            settings,
            weights,
            state,
            mdb: T::infinity(),
        };
        env.reset_with_goal(env.settings.goal);
        env
    }

    pub fn from_config(config: &ScenarioConfig) -> Result<Self> {
        Ok(Self::new(
            build_robot(config)?,
            EnvSettings::from_config(config)?,
            RewardWeights::from_config(&config.reward),
        ))
    }

    pub fn model(&self) -> &RobotModel<T> {
        &self.model
    }

    pub fn settings(&self) -> &EnvSettings<T> {
        &self.settings
    }

    pub fn settings_mut(&mut self) -> &mut EnvSettings<T> {
        &mut self.settings
    }

    pub fn weights(&self) -> &RewardWeights<T> {
        &self.weights
    }

    pub fn state(&self) -> &SimState<T> {
        &self.state
    }

    pub fn obs_dim(&self) -> usize {
        Observation::<T>::len_for(self.model.n_joints())
    }

    /// Simulated time of the current state, seconds.
    pub fn time(&self) -> T {
        T::from_count(self.state.t) * self.settings.dt
    }

    /// Body at the origin heading +x, joints at the neutral posture, every
    /// foot pinned where it stands. The goal gets seeded jitter when enabled.
    pub fn reset(&mut self, seed: u64) -> Observation<T> {
        let mut goal = self.settings.goal;
        let j = self.settings.goal_jitter.as_f64();
        if j > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            goal.x = goal.x + T::lit(rng.random_range(-j..=j));
            goal.y = goal.y + T::lit(rng.random_range(-j..=j));
        }
        self.reset_with_goal(goal)
    }

    /// Reset with an explicit goal, bypassing jitter.
    pub fn reset_with_goal(&mut self, goal: Vec2<T>) -> Observation<T> {
        let home = self.model.home_posture();
        let pose = BodyPose::origin();
        let feet = self
            .model
            .forward_kinematics(&pose, &home)
            .expect("home posture sized for the model");
        let anchors = std::array::from_fn(|i| feet.down[i].then_some(feet.positions[i]));
        self.state = SimState {
            pose,
            q: home.clone(),
            q_prev: home,
            goal,
            t: 0,
            anchors,
        };
        self.mdb = self.state.goal_distance();
        Observation::from_state(&self.state)
    }

    /// Applies one joint-target action.
    pub fn step(&mut self, action: &JointVector<T>) -> Result<StepResult<T>> {
        self.model.check_len(action)?;
        let prev = self.state.clone();
        let q_new = self.model.clamp_action(&prev.q, action)?;
        let feet_old = self.model.feet_in_body(&prev.q)?;
        let feet_new = self.model.feet_in_body(&q_new)?;

        let airborne = feet_new.stance_count() == 0;
        let mut anchored = Vec::with_capacity(4);
        let mut moved = Vec::with_capacity(4);
        let mut any_motion = false;
        for i in 0..4 {
            if let (Some(anchor), true) = (prev.anchors[i], feet_new.down[i]) {
                anchored.push(prev.pose.to_body(anchor));
                moved.push(feet_new.positions[i]);
                any_motion |= feet_new.positions[i] != feet_old.positions[i];
            }
        }
        // Pinned feet that did not move relative to the body leave the previous
        // least-squares optimum unchanged.
        let pose = if airborne || anchored.is_empty() || !any_motion {
            prev.pose
        } else {
            let fit = solve_base_motion(&anchored, &moved)?;
            BodyPose::from_transform(&prev.pose.transform().compose(&fit.transform))
        };

        let anchors = std::array::from_fn(|i| {
            if !feet_new.down[i] {
                None
            } else {
                prev.anchors[i].or_else(|| Some(pose.to_world(feet_new.positions[i])))
            }
        });

        self.state = SimState {
            pose,
            q: q_new,
            q_prev: prev.q.clone(),
            goal: prev.goal,
            t: prev.t + 1,
            anchors,
        };

        let flipped = pose.theta.abs() > T::FRAC_PI_2();
        let unhealthy = airborne || flipped;
        let reward = compute_reward(
            prev.reward_view(),
            self.state.reward_view(),
            action.as_slice(),
            &self.weights,
            !unhealthy,
        );
        let goal_distance = self.state.goal_distance();
        self.mdb = self.mdb.min(goal_distance);
        let goal_reached = goal_distance < self.settings.goal_radius;
        let timeout = self.state.t >= self.settings.horizon;
        Ok(StepResult {
            obs: Observation::from_state(&self.state),
            reward: reward.total,
            done: goal_reached || timeout || unhealthy,
            info: StepInfo {
                reward,
                goal_distance,
                mdb_so_far: self.mdb,
                goal_reached,
                timeout,
                unhealthy,
                stance: self.state.stance_mask(),
            },
        })
    }
}
