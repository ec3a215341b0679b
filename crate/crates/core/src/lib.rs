//! Planar salamander-robot locomotion workbench.
//!
//! A kinematic quadruped with an optional spinal joint walks on a plane
//! under a stance-anchor contact model. Joint targets come from an open-loop
//! Hildebrand gait, a Hopf-oscillator CPG, a soft actor-critic policy, or the
//! gait with a learned spine. The [`eval`] module runs the robot versions over
//! seeds and reports distance-to-goal, time-to-goal and lateral drift.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the bottom of this file fix the scalar type.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod cpg;
pub mod env;
pub mod error;
pub mod eval;
pub mod gait;
pub mod geometry;
pub mod ode;
pub mod rl;
pub mod robot;
pub mod scalar;

pub use config::{ControllerKind, DyMode, KvFile, RobotVersion, ScenarioConfig};
pub use cpg::{CpgNetwork, HopfParams};
pub use env::{LocomotionTask, SimEnv, SimState};
pub use error::{Error, Result};
pub use gait::{joint_targets, GaitParams};
pub use geometry::{BodyPose, PlanarTransform, Vec2};
pub use rl::{DenseNet, Environment, Policy, SacAgent, SacConfig};
pub use robot::{JointVector, RobotModel};
pub use scalar::Real;

pub type Vec2f64 = Vec2<f64>;
pub type BodyPose64 = BodyPose<f64>;
pub type RobotModel64 = RobotModel<f64>;
pub type RobotModel32 = RobotModel<f32>;
pub type JointVector64 = JointVector<f64>;
pub type GaitParams64 = GaitParams<f64>;
pub type GaitParams32 = GaitParams<f32>;
pub type CpgNetwork64 = CpgNetwork<f64>;
pub type CpgNetwork32 = CpgNetwork<f32>;
pub type SimEnv64 = SimEnv<f64>;
pub type SimEnv32 = SimEnv<f32>;
pub type LocomotionTask64 = LocomotionTask<f64>;
pub type DenseNet64 = DenseNet<f64>;
pub type DenseNet32 = DenseNet<f32>;
pub type SacAgent64 = SacAgent<f64>;
pub type SacAgent32 = SacAgent<f32>;
