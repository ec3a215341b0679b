//! Planar kinematic model of the two-segment quadruped.
//!
//! The rear segment frame has its origin on the spine pivot with +x pointing
//! forward and +y to the left. The front segment frame shares the origin and
//! is rotated by the spine angle. Shoulder joints sweep each limb fore-aft in
//! the plane; leg joints only decide whether the foot touches the ground.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::{BodyPose, PlanarTransform, Vec2};
use crate::scalar::Real;

/// Index of the spinal joint in a 9-joint vector.
pub const SPINE: usize = 8;

/// Limbs in joint-vector order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Limb {
    FrontLeft,
    FrontRight,
    HindLeft,
    HindRight,
}

impl Limb {
    pub const ALL: [Limb; 4] = [Limb::FrontLeft, Limb::FrontRight, Limb::HindLeft, Limb::HindRight];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn shoulder(self) -> usize {
        2 * self.index()
    }

    pub fn leg(self) -> usize {
        2 * self.index() + 1
    }

    pub fn is_front(self) -> bool {
        matches!(self, Limb::FrontLeft | Limb::FrontRight)
    }

    pub fn is_left(self) -> bool {
        matches!(self, Limb::FrontLeft | Limb::HindLeft)
    }

    /// The limb on the other side of the body.
    pub fn mirrored(self) -> Limb {
        match self {
            Limb::FrontLeft => Limb::FrontRight,
            Limb::FrontRight => Limb::FrontLeft,
            Limb::HindLeft => Limb::HindRight,
            Limb::HindRight => Limb::HindLeft,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Limb::FrontLeft => "fl",
            Limb::FrontRight => "fr",
            Limb::HindLeft => "hl",
            Limb::HindRight => "hr",
        }
    }
}

/// Column names in joint order, e.g. for CSV headers.
pub fn joint_names(n_joints: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(n_joints);
    for limb in Limb::ALL {
        names.push(format!("{}_shoulder", limb.short_name()));
        names.push(format!("{}_leg", limb.short_name()));
    }
    if n_joints > SPINE {
        names.push("spine".into());
    }
    names
}

/// Joint angles in radians, ordered FL shoulder, FL leg, FR shoulder, FR leg,
/// HL shoulder, HL leg, HR shoulder, HR leg and optionally the spine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointVector<T>(Vec<T>);

impl<T: Real> JointVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("joint {bad} is not finite")));
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![T::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }

    /// The vector of the left-right mirrored robot: limbs swap sides and the
    /// spine angle flips sign.
    pub fn mirrored(&self) -> Self {
        let mut out = self.0.clone();
        for limb in Limb::ALL {
            let m = limb.mirrored();
            out[limb.shoulder()] = self.0[m.shoulder()];
            out[limb.leg()] = self.0[m.leg()];
        }
        if out.len() > SPINE {
            out[SPINE] = -self.0[SPINE];
        }
        Self(out)
    }
}

impl<T> Index<usize> for JointVector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for JointVector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

/// Closed joint interval in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointLimit<T> {
    pub min: T,
    pub max: T,
}

impl<T: Real> JointLimit<T> {
    pub fn symmetric(half: T) -> Self {
        Self { min: -half, max: half }
    }

    pub fn clamp(&self, v: T) -> T {
        v.max(self.min).min(self.max)
    }

    pub fn center(&self) -> T {
        (self.min + self.max) / T::lit(2.0)
    }

    pub fn half_range(&self) -> T {
        (self.max - self.min) / T::lit(2.0)
    }
}

/// Foot positions in the world plane and their ground-contact flags, in limb order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FootState<T> {
    pub positions: [Vec2<T>; 4],
    pub down: [bool; 4],
}

impl<T: Real> FootState<T> {
    pub fn stance_count(&self) -> usize {
        self.down.iter().filter(|d| **d).count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotModel<T> {
    n_joints: usize,
    has_spine: bool,
    body_half_length: T,
    /// Shoulder anchors in their own segment frame, limb order.
    shoulder_anchors: [Vec2<T>; 4],
    limb_length: T,
    /// A foot is in swing when its leg angle exceeds this.
    lift_threshold: T,
    joint_limits: Vec<JointLimit<T>>,
    action_limits: Vec<T>,
}

impl<T: Real> RobotModel<T> {
    /// Builds and validates a model. Anchors default to the segment ends.
    pub fn new(
        has_spine: bool,
        body_half_length: T,
        anchor_lateral: T,
        limb_length: T,
        lift_threshold: T,
        joint_limits: Vec<JointLimit<T>>,
        action_limits: Vec<T>,
    ) -> Result<Self> {
        let n_joints = if has_spine { 9 } else { 8 };
        for (name, v) in [("body_half_length", body_half_length), ("limb_length", limb_length)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::InvalidGeometry(format!("{name} must be positive, got {v}")));
            }
        }
        if !(anchor_lateral >= T::zero() && anchor_lateral.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "anchor_lateral must be non-negative, got {anchor_lateral}"
            )));
        }
        if joint_limits.len() != n_joints || action_limits.len() != n_joints {
            return Err(Error::JointCountMismatch {
                expected: n_joints,
                got: joint_limits.len().min(action_limits.len()),
            });
        }
        if let Some(j) = joint_limits.iter().position(|l| !(l.min < l.max)) {
            return Err(Error::InvalidParameter(format!(
                "joint {j} has an empty limit interval"
            )));
        }
        if let Some(j) = action_limits.iter().position(|a| !(*a > T::zero())) {
            return Err(Error::InvalidParameter(format!(
                "joint {j} action limit must be positive"
            )));
        }
        let l = body_half_length;
        let w = anchor_lateral;
        Ok(Self {
            n_joints,
            has_spine,
            body_half_length,
            shoulder_anchors: [Vec2::new(l, w), Vec2::new(l, -w), Vec2::new(-l, w), Vec2::new(-l, -w)],
            limb_length,
            lift_threshold,
            joint_limits,
            action_limits,
        })
    }

    pub fn n_joints(&self) -> usize {
        self.n_joints
    }

    pub fn has_spine(&self) -> bool {
        self.has_spine
    }

    pub fn body_half_length(&self) -> T {
        self.body_half_length
    }

    pub fn limb_length(&self) -> T {
        self.limb_length
    }

    pub fn lift_threshold(&self) -> T {
        self.lift_threshold
    }

    pub fn shoulder_anchor(&self, limb: Limb) -> Vec2<T> {
        self.shoulder_anchors[limb.index()]
    }

    pub fn joint_limits(&self) -> &[JointLimit<T>] {
        &self.joint_limits
    }

    pub fn action_limits(&self) -> &[T] {
        &self.action_limits
    }

    pub fn check_len(&self, q: &JointVector<T>) -> Result<()> {
        if q.len() == self.n_joints {
            Ok(())
        } else {
            Err(Error::JointCountMismatch {
                expected: self.n_joints,
                got: q.len(),
            })
        }
    }

    /// Spine angle, zero for the rigid body.
    pub fn spine_angle(&self, q: &JointVector<T>) -> T {
        if self.has_spine {
            q[SPINE]
        } else {
            T::zero()
        }
    }

    /// Neutral posture: every joint centred in its range.
    pub fn home_posture(&self) -> JointVector<T> {
        JointVector(self.joint_limits.iter().map(|l| l.clamp(T::zero())).collect())
    }

    /// Foot position of one limb in the rear-segment (body) frame.
    pub fn foot_in_body(&self, q: &JointVector<T>, limb: Limb) -> Vec2<T> {
        let anchor = self.shoulder_anchors[limb.index()];
        let (s, c) = q[limb.shoulder()].sin_cos();
        let side = if limb.is_left() { T::one() } else { -T::one() };
        let in_segment = anchor + Vec2::new(s, side * c) * self.limb_length;
        if limb.is_front() {
            in_segment.rotated(self.spine_angle(q))
        } else {
            in_segment
        }
    }

    pub fn foot_down(&self, q: &JointVector<T>, limb: Limb) -> bool {
        q[limb.leg()] <= self.lift_threshold
    }

    /// Feet in the body frame (identity pose).
    pub fn feet_in_body(&self, q: &JointVector<T>) -> Result<FootState<T>> {
        self.check_len(q)?;
        Ok(FootState {
            positions: Limb::ALL.map(|limb| self.foot_in_body(q, limb)),
            down: Limb::ALL.map(|limb| self.foot_down(q, limb)),
        })
    }

    pub fn forward_kinematics(&self, pose: &BodyPose<T>, q: &JointVector<T>) -> Result<FootState<T>> {
        let mut feet = self.feet_in_body(q)?;
        let tf: PlanarTransform<T> = pose.transform();
        for p in feet.positions.iter_mut() {
            *p = tf.apply(*p);
        }
        Ok(feet)
    }

    /// Moves each joint toward its request by at most its action limit, then
    /// clips to the joint range. Requests already reachable are returned as is.
    pub fn clamp_action(&self, current: &JointVector<T>, requested: &JointVector<T>) -> Result<JointVector<T>> {
        self.check_len(current)?;
        self.check_len(requested)?;
        let out = (0..self.n_joints)
            .map(|j| {
                let (cur, req, lim) = (current[j], requested[j], self.action_limits[j]);
                let delta = req - cur;
                let moved = if delta.abs() <= lim {
                    req
                } else {
                    cur + lim.copysign(delta)
                };
                self.joint_limits[j].clamp(moved)
            })
            .collect();
        Ok(JointVector(out))
    }
}

/// Builds the model described by a scenario. Torque-limited versions get the
/// smaller per-step displacement limit on shoulder and leg joints.
pub fn build_robot<T: Real>(config: &ScenarioConfig) -> Result<RobotModel<T>> {
    let g = &config.geometry;
    let has_spine = config.version.has_spine();
    let limb_rate = if config.version.torque_limited() {
        g.torque_limited_rate
    } else {
        g.free_rate
    };
    let mut joint_limits = Vec::with_capacity(9);
    let mut action_limits = Vec::with_capacity(9);
    for _ in Limb::ALL {
        joint_limits.push(JointLimit::symmetric(T::lit(g.shoulder_limit)));
        joint_limits.push(JointLimit::symmetric(T::lit(g.leg_limit)));
        action_limits.push(T::lit(limb_rate));
        action_limits.push(T::lit(limb_rate));
    }
    if has_spine {
        joint_limits.push(JointLimit::symmetric(T::lit(g.spine_limit)));
        action_limits.push(T::lit(g.spine_rate));
    }
    RobotModel::new(
        has_spine,
        T::lit(g.body_half_length),
        T::lit(g.anchor_lateral),
        T::lit(g.limb_length),
        T::lit(g.lift_threshold),
        joint_limits,
        action_limits,
    )
}
