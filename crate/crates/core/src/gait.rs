//! Open-loop Hildebrand gait: every limb follows the same periodic joint
//! profile, shifted by a fixed phase lag, and spends a `duty` fraction of the
//! cycle on the ground.
//!
//! Per limb, with local phase `p`:
//! - stance (`p < duty`): the shoulder retracts linearly from `+A` to `-A`
//!   and the leg stays at zero;
//! - swing: the shoulder returns linearly from `-A` to `+A` while the leg is
//!   raised to the lift amplitude, with half-cosine blends at both ends.

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::robot::{JointVector, Limb, RobotModel, SPINE};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaitParams<T> {
    /// Seconds per cycle.
    pub period: T,
    /// Stance fraction.
    pub duty: T,
    /// Phase lag of each limb, FL, FR, HL, HR.
    pub limb_offsets: [T; 4],
    pub shoulder_amplitude: T,
    pub lift_amplitude: T,
    pub spine_amplitude: T,
    pub spine_phase: T,
    /// Fraction of the swing taken by each lift/lower blend.
    pub lift_blend: T,
}

impl<T: Real> Default for GaitParams<T> {
    /// Lateral-sequence walk at 75% duty.
    fn default() -> Self {
        Self {
            period: T::one(),
            duty: T::lit(0.75),
            limb_offsets: [T::lit(0.25), T::lit(0.75), T::zero(), T::lit(0.5)],
            shoulder_amplitude: T::lit(0.5),
            lift_amplitude: T::lit(0.4),
            spine_amplitude: T::lit(0.3),
            spine_phase: T::zero(),
            lift_blend: T::lit(0.2),
        }
    }
}

impl<T: Real> GaitParams<T> {
    pub fn from_config(config: &ScenarioConfig) -> Result<Self> {
        let g = &config.gait;
        let params = Self {
            period: T::lit(g.period),
            duty: T::lit(g.duty),
            limb_offsets: g.offsets.map(T::lit),
            shoulder_amplitude: T::lit(g.shoulder_amplitude),
            lift_amplitude: T::lit(g.lift_amplitude),
            spine_amplitude: T::lit(g.spine_amplitude),
            spine_phase: T::lit(g.spine_phase),
            lift_blend: T::lit(g.lift_blend),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.period > T::zero()) {
            return bad(format!("gait period must be positive, got {}", self.period));
        }
        if !(self.duty > T::zero() && self.duty < T::one()) {
            return bad(format!("duty must lie in (0, 1), got {}", self.duty));
        }
        for o in self.limb_offsets.iter().chain([&self.spine_phase]) {
            if !(*o >= T::zero() && *o < T::one()) {
                return bad(format!("phase offsets must lie in [0, 1), got {o}"));
            }
        }
        for a in [self.shoulder_amplitude, self.lift_amplitude, self.spine_amplitude] {
            if !(a >= T::zero() && a.is_finite()) {
                return bad(format!("amplitudes must be non-negative, got {a}"));
            }
        }
        if !(self.lift_blend >= T::zero() && self.lift_blend <= T::lit(0.5)) {
            return bad(format!("lift_blend must lie in [0, 0.5], got {}", self.lift_blend));
        }
        Ok(())
    }

    /// The same gait on the left-right mirrored robot.
    pub fn mirrored(&self) -> Self {
        let mut out = self.clone();
        for limb in Limb::ALL {
            out.limb_offsets[limb.index()] = self.limb_offsets[limb.mirrored().index()];
        }
        out.spine_phase = (self.spine_phase + T::lit(0.5)).wrap_unit();
        out
    }
}

/// Cycle phase in `[0, 1)` at time `t`.
pub fn global_phase<T: Real>(t: T, params: &GaitParams<T>) -> T {
    (t / params.period).wrap_unit()
}

/// Phase of one limb, lagging the global phase by its offset.
pub fn limb_phase<T: Real>(global: T, limb: Limb, params: &GaitParams<T>) -> T {
    (global - params.limb_offsets[limb.index()]).wrap_unit()
}

/// Stance iff `local < duty`; the boundary itself belongs to swing.
pub fn is_stance<T: Real>(local: T, duty: T) -> bool {
    local < duty
}

/// Shoulder angle at a local phase.
pub fn shoulder_profile<T: Real>(local: T, params: &GaitParams<T>) -> T {
    let a = params.shoulder_amplitude;
    let two = T::lit(2.0);
    if is_stance(local, params.duty) {
        a - two * a * local / params.duty
    } else {
        -a + two * a * (local - params.duty) / (T::one() - params.duty)
    }
}

/// Leg lift at a local phase: zero in stance, a plateau in mid swing.
pub fn lift_profile<T: Real>(local: T, params: &GaitParams<T>) -> T {
    if is_stance(local, params.duty) {
        return T::zero();
    }
    let s = (local - params.duty) / (T::one() - params.duty);
    let blend = params.lift_blend;
    let h = params.lift_amplitude;
    let half_cos = |u: T| h * (T::one() - (T::PI() * u).cos()) / T::lit(2.0);
    if blend > T::zero() && s < blend {
        half_cos(s / blend)
    } else if blend > T::zero() && s > T::one() - blend {
        half_cos((T::one() - s) / blend)
    } else {
        h
    }
}

/// Fails when the gait drives a spine the model does not have.
pub fn check_compatible<T: Real>(params: &GaitParams<T>, model: &RobotModel<T>) -> Result<()> {
    if !model.has_spine() && params.spine_amplitude != T::zero() {
        return Err(Error::InconsistentGait(format!(
            "spine amplitude {} on a robot without a spinal joint",
            params.spine_amplitude
        )));
    }
    Ok(())
}

/// Joint targets of the open-loop gait at time `t`.
pub fn joint_targets<T: Real>(params: &GaitParams<T>, model: &RobotModel<T>, t: T) -> Result<JointVector<T>> {
    check_compatible(params, model)?;
    let global = global_phase(t, params);
    let mut q = JointVector::zeros(model.n_joints());
    for limb in Limb::ALL {
        let local = limb_phase(global, limb, params);
        q[limb.shoulder()] = shoulder_profile(local, params);
        q[limb.leg()] = lift_profile(local, params);
    }
    if model.has_spine() {
        let arg = T::lit(2.0) * T::PI() * (global - params.spine_phase);
        q[SPINE] = params.spine_amplitude * arg.sin();
    }
    Ok(q)
}
