//! Central pattern generator built from coupled Hopf oscillators.
//!
//! Each oscillator follows the supercritical Hopf normal form
//!
//! ```text
//! dx/dt = alpha (mu - r^2) x - omega y + cx
//! dy/dt = alpha (mu - r^2) y + omega x + cy
//! ```
//!
//! whose limit cycle has radius `sqrt(mu)` and angular frequency `omega`.
//! Oscillator `j` receives `sum_i k_ij R(phi_ij) s_i`, which pulls its phase
//! towards `theta_i + phi_ij`. Joint angles are read off one channel of an
//! oscillator through an affine map.

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::ode::rk4_step;
use crate::robot::{JointVector, Limb, RobotModel};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopfParams<T> {
    /// Convergence gain towards the limit cycle, 1/s.
    pub alpha: T,
    /// Squared limit-cycle radius.
    pub mu: T,
    /// Intrinsic angular frequency, rad/s.
    pub omega: T,
}

impl<T: Real> HopfParams<T> {
    pub fn new(alpha: T, mu: T, omega: T) -> Result<Self> {
        if !(alpha > T::zero()) || !(mu >= T::zero()) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "hopf params need alpha > 0, mu >= 0, finite omega (got {alpha}, {mu}, {omega})"
            )));
        }
        Ok(Self { alpha, mu, omega })
    }
}

/// Directed coupling `from -> to`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling<T> {
    pub from: usize,
    pub to: usize,
    pub weight: T,
    /// Desired `theta_to - theta_from`, radians.
    pub phase_bias: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Channel {
    X,
    Y,
}

/// How one joint is read from the network: `offset + gain * channel`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointDrive<T> {
    pub oscillator: usize,
    pub gain: T,
    pub offset: T,
    pub channel: Channel,
}

/// Time derivative of one oscillator.
pub fn hopf_derivative<T: Real>(state: Vec2<T>, params: &HopfParams<T>, coupling: Vec2<T>) -> Vec2<T> {
    let r2 = state.x * state.x + state.y * state.y;
    let radial = params.alpha * (params.mu - r2);
    Vec2::new(
        radial * state.x - params.omega * state.y + coupling.x,
        radial * state.y + params.omega * state.x + coupling.y,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpgNetwork<T> {
    states: Vec<Vec2<T>>,
    params: Vec<HopfParams<T>>,
    couplings: Vec<Coupling<T>>,
    /// One entry per robot joint, in joint order.
    mapping: Vec<JointDrive<T>>,
}

impl<T: Real> CpgNetwork<T> {
    pub fn new(
        states: Vec<Vec2<T>>,
        params: Vec<HopfParams<T>>,
        couplings: Vec<Coupling<T>>,
        mapping: Vec<JointDrive<T>>,
    ) -> Result<Self> {
        let n = states.len();
        if params.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: params.len(),
            });
        }
        for c in &couplings {
            if c.from >= n || c.to >= n {
                return Err(Error::InvalidParameter(format!(
                    "coupling {} -> {} references a missing oscillator",
                    c.from, c.to
                )));
            }
            if !(c.weight >= T::zero()) {
                return Err(Error::InvalidParameter("coupling weights must be non-negative".into()));
            }
        }
        if let Some(d) = mapping.iter().find(|d| d.oscillator >= n) {
            return Err(Error::InvalidParameter(format!(
                "joint mapping references missing oscillator {}",
                d.oscillator
            )));
        }
        Ok(Self {
            states,
            params,
            couplings,
            mapping,
        })
    }

    /// Four limb oscillators (FL, FR, HL, HR) phase-locked to the given lags
    /// (fractions of a cycle), all-to-all coupled. Shoulders read the x
    /// channel, legs the y channel, the spine follows the hind-left oscillator.
    pub fn walk(
        model: &RobotModel<T>,
        hopf: HopfParams<T>,
        limb_lags: [T; 4],
        coupling: T,
        gains: WalkGains<T>,
    ) -> Result<Self> {
        let two_pi = T::lit(2.0) * T::PI();
        let r0 = T::lit(0.1);
        let states = limb_lags
            .iter()
            .map(|lag| Vec2::new(r0, T::zero()).rotated(-two_pi * *lag))
            .collect();
        let mut couplings = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    couplings.push(Coupling {
                        from: i,
                        to: j,
                        weight: coupling,
                        phase_bias: two_pi * (limb_lags[i] - limb_lags[j]),
                    });
                }
            }
        }
        let mut mapping = Vec::with_capacity(model.n_joints());
        for limb in Limb::ALL {
            mapping.push(JointDrive {
                oscillator: limb.index(),
                gain: gains.shoulder,
                offset: T::zero(),
                channel: Channel::X,
            });
            mapping.push(JointDrive {
                oscillator: limb.index(),
                gain: gains.leg,
                offset: gains.leg_offset,
                channel: Channel::Y,
            });
        }
        if model.has_spine() {
            mapping.push(JointDrive {
                oscillator: Limb::HindLeft.index(),
                gain: gains.spine,
                offset: T::zero(),
                channel: Channel::X,
            });
        }
        Self::new(states, vec![hopf; 4], couplings, mapping)
    }

    /// Walk network with every value taken from the scenario.
    pub fn from_config(config: &ScenarioConfig, model: &RobotModel<T>) -> Result<Self> {
        let c = &config.cpg;
        Self::walk(
            model,
            HopfParams::new(T::lit(c.alpha), T::lit(c.mu), T::lit(config.cpg_omega()))?,
            config.gait.offsets.map(T::lit),
            T::lit(c.coupling),
            WalkGains {
                shoulder: T::lit(c.shoulder_gain),
                leg: T::lit(c.leg_gain),
                leg_offset: T::lit(c.leg_offset),
                spine: T::lit(c.spine_gain),
            },
        )
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec2<T>] {
        &self.states
    }

    pub fn set_state(&mut self, i: usize, s: Vec2<T>) {
        self.states[i] = s;
    }

    pub fn params(&self) -> &[HopfParams<T>] {
        &self.params
    }

    /// Modulation hook: an external controller may retune oscillators between steps.
    pub fn params_mut(&mut self) -> &mut [HopfParams<T>] {
        &mut self.params
    }

    pub fn couplings(&self) -> &[Coupling<T>] {
        &self.couplings
    }

    /// Modulation hook for coupling weights and biases.
    pub fn couplings_mut(&mut self) -> &mut [Coupling<T>] {
        &mut self.couplings
    }

    pub fn mapping(&self) -> &[JointDrive<T>] {
        &self.mapping
    }

    /// Oscillator phase `atan2(y, x)`.
    pub fn phase(&self, i: usize) -> T {
        self.states[i].y.atan2(self.states[i].x)
    }

    fn derivative(&self, flat: &[T], out: &mut [T]) {
        let n = self.states.len();
        let mut input = vec![Vec2::zero(); n];
        for c in &self.couplings {
            let s = Vec2::new(flat[2 * c.from], flat[2 * c.from + 1]);
            input[c.to] = input[c.to] + s.rotated(c.phase_bias) * c.weight;
        }
        for i in 0..n {
            let d = hopf_derivative(Vec2::new(flat[2 * i], flat[2 * i + 1]), &self.params[i], input[i]);
            out[2 * i] = d.x;
            out[2 * i + 1] = d.y;
        }
    }

    /// Advances every oscillator by one RK4 step of the coupled system.
    pub fn network_step(&self, dt: T) -> Result<Self> {
        let mut next = self.clone();
        next.advance(dt)?;
        Ok(next)
    }

    /// In-place variant of [`network_step`](Self::network_step).
    pub fn advance(&mut self, dt: T) -> Result<()> {
        if !(dt > T::zero()) {
            return Err(Error::NonPositiveStep(dt.as_f64()));
        }
        let flat: Vec<T> = self.states.iter().flat_map(|s| [s.x, s.y]).collect();
        let next = rk4_step(&flat, dt, |y, d| self.derivative(y, d));
        for (i, s) in self.states.iter_mut().enumerate() {
            *s = Vec2::new(next[2 * i], next[2 * i + 1]);
        }
        Ok(())
    }

    /// Maps oscillator states to joint angles, clipped to the joint limits.
    pub fn cpg_to_joints(&self, model: &RobotModel<T>) -> Result<JointVector<T>> {
        if self.mapping.len() != model.n_joints() {
            return Err(Error::InconsistentMapping(format!(
                "mapping drives {} joints, robot has {}",
                self.mapping.len(),
                model.n_joints()
            )));
        }
        let values = self
            .mapping
            .iter()
            .zip(model.joint_limits())
            .map(|(d, lim)| {
                let s = self.states[d.oscillator];
                let ch = match d.channel {
                    Channel::X => s.x,
                    Channel::Y => s.y,
                };
                lim.clamp(d.offset + d.gain * ch)
            })
            .collect();
        JointVector::new(values)
    }
}

/// Output gains of the walk network.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkGains<T> {
    pub shoulder: T,
    pub leg: T,
    pub leg_offset: T,
    pub spine: T,
}
