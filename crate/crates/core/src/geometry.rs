//! Planar points and rigid transforms.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// A point or vector in the horizontal plane, meters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Self) -> T {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn rotated(self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<T: Real> Add for Vec2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Real> Neg for Vec2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl<T: Real> Mul<T> for Vec2<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}

/// Planar rigid transform `p -> R(rotation) p + translation`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarTransform<T> {
    pub rotation: T,
    pub translation: Vec2<T>,
}

impl<T: Real> PlanarTransform<T> {
    pub fn identity() -> Self {
        Self {
            rotation: T::zero(),
            translation: Vec2::zero(),
        }
    }

    pub fn new(rotation: T, translation: Vec2<T>) -> Self {
        Self { rotation, translation }
    }

    pub fn apply(&self, p: Vec2<T>) -> Vec2<T> {
        p.rotated(self.rotation) + self.translation
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            rotation: self.rotation + other.rotation,
            translation: self.apply(other.translation),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            rotation: -self.rotation,
            translation: (-self.translation).rotated(-self.rotation),
        }
    }
}

/// World-frame pose of the rear body segment. The origin sits on the spine
/// pivot and `theta` is the heading of the rear segment's forward axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodyPose<T> {
    pub x: T,
    pub y: T,
    pub theta: T,
}

impl<T: Real> BodyPose<T> {
    pub fn new(x: T, y: T, theta: T) -> Self {
        Self {
            x,
            y,
            theta: theta.wrap_angle(),
        }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn position(&self) -> Vec2<T> {
        Vec2::new(self.x, self.y)
    }

    /// Body-to-world transform.
    pub fn transform(&self) -> PlanarTransform<T> {
        PlanarTransform::new(self.theta, self.position())
    }

    pub fn from_transform(t: &PlanarTransform<T>) -> Self {
        Self::new(t.translation.x, t.translation.y, t.rotation)
    }

    pub fn to_world(&self, p: Vec2<T>) -> Vec2<T> {
        self.transform().apply(p)
    }

    pub fn to_body(&self, p: Vec2<T>) -> Vec2<T> {
        (p - self.position()).rotated(-self.theta)
    }
}
