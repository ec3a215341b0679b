//! Least-squares planar rigid fit of stance feet to their ground anchors.

use crate::error::{Error, Result};
use crate::geometry::{PlanarTransform, Vec2};
use crate::scalar::Real;

/// Result of [`solve_base_motion`]. `airborne` is set when no foot supports the body.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseMotion<T> {
    pub transform: PlanarTransform<T>,
    pub airborne: bool,
}

/// Finds the rigid transform `T` minimising `sum |T(feet[i]) - anchors[i]|^2`.
///
/// Closed form: align centroids, then take the rotation from the summed dot
/// and cross products of the centred point pairs. A single pair yields a pure
/// translation. With no pairs the identity is returned and the body is
/// flagged airborne.
pub fn solve_base_motion<T: Real>(anchors: &[Vec2<T>], feet: &[Vec2<T>]) -> Result<BaseMotion<T>> {
    if anchors.len() != feet.len() {
        return Err(Error::DimensionMismatch {
            expected: anchors.len(),
            got: feet.len(),
        });
    }
    if anchors.is_empty() {
        return Ok(BaseMotion {
            transform: PlanarTransform::identity(),
            airborne: true,
        });
    }
    let n = T::from_count(anchors.len());
    let centroid = |pts: &[Vec2<T>]| pts.iter().fold(Vec2::zero(), |acc, p| acc + *p) * (T::one() / n);
    let anchor_c = centroid(anchors);
    let foot_c = centroid(feet);

    let mut dot = T::zero();
    let mut cross = T::zero();
    for (a, f) in anchors.iter().zip(feet) {
        let a = *a - anchor_c;
        let f = *f - foot_c;
        dot = dot + f.dot(a);
        cross = cross + f.cross(a);
    }
    let rotation = if dot == T::zero() && cross == T::zero() {
        T::zero()
    } else {
        cross.atan2(dot)
    };
    let translation = anchor_c - foot_c.rotated(rotation);
    Ok(BaseMotion {
        transform: PlanarTransform::new(rotation, translation),
        airborne: false,
    })
}

/// Sum of squared residuals of a transform over matched pairs.
pub fn fit_residual<T: Real>(transform: &PlanarTransform<T>, anchors: &[Vec2<T>], feet: &[Vec2<T>]) -> T {
    anchors
        .iter()
        .zip(feet)
        .map(|(a, f)| {
            let d = transform.apply(*f) - *a;
            d.dot(d)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unchanged_feet_give_identity() {
        let pts = [Vec2::new(0.15, 0.13), Vec2::new(-0.15, -0.13), Vec2::new(0.1, -0.1)];
        let m = solve_base_motion(&pts, &pts).unwrap();
        assert_eq!(m.transform, PlanarTransform::identity());
        assert!(!m.airborne);
    }

    #[test]
    fn retracted_feet_push_body_forward() {
        let anchors = [
            Vec2::new(0.15f64, 0.13),
            Vec2::new(-0.15, -0.13),
            Vec2::new(-0.15, 0.13),
        ];
        let d = 0.02;
        let feet = anchors.map(|a| a - Vec2::new(d, 0.0));
        let m = solve_base_motion(&anchors, &feet).unwrap();
        assert!(m.transform.rotation.abs() < 1e-15);
        assert!((m.transform.translation - Vec2::new(d, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn single_pair_is_pure_translation() {
        let m = solve_base_motion(&[Vec2::new(1.0, 2.0)], &[Vec2::new(0.3, -0.4)]).unwrap();
        assert_eq!(m.transform.rotation, 0.0);
        assert_eq!(m.transform.apply(Vec2::new(0.3, -0.4)), Vec2::new(1.0, 2.0));
    }

    #[test]
    fn no_support_is_airborne_identity() {
        let m = solve_base_motion::<f64>(&[], &[]).unwrap();
        assert!(m.airborne);
        assert_eq!(m.transform, PlanarTransform::identity());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(solve_base_motion(&[Vec2::new(0.0f64, 0.0)], &[]).is_err());
    }
}
