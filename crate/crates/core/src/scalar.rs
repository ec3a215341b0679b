//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the workbench is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Lossy conversion to `f64` for logging and file output.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts a count into this scalar.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// Fractional part mapped into `[0, 1)`, also for negative inputs.
    #[inline]
    fn wrap_unit(self) -> Self {
        let f = self - self.floor();
        // `x - floor(x)` can round up to exactly 1 for tiny negative x.
        if f >= Self::one() {
            Self::zero()
        } else {
            f
        }
    }

    /// Angle normalized to `(-pi, pi]`.
    #[inline]
    fn wrap_angle(self) -> Self {
        let two_pi = Self::PI() + Self::PI();
        let mut a = self - two_pi * ((self + Self::PI()) / two_pi).floor();
        if a <= -Self::PI() {
            a = a + two_pi;
        }
        if a > Self::PI() {
            a = a - two_pi;
        }
        a
    }

    /// General matrix product `c <- alpha a b + beta c` with `a` m x k,
    /// `b` k x n, `c` m x n, each given by row and column strides.
    #[allow(clippy::too_many_arguments)]
    fn gemm(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: (&[Self], isize, isize),
        b: (&[Self], isize, isize),
        beta: Self,
        c: (&mut [Self], isize, isize),
    );
}

/// Panics unless every index an `rows x cols` strided view touches is in bounds.
fn check_view(len: usize, rows: usize, cols: usize, rs: isize, cs: isize) {
    assert!(rs >= 0 && cs >= 0, "negative strides are not supported");
    if rows > 0 && cols > 0 {
        let last = (rows - 1) * rs as usize + (cols - 1) * cs as usize;
        assert!(last < len, "matrix view out of bounds");
    }
}

macro_rules! impl_real {
    ($t:ty, $kernel:path) => {
        impl Real for $t {
            fn gemm(
                m: usize,
                k: usize,
                n: usize,
                alpha: Self,
                a: (&[Self], isize, isize),
                b: (&[Self], isize, isize),
                beta: Self,
                c: (&mut [Self], isize, isize),
            ) {
                check_view(a.0.len(), m, k, a.1, a.2);
                check_view(b.0.len(), k, n, b.1, b.2);
                check_view(c.0.len(), m, n, c.1, c.2);
                if m == 0 || n == 0 {
                    return;
                }
                // SAFETY: all three views were bounds-checked above and `c`
                // is borrowed mutably, so it cannot alias `a` or `b`.
                unsafe {
                    $kernel(
                        m,
                        k,
                        n,
                        alpha,
                        a.0.as_ptr(),
                        a.1,
                        a.2,
                        b.0.as_ptr(),
                        b.1,
                        b.2,
                        beta,
                        c.0.as_mut_ptr(),
                        c.1,
                        c.2,
                    )
                }
            }
        }
    };
}

impl_real!(f32, matrixmultiply::sgemm);
impl_real!(f64, matrixmultiply::dgemm);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gemm_matches_naive_product() {
        let a = [1.0f64, 2.0, 3.0, 4.0, 5.0, 6.0]; // 2 x 3
        let b = [7.0f64, 8.0, 9.0, 10.0, 11.0, 12.0]; // 3 x 2
        let mut c = [1.0f64; 4];
        f64::gemm(2, 3, 2, 1.0, (&a, 3, 1), (&b, 2, 1), 1.0, (&mut c, 2, 1));
        assert_eq!(c, [59.0, 65.0, 140.0, 155.0]);
        // a^T (3 x 2) times a 2 x 1 column
        let mut d = [0.0f32; 3];
        let af: Vec<f32> = a.iter().map(|v| *v as f32).collect();
        f32::gemm(3, 2, 1, 1.0, (&af, 1, 3), (&[1.0, 1.0], 1, 1), 0.0, (&mut d, 1, 1));
        assert_eq!(d, [5.0, 7.0, 9.0]);
    }

    #[test]
    fn wrap_unit_stays_in_range() {
        assert_eq!(0.25f64.wrap_unit(), 0.25);
        assert_eq!((-0.25f64).wrap_unit(), 0.75);
        assert_eq!((-1e-20f64).wrap_unit(), 0.0);
        assert_eq!(3.0f64.wrap_unit(), 0.0);
    }

    #[test]
    fn wrap_angle_half_open_interval() {
        use std::f64::consts::PI;
        assert!((PI.wrap_angle() - PI).abs() < 1e-15);
        assert!(((-PI).wrap_angle() - PI).abs() < 1e-15);
        assert!(((3.0 * PI / 2.0).wrap_angle() + PI / 2.0).abs() < 1e-12);
        assert_eq!(0.0f64.wrap_angle(), 0.0);
        assert!((7.0f32.wrap_angle() - (7.0 - 2.0 * std::f32::consts::PI)).abs() < 1e-5);
    }
}
