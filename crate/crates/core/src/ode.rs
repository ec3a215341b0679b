//! Fixed-step classical Runge-Kutta integration for autonomous systems.

use crate::scalar::Real;

/// One RK4 step of `dy/dt = f(y)`. `f` writes the derivative of its first
/// argument into its second.
pub fn rk4_step<T, F>(y: &[T], dt: T, mut f: F) -> Vec<T>
where
    T: Real,
    F: FnMut(&[T], &mut [T]),
{
    let n = y.len();
    let half = dt / T::lit(2.0);
    let mut k1 = vec![T::zero(); n];
    let mut k2 = vec![T::zero(); n];
    let mut k3 = vec![T::zero(); n];
    let mut k4 = vec![T::zero(); n];
    let mut tmp = vec![T::zero(); n];

    f(y, &mut k1);
    for i in 0..n {
        tmp[i] = y[i] + half * k1[i];
    }
    f(&tmp, &mut k2);
    for i in 0..n {
        tmp[i] = y[i] + half * k2[i];
    }
    f(&tmp, &mut k3);
    for i in 0..n {
        tmp[i] = y[i] + dt * k3[i];
    }
    f(&tmp, &mut k4);

    let sixth = dt / T::lit(6.0);
    (0..n)
        .map(|i| y[i] + sixth * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i]))
        .collect()
}
