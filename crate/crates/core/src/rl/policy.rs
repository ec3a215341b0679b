//! Tanh-squashed diagonal Gaussian policy head.
//!
//! The actor network emits a mean and a log standard deviation per action
//! dimension. A pre-squash sample `u = mean + std * eps` is pushed through
//! `tanh`, and its log-density is corrected by `-sum log(1 - tanh(u)^2)`.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

pub const LOG_STD_MIN: f64 = -20.0;
pub const LOG_STD_MAX: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPolicyOutput<T> {
    pub mean: Vec<T>,
    /// Clipped log standard deviation.
    pub log_std: Vec<T>,
    /// Which log-std entries hit a clip bound (their gradient is zero).
    pub log_std_clipped: Vec<bool>,
    pub noise: Vec<T>,
    pub pre_squash: Vec<T>,
    /// `tanh(pre_squash)`, inside `[-1, 1]`.
    pub action: Vec<T>,
    pub log_prob: T,
}

/// `log(1 - tanh(u)^2)` evaluated as `2 (ln 2 - u - softplus(-2u))`, stable for large `|u|`.
pub fn log_one_minus_tanh_sq<T: Real>(u: T) -> T {
    let two = T::lit(2.0);
    two * (T::LN_2() - u - softplus(-two * u))
}

pub fn softplus<T: Real>(x: T) -> T {
    // log(1 + e^x) = max(x, 0) + log1p(e^-|x|)
    x.max(T::zero()) + (-x.abs()).exp().ln_1p()
}

/// Diagonal Gaussian log-density of `u`.
pub fn gaussian_log_prob<T: Real>(u: &[T], mean: &[T], log_std: &[T]) -> T {
    let half_ln_2pi = T::lit(0.5) * (T::lit(2.0) * T::PI()).ln();
    u.iter()
        .zip(mean)
        .zip(log_std)
        .map(|((u, m), ls)| {
            let z = (*u - *m) / ls.exp();
            -T::lit(0.5) * z * z - *ls - half_ln_2pi
        })
        .sum()
}

/// Splits raw actor output into mean and clipped log-std, applies the given
/// standard-normal noise and squashes.
pub fn squashed_sample<T: Real>(raw: &[T], noise: &[T]) -> GaussianPolicyOutput<T> {
    let dim = raw.len() / 2;
    debug_assert_eq!(noise.len(), dim);
    let (lo, hi) = (T::lit(LOG_STD_MIN), T::lit(LOG_STD_MAX));
    let mean = raw[..dim].to_vec();
    let log_std_clipped: Vec<bool> = raw[dim..].iter().map(|l| *l < lo || *l > hi).collect();
    let log_std: Vec<T> = raw[dim..].iter().map(|l| l.max(lo).min(hi)).collect();
    let pre_squash: Vec<T> = (0..dim).map(|k| mean[k] + log_std[k].exp() * noise[k]).collect();
    let action = pre_squash.iter().map(|u| u.tanh()).collect();
    let correction: T = pre_squash.iter().map(|u| log_one_minus_tanh_sq(*u)).sum();
    let log_prob = gaussian_log_prob(&pre_squash, &mean, &log_std) - correction;
    GaussianPolicyOutput {
        mean,
        log_std,
        log_std_clipped,
        noise: noise.to_vec(),
        pre_squash,
        action,
        log_prob,
    }
}

/// Shannon entropy `-sum p ln p` of a discrete distribution; zero-probability outcomes contribute nothing.
pub fn discrete_entropy<T: Real>(probs: &[T]) -> T {
    probs.iter().filter(|p| **p > T::zero()).map(|p| -*p * p.ln()).sum()
}

/// Maps squashed actions in `[-1, 1]` onto a box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionScale<T> {
    pub center: Vec<T>,
    pub half_range: Vec<T>,
}

impl<T: Real> ActionScale<T> {
    pub fn unit(dim: usize) -> Self {
        Self {
            center: vec![T::zero(); dim],
            half_range: vec![T::one(); dim],
        }
    }

    pub fn apply(&self, squashed: &[T]) -> Vec<T> {
        squashed
            .iter()
            .zip(self.center.iter().zip(&self.half_range))
            .map(|(a, (c, h))| *c + *h * *a)
            .collect()
    }
}
