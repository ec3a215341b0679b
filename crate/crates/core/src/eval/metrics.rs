//! Per-episode goal-reaching metrics.

use serde::{Deserialize, Serialize};

use crate::config::DyMode;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics<T> {
    /// Minimum goal distance over the episode.
    pub mdb: T,
    /// First step (1-based) inside the goal radius, or the horizon.
    pub atb: usize,
    /// Lateral deviation, aggregated per [`DyMode`].
    pub dy: T,
    pub reached: bool,
    pub steps: usize,
}

/// Accumulates metrics one step at a time.
#[derive(Clone, Debug)]
pub struct MetricsTracker<T> {
    goal_radius: T,
    horizon: usize,
    dy_mode: DyMode,
    mdb: T,
    first_hit: Option<usize>,
    steps: usize,
    sum_abs_y: T,
    max_abs_y: T,
    last_abs_y: T,
}

impl<T: Real> MetricsTracker<T> {
    pub fn new(goal_radius: T, horizon: usize, dy_mode: DyMode) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::ZeroHorizon);
        }
        Ok(Self {
            goal_radius,
            horizon,
            dy_mode,
            mdb: T::infinity(),
            first_hit: None,
            steps: 0,
            sum_abs_y: T::zero(),
            max_abs_y: T::zero(),
            last_abs_y: T::zero(),
        })
    }

    /// Logs the state after one step.
    pub fn record(&mut self, goal_distance: T, y: T) {
        self.steps += 1;
        self.mdb = self.mdb.min(goal_distance);
        if self.first_hit.is_none() && goal_distance < self.goal_radius {
            self.first_hit = Some(self.steps);
        }
        let ay = y.abs();
        self.sum_abs_y = self.sum_abs_y + ay;
        self.max_abs_y = self.max_abs_y.max(ay);
        self.last_abs_y = ay;
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn current(&self) -> EpisodeMetrics<T> {
        let dy = if self.steps == 0 {
            T::zero()
        } else {
            match self.dy_mode {
                DyMode::Mean => self.sum_abs_y / T::from_count(self.steps),
                DyMode::Max => self.max_abs_y,
                DyMode::Terminal => self.last_abs_y,
            }
        };
        EpisodeMetrics {
            mdb: self.mdb,
            atb: self.first_hit.unwrap_or(self.horizon),
            dy,
            reached: self.first_hit.is_some(),
            steps: self.steps,
        }
    }
}

impl<T: Real> EpisodeMetrics<T> {
    /// Metrics of a logged trajectory of per-step goal distances and lateral offsets.
    pub fn from_trace(distances: &[T], ys: &[T], goal_radius: T, horizon: usize, dy_mode: DyMode) -> Result<Self> {
        if distances.len() != ys.len() {
            return Err(Error::DimensionMismatch {
                expected: distances.len(),
                got: ys.len(),
            });
        }
        let mut tr = MetricsTracker::new(goal_radius, horizon, dy_mode)?;
        for (d, y) in distances.iter().zip(ys) {
            tr.record(*d, *y);
        }
        Ok(tr.current())
    }

    pub fn to_f64(&self) -> EpisodeMetrics<f64> {
        EpisodeMetrics {
            mdb: self.mdb.as_f64(),
            atb: self.atb,
            dy: self.dy.as_f64(),
            reached: self.reached,
            steps: self.steps,
        }
    }
}
