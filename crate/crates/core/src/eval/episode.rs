//! Rolling out one episode and logging its trajectory.

use std::io::Write;

use crate::config::DyMode;
use crate::env::{RewardTerms, SimEnv};
use crate::error::{Error, Result};
use crate::geometry::BodyPose;
use crate::robot::joint_names;
use crate::scalar::Real;

use super::controller::Controller;
use super::metrics::{EpisodeMetrics, MetricsTracker};

/// State after one step.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow<T> {
    pub t: usize,
    pub pose: BodyPose<T>,
    pub q: Vec<T>,
    pub reward: RewardTerms<T>,
    pub stance: [bool; 4],
    pub goal_distance: T,
}

/// Rolls one episode from `env.reset(seed)` for at most `horizon` steps.
pub fn run_episode<T, C>(
    env: &mut SimEnv<T>,
    controller: &mut C,
    horizon: usize,
    seed: u64,
    dy_mode: DyMode,
) -> Result<EpisodeMetrics<T>>
where
    T: Real,
    C: Controller<T> + ?Sized,
{
    rollout(env, controller, horizon, seed, dy_mode, |_| {})
}

/// [`run_episode`] that also returns every step's state.
pub fn run_episode_traced<T, C>(
    env: &mut SimEnv<T>,
    controller: &mut C,
    horizon: usize,
    seed: u64,
    dy_mode: DyMode,
) -> Result<(EpisodeMetrics<T>, Vec<TraceRow<T>>)>
where
    T: Real,
    C: Controller<T> + ?Sized,
{
    let mut rows = Vec::new();
    let m = rollout(env, controller, horizon, seed, dy_mode, |r| rows.push(r))?;
    Ok((m, rows))
}

fn rollout<T, C, F>(
    env: &mut SimEnv<T>,
    controller: &mut C,
    horizon: usize,
    seed: u64,
    dy_mode: DyMode,
    mut log: F,
) -> Result<EpisodeMetrics<T>>
where
    T: Real,
    C: Controller<T> + ?Sized,
    F: FnMut(TraceRow<T>),
{
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    env.settings_mut().horizon = horizon;
    env.reset(seed);
    controller.reset();
    let mut tracker = MetricsTracker::new(env.settings().goal_radius, horizon, dy_mode)?;
    loop {
        let q = controller.targets(env)?;
        let r = env.step(&q)?;
        let s = env.state();
        tracker.record(r.info.goal_distance, s.pose.y);
        log(TraceRow {
            t: s.t,
            pose: s.pose,
            q: s.q.as_slice().to_vec(),
            reward: r.info.reward,
            stance: r.info.stance,
            goal_distance: r.info.goal_distance,
        });
        if r.done {
            break;
        }
    }
    Ok(tracker.current())
}

/// Writes a trajectory as CSV: time, pose, joints, reward terms, stance mask, goal distance.
pub fn write_trace_csv<T: Real, W: Write>(w: W, rows: &[TraceRow<T>], dt: T) -> Result<()> {
    let n = rows.first().map_or(0, |r| r.q.len());
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<String> = ["step", "time", "x", "y", "theta"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(joint_names(n).into_iter().map(|j| format!("q_{j}")));
    header.extend(
        [
            "r_dx",
            "r_dd",
            "r_dy",
            "r_control",
            "r_healthy",
            "reward",
            "stance_fl",
            "stance_fr",
            "stance_hl",
            "stance_hr",
            "goal_distance",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    out.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.t.to_string(),
            format!("{:.4}", (T::from_count(r.t) * dt).as_f64()),
            fmt(r.pose.x),
            fmt(r.pose.y),
            fmt(r.pose.theta),
        ];
        rec.extend(r.q.iter().map(|v| fmt(*v)));
        rec.extend(r.reward.weighted.iter().map(|v| fmt(*v)));
        rec.push(fmt(r.reward.total));
        rec.extend(r.stance.iter().map(|s| u8::from(*s).to_string()));
        rec.push(fmt(r.goal_distance));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

fn fmt<T: Real>(v: T) -> String {
    format!("{:.9}", v.as_f64())
}
