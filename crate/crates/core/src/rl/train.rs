//! Interaction loop and periodic deterministic evaluation.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::SacSettings;
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::replay::{ReplayBuffer, Transition};
use super::sac::SacAgent;
use super::{Environment, Policy};

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub total_steps: usize,
    /// Number of evaluations, spread evenly with the last at `total_steps`.
    pub eval_points: usize,
    pub eval_episodes: usize,
}

impl TrainConfig {
    pub fn from_settings(s: &SacSettings, total_steps: usize) -> Self {
        Self {
            total_steps,
            eval_points: s.eval_points,
            eval_episodes: s.eval_episodes.max(1),
        }
    }

    /// Environment steps after which evaluation `k` (1-based) runs.
    pub fn eval_step(&self, k: usize) -> usize {
        (k * self.total_steps).div_ceil(self.eval_points)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint<T> {
    pub env_step: usize,
    pub eval_return: T,
    pub eval_goal_distance: T,
    /// Mean of `-log pi` over the updates since the previous point (0 if none).
    pub mean_entropy: T,
    pub alpha: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearningCurve<T> {
    pub seed: u64,
    pub points: Vec<CurvePoint<T>>,
}

pub const CURVE_HEADER: &str = "env_step,eval_return,eval_goal_distance,seed";

impl<T: Real> LearningCurve<T> {
    pub fn final_return(&self) -> Option<T> {
        self.points.last().map(|p| p.eval_return)
    }

    pub fn write_rows<W: Write>(&self, w: &mut W) -> Result<()> {
        for p in &self.points {
            writeln!(
                w,
                "{},{:.6},{:.6},{}",
                p.env_step,
                p.eval_return.as_f64(),
                p.eval_goal_distance.as_f64(),
                self.seed
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        writeln!(buf, "{CURVE_HEADER}").expect("in-memory write");
        self.write_rows(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Reset seed for the `episode`-th training episode of run `seed`.
fn episode_seed(seed: u64, episode: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(episode)
}

/// Runs deterministic episodes on copies of `env`; returns mean return and
/// mean final goal distance.
pub fn evaluate<T, E, P>(env: &E, policy: &P, episodes: usize, seed: u64) -> Result<(T, T)>
where
    T: Real,
    E: Environment<T> + Clone,
    P: Policy<T> + ?Sized,
{
    let episodes = episodes.max(1);
    let mut ret = T::zero();
    let mut dist = T::zero();
    for ep in 0..episodes {
        let mut env = env.clone();
        let mut obs = env.reset(episode_seed(seed ^ 0xE7A1, ep as u64));
        loop {
            let a = policy.act(&obs)?;
            let s = env.step(&a)?;
            ret = ret + s.reward;
            if s.done {
                dist = dist + s.goal_distance;
                break;
            }
            obs = s.obs;
        }
    }
    let n = T::from_count(episodes);
    Ok((ret / n, dist / n))
}

/// Trains `agent` on `env` for `cfg.total_steps` interactions. Actions are
/// uniform random until the agent's warmup is filled. Fully determined by `seed`.
pub fn train<T, E>(env: &mut E, agent: &mut SacAgent<T>, cfg: &TrainConfig, seed: u64) -> Result<LearningCurve<T>>
where
    T: Real,
    E: Environment<T> + Clone,
{
    if env.obs_dim() != agent.obs_dim() || env.action_dim() != agent.act_dim() {
        return Err(Error::DimensionMismatch {
            expected: agent.obs_dim() + agent.act_dim(),
            got: env.obs_dim() + env.action_dim(),
        });
    }
    if cfg.eval_points > cfg.total_steps {
        return Err(Error::InvalidParameter(format!(
            "{} evaluation points do not fit in {} steps",
            cfg.eval_points, cfg.total_steps
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sac = agent.config().clone();
    let mut buffer = ReplayBuffer::new(sac.buffer_capacity);
    let learn_after = sac.warmup.max(sac.batch_size).max(1);

    let mut episode = 0u64;
    let mut obs = env.reset(episode_seed(seed, episode));
    let mut curve = LearningCurve {
        seed,
        points: Vec::with_capacity(cfg.eval_points),
    };
    let mut next_eval = 1;
    let (mut entropy_sum, mut entropy_n) = (T::zero(), 0usize);

    for step in 1..=cfg.total_steps {
        let action: Vec<T> = if buffer.len() < learn_after {
            (0..agent.act_dim())
                .map(|_| T::lit(rng.random_range(-1.0..=1.0)))
                .collect()
        } else {
            agent.sample_action(&obs, &mut rng)?.action
        };
        let s = env.step(&action)?;
        buffer.push(Transition {
            obs: std::mem::take(&mut obs),
            action,
            reward: s.reward,
            next_obs: s.obs.clone(),
            done: s.terminal,
        });
        if s.done {
            episode += 1;
            obs = env.reset(episode_seed(seed, episode));
        } else {
            obs = s.obs;
        }

        if buffer.len() >= learn_after {
            for _ in 0..sac.updates_per_step {
                let report = agent.update_from(&buffer, &mut rng)?;
                entropy_sum = entropy_sum + report.mean_entropy;
                entropy_n += 1;
            }
        }

        while next_eval <= cfg.eval_points && cfg.eval_step(next_eval) == step {
            let (eval_return, eval_goal_distance) = evaluate(env, agent, cfg.eval_episodes, seed)?;
            curve.points.push(CurvePoint {
                env_step: step,
                eval_return,
                eval_goal_distance,
                mean_entropy: if entropy_n > 0 {
                    entropy_sum / T::from_count(entropy_n)
                } else {
                    T::zero()
                },
                alpha: agent.alpha(),
            });
            entropy_sum = T::zero();
            entropy_n = 0;
            next_eval += 1;
        }
    }
    Ok(curve)
}

/// Mean return of uniformly random actions over `episodes` episodes.
pub fn random_policy_return<T, E>(env: &E, episodes: usize, seed: u64) -> Result<T>
where
    T: Real,
    E: Environment<T> + Clone,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = T::zero();
    for ep in 0..episodes.max(1) {
        let mut env = env.clone();
        env.reset(episode_seed(seed, ep as u64));
        loop {
            let a: Vec<T> = (0..env.action_dim())
                .map(|_| T::lit(rng.random_range(-1.0..=1.0)))
                .collect();
            let s = env.step(&a)?;
            total = total + s.reward;
            if s.done {
                break;
            }
        }
    }
    Ok(total / T::from_count(episodes.max(1)))
}
