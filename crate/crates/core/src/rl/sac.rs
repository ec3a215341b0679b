//! Soft actor-critic with twin critics, target networks and a learned
//! entropy temperature.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::SacSettings;
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::nn::{Adam, DenseNet, GradTape};
use super::policy::{squashed_sample, GaussianPolicyOutput};
use super::replay::{ReplayBuffer, Transition};
use super::Policy;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SacConfig<T> {
    pub gamma: T,
    /// Multiplies rewards inside the Bellman target.
    pub reward_scale: T,
    pub tau: T,
    pub lr: T,
    pub batch_size: usize,
    pub hidden: usize,
    pub buffer_capacity: usize,
    /// Transitions collected (with uniform random actions) before learning starts.
    pub warmup: usize,
    pub updates_per_step: usize,
    pub init_alpha: T,
    pub auto_alpha: bool,
    pub target_entropy: T,
}

impl<T: Real> SacConfig<T> {
    /// Settings for an action space of `act_dim` dimensions; the entropy
    /// target is `-act_dim`.
    pub fn from_settings(s: &SacSettings, act_dim: usize) -> Result<Self> {
        let cfg = Self {
            gamma: T::lit(s.gamma),
            reward_scale: T::lit(s.reward_scale),
            tau: T::lit(s.tau),
            lr: T::lit(s.lr),
            batch_size: s.batch_size,
            hidden: s.hidden,
            buffer_capacity: s.buffer_capacity,
            warmup: s.warmup,
            updates_per_step: s.updates_per_step,
            init_alpha: T::lit(s.init_alpha),
            auto_alpha: s.auto_alpha,
            target_entropy: -T::from_count(act_dim),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: T| v > T::zero() && v < T::one();
        if !(self.gamma >= T::zero() && self.gamma < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in [0, 1), got {}",
                self.gamma
            )));
        }
        if !(open_unit(self.tau) || self.tau == T::one()) {
            return Err(Error::InvalidParameter(format!(
                "tau must lie in (0, 1], got {}",
                self.tau
            )));
        }
        if !(self.reward_scale > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "reward scale must be positive, got {}",
                self.reward_scale
            )));
        }
        if !(self.lr > T::zero()) || !(self.init_alpha > T::zero()) {
            return Err(Error::InvalidParameter(
                "learning rate and alpha must be positive".into(),
            ));
        }
        if self.batch_size == 0 || self.hidden == 0 || self.buffer_capacity == 0 {
            return Err(Error::InvalidParameter(
                "batch size, hidden width and buffer capacity must be positive".into(),
            ));
        }
        Ok(())
    }
}

impl<T: Real> Default for SacConfig<T> {
    fn default() -> Self {
        Self::from_settings(&SacSettings::default(), 1).expect("defaults are valid")
    }
}

/// Actor-loss gradient and the quantities computed along the way.
#[derive(Clone, Debug, PartialEq)]
pub struct ActorGradient<T> {
    pub params: Vec<T>,
    pub loss: T,
    pub mean_log_prob: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossReport<T> {
    pub critic_loss: [T; 2],
    pub actor_loss: T,
    pub alpha_loss: T,
    pub alpha: T,
    /// Batch mean of `-log pi`.
    pub mean_entropy: T,
}

pub(crate) fn normal_noise<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
    (0..n).map(|_| T::lit(rng.sample::<f64, _>(StandardNormal))).collect()
}

fn concat<T: Clone>(a: &[T], b: &[T]) -> Vec<T> {
    let mut v = Vec::with_capacity(a.len() + b.len());
    v.extend_from_slice(a);
    v.extend_from_slice(b);
    v
}

#[derive(Clone, Debug)]
pub struct SacAgent<T> {
    config: SacConfig<T>,
    obs_dim: usize,
    act_dim: usize,
    actor: DenseNet<T>,
    critics: [DenseNet<T>; 2],
    targets: [DenseNet<T>; 2],
    actor_opt: Adam<T>,
    critic_opts: [Adam<T>; 2],
    log_alpha: T,
    alpha_opt: Adam<T>,
}

impl<T: Real> SacAgent<T> {
    pub fn new<R: Rng + ?Sized>(obs_dim: usize, act_dim: usize, config: SacConfig<T>, rng: &mut R) -> Result<Self> {
        config.validate()?;
        if obs_dim == 0 || act_dim == 0 {
            return Err(Error::InvalidParameter(
                "observation and action dims must be positive".into(),
            ));
        }
        let h = config.hidden;
        let actor = DenseNet::mlp(obs_dim, h, 2 * act_dim, rng);
        let critics = [
            DenseNet::mlp(obs_dim + act_dim, h, 1, rng),
            DenseNet::mlp(obs_dim + act_dim, h, 1, rng),
        ];
        Ok(Self::assemble(
            config,
            obs_dim,
            act_dim,
            actor,
            critics.clone(),
            critics,
            T::zero(),
        ))
    }

    fn assemble(
        config: SacConfig<T>,
        obs_dim: usize,
        act_dim: usize,
        actor: DenseNet<T>,
        critics: [DenseNet<T>; 2],
        targets: [DenseNet<T>; 2],
        log_alpha: T,
    ) -> Self {
        let lr = config.lr;
        let log_alpha = if log_alpha == T::zero() {
            config.init_alpha.ln()
        } else {
            log_alpha
        };
        Self {
            actor_opt: Adam::new(actor.n_params(), lr),
            critic_opts: [
                Adam::new(critics[0].n_params(), lr),
                Adam::new(critics[1].n_params(), lr),
            ],
            alpha_opt: Adam::new(1, lr),
            config,
            obs_dim,
            act_dim,
            actor,
            critics,
            targets,
            log_alpha,
        }
    }

    /// Rebuilds an agent from stored networks. Optimiser moments start fresh.
    pub fn from_networks(
        config: SacConfig<T>,
        actor: DenseNet<T>,
        critics: [DenseNet<T>; 2],
        targets: [DenseNet<T>; 2],
        log_alpha: T,
    ) -> Result<Self> {
        config.validate()?;
        let obs_dim = critics[0].input_dim() - actor.output_dim() / 2;
        let act_dim = actor.output_dim() / 2;
        if actor.input_dim() != obs_dim
            || critics
                .iter()
                .chain(&targets)
                .any(|c| c.input_dim() != obs_dim + act_dim)
        {
            return Err(Error::Checkpoint("network shapes do not fit together".into()));
        }
        let mut agent = Self::assemble(config, obs_dim, act_dim, actor, critics, targets, T::zero());
        agent.log_alpha = log_alpha;
        Ok(agent)
    }

    pub fn config(&self) -> &SacConfig<T> {
        &self.config
    }

    pub fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    pub fn act_dim(&self) -> usize {
        self.act_dim
    }

    pub fn alpha(&self) -> T {
        self.log_alpha.exp()
    }

    pub fn log_alpha(&self) -> T {
        self.log_alpha
    }

    pub fn actor(&self) -> &DenseNet<T> {
        &self.actor
    }

    pub fn critics(&self) -> &[DenseNet<T>; 2] {
        &self.critics
    }

    pub fn targets(&self) -> &[DenseNet<T>; 2] {
        &self.targets
    }

    pub fn actor_mut(&mut self) -> &mut DenseNet<T> {
        &mut self.actor
    }

    pub fn critics_mut(&mut self) -> &mut [DenseNet<T>; 2] {
        &mut self.critics
    }

    pub fn swap_critics(&mut self) {
        self.critics.swap(0, 1);
        self.targets.swap(0, 1);
        self.critic_opts.swap(0, 1);
    }

    fn check_obs(&self, obs: &[T]) -> Result<()> {
        if obs.len() != self.obs_dim {
            return Err(Error::DimensionMismatch {
                expected: self.obs_dim,
                got: obs.len(),
            });
        }
        Ok(())
    }

    /// Policy distribution at `obs` evaluated with explicit standard-normal noise.
    pub fn policy_with_noise(&self, obs: &[T], noise: &[T]) -> Result<GaussianPolicyOutput<T>> {
        self.check_obs(obs)?;
        let raw = self.actor.forward(obs)?;
        Ok(squashed_sample(&raw, noise))
    }

    /// Stochastic action (squashed, in `[-1, 1]`) with its log-probability.
    pub fn sample_action<R: Rng + ?Sized>(&self, obs: &[T], rng: &mut R) -> Result<GaussianPolicyOutput<T>> {
        let noise = normal_noise(rng, self.act_dim);
        self.policy_with_noise(obs, &noise)
    }

    /// `tanh(mean)`.
    pub fn deterministic_action(&self, obs: &[T]) -> Result<Vec<T>> {
        self.check_obs(obs)?;
        let raw = self.actor.forward(obs)?;
        Ok(raw[..self.act_dim].iter().map(|m| m.tanh()).collect())
    }

    pub fn q_values(&self, obs: &[T], action: &[T]) -> Result<[T; 2]> {
        let sa = concat(obs, action);
        Ok([self.critics[0].forward(&sa)?[0], self.critics[1].forward(&sa)?[0]])
    }

    /// Squashed policy samples for a batch of observations, one noise vector each.
    fn policy_batch(&self, obs: &[Vec<T>], noise: &[Vec<T>]) -> Result<Vec<GaussianPolicyOutput<T>>> {
        let raw = self.actor.forward_batch(obs)?;
        Ok(raw.iter().zip(noise).map(|(r, e)| squashed_sample(r, e)).collect())
    }

    fn min_q_batch(nets: &[DenseNet<T>; 2], sa: &[Vec<T>]) -> Result<Vec<T>> {
        let q1 = nets[0].forward_batch(sa)?;
        let q2 = nets[1].forward_batch(sa)?;
        Ok(q1.iter().zip(&q2).map(|(a, b)| a[0].min(b[0])).collect())
    }

    /// Soft Bellman targets `scale r + gamma (1 - done) (min Q'(s', a') - alpha log pi(a'|s'))`
    /// with `a'` drawn using the supplied noise (one vector per transition).
    pub fn critic_targets(&self, batch: &[Transition<T>], noise: &[Vec<T>]) -> Result<Vec<T>> {
        let alpha = self.alpha();
        let next_obs: Vec<Vec<T>> = batch.iter().map(|t| t.next_obs.clone()).collect();
        let next = self.policy_batch(&next_obs, noise)?;
        let sa: Vec<Vec<T>> = next_obs.iter().zip(&next).map(|(o, p)| concat(o, &p.action)).collect();
        let q = Self::min_q_batch(&self.targets, &sa)?;
        Ok(batch
            .iter()
            .zip(next.iter().zip(q))
            .map(|(tr, (p, q))| {
                let cont = if tr.done { T::zero() } else { T::one() };
                self.config.reward_scale * tr.reward + self.config.gamma * cont * (q - alpha * p.log_prob)
            })
            .collect())
    }

    /// Batch mean of `alpha log pi(a|s) - min(Q1, Q2)(s, a)` with reparameterised actions.
    pub fn actor_objective(&self, obs: &[Vec<T>], noise: &[Vec<T>]) -> Result<T> {
        let alpha = self.alpha();
        let pols = self.policy_batch(obs, noise)?;
        let sa: Vec<Vec<T>> = obs.iter().zip(&pols).map(|(o, p)| concat(o, &p.action)).collect();
        let q = Self::min_q_batch(&self.critics, &sa)?;
        let total: T = pols.iter().zip(q).map(|(p, q)| alpha * p.log_prob - q).sum();
        Ok(total / T::from_count(obs.len()))
    }

    /// Gradient of [`SacAgent::actor_objective`] with respect to the actor
    /// parameters, through the reparameterised, squashed sample.
    pub fn actor_gradient(&self, obs: &[Vec<T>], noise: &[Vec<T>]) -> Result<ActorGradient<T>> {
        if obs.is_empty() || noise.len() != obs.len() {
            return Err(Error::DimensionMismatch {
                expected: obs.len().max(1),
                got: noise.len(),
            });
        }
        let n = T::from_count(obs.len());
        let two = T::lit(2.0);
        let alpha = self.alpha();
        let mut actor_tape = GradTape::new();
        let raw = actor_tape.record_batch(&self.actor, obs)?;
        let policies: Vec<GaussianPolicyOutput<T>> =
            raw.iter().zip(noise).map(|(r, e)| squashed_sample(r, e)).collect();
        let sa_pi: Vec<Vec<T>> = obs.iter().zip(&policies).map(|(o, p)| concat(o, &p.action)).collect();
        let mut critic_tapes = [GradTape::new(), GradTape::new()];
        let q1 = critic_tapes[0].record_batch(&self.critics[0], &sa_pi)?;
        let q2 = critic_tapes[1].record_batch(&self.critics[1], &sa_pi)?;
        let chosen: Vec<usize> = q1
            .iter()
            .zip(&q2)
            .map(|(a, b)| if a[0] <= b[0] { 0 } else { 1 })
            .collect();
        let mut actor_loss = T::zero();
        let mut log_prob_sum = T::zero();
        for (i, pol) in policies.iter().enumerate() {
            actor_loss = actor_loss + (alpha * pol.log_prob - q1[i][0].min(q2[i][0])) / n;
            log_prob_sum = log_prob_sum + pol.log_prob;
        }
        let mut dq_da: Vec<Vec<T>> = vec![Vec::new(); obs.len()];
        for c in 0..2 {
            if !chosen.contains(&c) {
                continue;
            }
            let seeds: Vec<Vec<T>> = chosen
                .iter()
                .map(|k| vec![if *k == c { T::one() } else { T::zero() }])
                .collect();
            let g = critic_tapes[c].backward(&self.critics[c], &seeds)?;
            for (i, k) in chosen.iter().enumerate() {
                if *k == c {
                    dq_da[i] = g.inputs[i][self.obs_dim..].to_vec();
                }
            }
        }
        let actor_seeds: Vec<Vec<T>> = policies
            .iter()
            .zip(&dq_da)
            .map(|(pol, gq)| {
                let mut seed = vec![T::zero(); 2 * self.act_dim];
                for k in 0..self.act_dim {
                    let a = pol.action[k];
                    let sigma = pol.log_std[k].exp();
                    let eps = pol.noise[k];
                    let dq_du = gq[k] * (T::one() - a * a);
                    seed[k] = (alpha * two * a - dq_du) / n;
                    if !pol.log_std_clipped[k] {
                        let dlogp = -T::one() + two * a * sigma * eps;
                        seed[self.act_dim + k] = (alpha * dlogp - dq_du * sigma * eps) / n;
                    }
                }
                seed
            })
            .collect();
        let g = actor_tape.backward(&self.actor, &actor_seeds)?;
        Ok(ActorGradient {
            params: g.params,
            loss: actor_loss,
            mean_log_prob: log_prob_sum / n,
        })
    }

    /// Samples a batch from `buffer` and runs one update.
    pub fn update_from<R: Rng + ?Sized>(&mut self, buffer: &ReplayBuffer<T>, rng: &mut R) -> Result<LossReport<T>> {
        let need = self.config.warmup.max(1);
        if buffer.len() < need {
            return Err(Error::ColdBuffer {
                have: buffer.len(),
                need,
            });
        }
        let batch = buffer.sample(self.config.batch_size, rng);
        self.update(&batch, rng)
    }

    /// One gradient step on both critics, the actor and the temperature,
    /// followed by a Polyak update of the target critics.
    pub fn update<R: Rng + ?Sized>(&mut self, batch: &[Transition<T>], rng: &mut R) -> Result<LossReport<T>> {
        if batch.is_empty() {
            return Err(Error::InvalidParameter("empty training batch".into()));
        }
        let n = T::from_count(batch.len());
        let two = T::lit(2.0);

        let target_noise: Vec<Vec<T>> = batch.iter().map(|_| normal_noise(rng, self.act_dim)).collect();
        let y = self.critic_targets(batch, &target_noise)?;

        let obs: Vec<Vec<T>> = batch.iter().map(|t| t.obs.clone()).collect();
        let sa: Vec<Vec<T>> = batch.iter().map(|t| concat(&t.obs, &t.action)).collect();
        let mut critic_loss = [T::zero(); 2];
        for c in 0..2 {
            let mut tape = GradTape::new();
            let q = tape.record_batch(&self.critics[c], &sa)?;
            let seeds: Vec<Vec<T>> = q
                .iter()
                .zip(&y)
                .map(|(q, target)| {
                    let err = q[0] - *target;
                    critic_loss[c] = critic_loss[c] + err * err / n;
                    vec![two * err / n]
                })
                .collect();
            let grads = tape.backward(&self.critics[c], &seeds)?;
            self.critic_opts[c].step(self.critics[c].params_mut(), &grads.params);
        }

        let actor_noise: Vec<Vec<T>> = batch.iter().map(|_| normal_noise(rng, self.act_dim)).collect();
        let actor = self.actor_gradient(&obs, &actor_noise)?;
        self.actor_opt.step(self.actor.params_mut(), &actor.params);
        let actor_loss = actor.loss;
        let mean_log_prob = actor.mean_log_prob;

        let alpha_loss = -self.log_alpha * (mean_log_prob + self.config.target_entropy);
        if self.config.auto_alpha {
            let grad = -(mean_log_prob + self.config.target_entropy);
            let mut p = [self.log_alpha];
            self.alpha_opt.step(&mut p, &[grad]);
            self.log_alpha = p[0];
        }

        for c in 0..2 {
            self.targets[c].polyak_from(&self.critics[c], self.config.tau);
        }

        Ok(LossReport {
            critic_loss,
            actor_loss,
            alpha_loss,
            alpha: self.alpha(),
            mean_entropy: -mean_log_prob,
        })
    }

    /// Copy of the actor for rollout workers.
    pub fn policy_snapshot(&self) -> PolicySnapshot<T> {
        PolicySnapshot {
            actor: self.actor.clone(),
            act_dim: self.act_dim,
        }
    }
}

impl<T: Real> Policy<T> for SacAgent<T> {
    fn action_dim(&self) -> usize {
        self.act_dim
    }

    fn act(&self, obs: &[T]) -> Result<Vec<T>> {
        self.deterministic_action(obs)
    }
}

/// Read-only deterministic policy, cheap to clone into parallel workers.
#[derive(Clone, Debug)]
pub struct PolicySnapshot<T> {
    actor: DenseNet<T>,
    act_dim: usize,
}

impl<T: Real> Policy<T> for PolicySnapshot<T> {
    fn action_dim(&self) -> usize {
        self.act_dim
    }

    fn act(&self, obs: &[T]) -> Result<Vec<T>> {
        let raw = self.actor.forward(obs)?;
        Ok(raw[..self.act_dim].iter().map(|m| m.tanh()).collect())
    }
}
