//! JSON snapshot of a trained agent.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::nn::DenseNet;
use super::sac::{SacAgent, SacConfig};

pub const CHECKPOINT_FORMAT: &str = "salamander-sac";
pub const CHECKPOINT_VERSION: u32 = 1;

/// All network parameters and the temperature, stored in `f64`.
/// Optimiser moments are not kept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub format_version: u32,
    pub config_hash: String,
    pub robot_version: String,
    pub seed: u64,
    pub env_steps: usize,
    pub sac: SacConfig<f64>,
    pub actor: DenseNet<f64>,
    pub critics: [DenseNet<f64>; 2],
    pub targets: [DenseNet<f64>; 2],
    pub log_alpha: f64,
}

fn cast_config<T: Real, U: Real>(c: &SacConfig<T>) -> SacConfig<U> {
    let f = |v: T| U::lit(v.as_f64());
    SacConfig {
        gamma: f(c.gamma),
        reward_scale: f(c.reward_scale),
        tau: f(c.tau),
        lr: f(c.lr),
        batch_size: c.batch_size,
        hidden: c.hidden,
        buffer_capacity: c.buffer_capacity,
        warmup: c.warmup,
        updates_per_step: c.updates_per_step,
        init_alpha: f(c.init_alpha),
        auto_alpha: c.auto_alpha,
        target_entropy: f(c.target_entropy),
    }
}

impl Checkpoint {
    pub fn from_agent<T: Real>(
        agent: &SacAgent<T>,
        config_hash: &str,
        robot_version: &str,
        seed: u64,
        env_steps: usize,
    ) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.into(),
            format_version: CHECKPOINT_VERSION,
            config_hash: config_hash.into(),
            robot_version: robot_version.into(),
            seed,
            env_steps,
            sac: cast_config(agent.config()),
            actor: agent.actor().cast(),
            critics: [agent.critics()[0].cast(), agent.critics()[1].cast()],
            targets: [agent.targets()[0].cast(), agent.targets()[1].cast()],
            log_alpha: agent.log_alpha().as_f64(),
        }
    }

    pub fn to_agent<T: Real>(&self) -> Result<SacAgent<T>> {
        SacAgent::from_networks(
            cast_config(&self.sac),
            self.actor.cast(),
            [self.critics[0].cast(), self.critics[1].cast()],
            [self.targets[0].cast(), self.targets[1].cast()],
            T::lit(self.log_alpha),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        if c.format != CHECKPOINT_FORMAT {
            return Err(Error::Checkpoint(format!("unrecognised format `{}`", c.format)));
        }
        if c.format_version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported format version {} (expected {CHECKPOINT_VERSION})",
                c.format_version
            )));
        }
        Ok(c)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cfg = SacConfig {
            hidden: 8,
            ..SacConfig::default()
        };
        let agent = SacAgent::<f64>::new(5, 2, cfg, &mut rng).unwrap();
        let ck = Checkpoint::from_agent(&agent, "abc", "9j-rl", 3, 100);
        let back = Checkpoint::from_json(&ck.to_json().unwrap()).unwrap();
        assert_eq!(back, ck);
        let restored: SacAgent<f64> = back.to_agent().unwrap();
        let obs = [0.1, -0.3, 0.7, 1.2, 0.0];
        assert_eq!(
            restored.deterministic_action(&obs).unwrap(),
            agent.deterministic_action(&obs).unwrap()
        );
    }

    #[test]
    fn wrong_format_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let agent = SacAgent::<f64>::new(2, 1, SacConfig::default(), &mut rng).unwrap();
        let mut ck = Checkpoint::from_agent(&agent, "h", "v", 0, 0);
        ck.format_version = 99;
        assert!(Checkpoint::from_json(&ck.to_json().unwrap()).is_err());
    }
}
