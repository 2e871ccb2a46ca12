use super::adam::AdamState;
use super::mlp::MlpParams;
use super::policy::PolicyParams;
use super::train::TrainResult;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Serialized training state: architectures, flattened parameters,
/// optimizer moments, episode counter, and the RNG stream position, enough
/// to resume or fine-tune reproducibly in single-worker mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema: u32,
    pub seed: u64,
    pub episodes_trained: usize,
    pub actor_sizes: Vec<usize>,
    pub actor_values: Vec<f64>,
    pub critic_sizes: Vec<usize>,
    pub critic_values: Vec<f64>,
    pub actor_opt: OptMoments,
    pub critic_opt: OptMoments,
    /// ChaCha word position after training, as decimal text.
    pub rng_word_pos: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptMoments {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl From<&AdamState> for OptMoments {
    fn from(s: &AdamState) -> Self {
        OptMoments {
            m: s.m.clone(),
            v: s.v.clone(),
            t: s.t,
        }
    }
}

impl OptMoments {
    fn to_adam(&self) -> AdamState {
        AdamState {
            m: self.m.clone(),
            v: self.v.clone(),
            t: self.t,
            ..AdamState::new(0)
        }
    }
}

impl Checkpoint {
    pub fn from_result(result: &TrainResult, seed: u64, episodes_trained: usize) -> Self {
        Checkpoint {
            schema: 1,
            seed,
            episodes_trained,
            actor_sizes: result.actor.sizes.clone(),
            actor_values: result.actor.values.clone(),
            critic_sizes: result.critic.sizes.clone(),
            critic_values: result.critic.values.clone(),
            actor_opt: (&result.actor_opt).into(),
            critic_opt: (&result.critic_opt).into(),
            rng_word_pos: result.rng_word_pos.to_string(),
        }
    }

    pub fn actor(&self) -> Result<PolicyParams> {
        let actor = PolicyParams {
            sizes: self.actor_sizes.clone(),
            values: self.actor_values.clone(),
        };
        actor.validate()?;
        Ok(actor)
    }

    pub fn critic(&self) -> Result<MlpParams> {
        if self.critic_values.len() != super::mlp::param_count(&self.critic_sizes) {
            return Err(Error::Shape("critic checkpoint size mismatch".into()));
        }
        Ok(MlpParams {
            sizes: self.critic_sizes.clone(),
            values: self.critic_values.clone(),
        })
    }

    pub fn optimizers(&self) -> (AdamState, AdamState) {
        (self.actor_opt.to_adam(), self.critic_opt.to_adam())
    }

    pub fn rng_word_pos(&self) -> Result<u128> {
        self.rng_word_pos
            .parse::<u128>()
            .map_err(|e| Error::Config(format!("bad RNG position in checkpoint: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serialization cannot fail")
    }

    pub fn from_json(text: &str, name: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::data(name, format!("bad checkpoint: {e}")))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json())
            .map_err(|e| Error::data(path.display().to_string(), format!("cannot write: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::data(path.display().to_string(), format!("cannot read: {e}")))?;
        Self::from_json(&text, &path.display().to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::super::train::{train, TrainConfig};
    use super::super::train::{EnvStep, Environment};
    use super::*;

    struct NullEnv;
    impl Environment for NullEnv {
        fn obs_dim(&self) -> usize {
            2
        }
        fn action_dim(&self) -> usize {
            1
        }
        fn reset(&mut self) -> crate::Result<Vec<f64>> {
            Ok(vec![0.0, 0.0])
        }
        fn step(&mut self, _action: &[f64]) -> crate::Result<EnvStep> {
            Ok(EnvStep {
                obs: vec![0.0, 0.0],
                reward: 0.0,
                done: true,
                success: false,
            })
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let cfg = TrainConfig {
            episodes: 12,
            max_steps: 4,
            hidden: vec![8],
            update_every: 4,
            epochs: 2,
            minibatch: 8,
            seed: 9,
            ..TrainConfig::default()
        };
        let mut env = NullEnv;
        let result = train(&mut env, &cfg).unwrap();
        let ckpt = Checkpoint::from_result(&result, cfg.seed, 12);
        let json = ckpt.to_json();
        let back = Checkpoint::from_json(&json, "mem").unwrap();
        assert_eq!(back.actor_values, ckpt.actor_values);
        assert_eq!(back.critic_values, ckpt.critic_values);
        assert_eq!(back.actor_opt.m, ckpt.actor_opt.m);
        assert_eq!(back.rng_word_pos().unwrap(), ckpt.rng_word_pos().unwrap());
        // re-serialization is byte-identical
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn rejects_corrupted_sizes() {
        let mut env = NullEnv;
        let cfg = TrainConfig {
            episodes: 1,
            hidden: vec![4],
            update_every: 1,
            epochs: 1,
            ..TrainConfig::default()
        };
        let result = train(&mut env, &cfg).unwrap();
        let mut ckpt = Checkpoint::from_result(&result, 0, 1);
        ckpt.actor_values.pop();
        assert!(ckpt.actor().is_err());
    }
}
