use super::adam::AdamState;
use super::buffer::RolloutBuffer;
use super::mlp::MlpParams;
use super::policy::PolicyParams;
use super::ppo::ppo_update;
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Training hyperparameters. Defaults follow the reference configuration;
/// the update cadence, epoch count, minibatch size, and entropy bonus are
/// exposed here as well.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub episodes: usize,
    pub max_steps: usize,
    pub hidden: Vec<usize>,
    pub gamma: f64,
    pub lambda: f64,
    pub clip_eps: f64,
    pub lr_actor: f64,
    pub lr_critic: f64,
    /// Update the networks every this many episodes.
    pub update_every: usize,
    pub epochs: usize,
    pub minibatch: usize,
    pub entropy_coeff: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            episodes: 5000,
            max_steps: 20,
            hidden: vec![256, 256],
            gamma: 0.9,
            lambda: 0.98,
            clip_eps: 0.2,
            lr_actor: 1e-4,
            lr_critic: 5e-4,
            update_every: 20,
            epochs: 10,
            minibatch: 64,
            entropy_coeff: 0.01,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Config(format!(
                "lambda {} outside [0, 1]",
                self.lambda
            )));
        }
        if !(self.clip_eps > 0.0) {
            return Err(Error::Config(format!(
                "clip ratio {} must be > 0",
                self.clip_eps
            )));
        }
        if self.update_every == 0 || self.epochs == 0 || self.minibatch == 0 {
            return Err(Error::Config("update cadence fields must be > 0".into()));
        }
        if !(self.lr_actor > 0.0) || !(self.lr_critic > 0.0) {
            return Err(Error::Config("learning rates must be > 0".into()));
        }
        Ok(())
    }
}

/// What an environment returns for one applied action.
#[derive(Debug, Clone)]
pub struct EnvStep {
    pub obs: Vec<f64>,
    pub reward: f64,
    pub done: bool,
    pub success: bool,
}

/// Episodic environment with a fixed-size observation and bounded
/// continuous action vector.
pub trait Environment {
    fn obs_dim(&self) -> usize;
    fn action_dim(&self) -> usize;
    fn reset(&mut self) -> Result<Vec<f64>>;
    fn step(&mut self, action: &[f64]) -> Result<EnvStep>;
}

/// Per-episode summary passed to training hooks.
#[derive(Debug, Clone, Copy)]
pub struct EpisodeStats {
    /// Zero-based episode index.
    pub episode: usize,
    pub ret: f64,
    pub steps: usize,
    pub success: bool,
}

/// Trained networks plus the per-episode history.
pub struct TrainResult {
    pub actor: PolicyParams,
    pub critic: MlpParams,
    pub actor_opt: AdamState,
    pub critic_opt: AdamState,
    pub returns: Vec<f64>,
    pub successes: Vec<bool>,
    pub rng_word_pos: u128,
}

/// Train freshly initialized networks.
pub fn train<E: Environment>(env: &mut E, cfg: &TrainConfig) -> Result<TrainResult> {
    train_with_hook(env, cfg, |_, _: &E| true)
}

/// Train with a per-episode callback; returning false stops training after
/// the current episode (the partially filled update window is discarded,
/// matching the fixed update cadence).
pub fn train_with_hook<E, F>(env: &mut E, cfg: &TrainConfig, hook: F) -> Result<TrainResult>
where
    E: Environment,
    F: FnMut(&EpisodeStats, &E) -> bool,
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let actor = PolicyParams::new(env.obs_dim(), &cfg.hidden, env.action_dim(), &mut rng);
    let mut critic_sizes = vec![env.obs_dim()];
    critic_sizes.extend_from_slice(&cfg.hidden);
    critic_sizes.push(1);
    let critic = MlpParams::new(&critic_sizes, &mut rng);
    let actor_opt = AdamState::new(actor.param_len());
    let critic_opt = AdamState::new(critic.values.len());
    run_training(
        actor,
        critic,
        actor_opt,
        critic_opt,
        env,
        cfg.episodes,
        cfg,
        rng,
        hook,
    )
}

/// Continue training transferred networks against a (possibly changed)
/// environment. Optimizer moments start fresh; all other hyperparameters
/// come from `cfg`.
pub fn finetune<E: Environment>(
    actor: PolicyParams,
    critic: MlpParams,
    env: &mut E,
    episodes: usize,
    cfg: &TrainConfig,
) -> Result<TrainResult> {
    finetune_with_hook(actor, critic, env, episodes, cfg, |_, _: &E| true)
}

pub fn finetune_with_hook<E, F>(
    actor: PolicyParams,
    critic: MlpParams,
    env: &mut E,
    episodes: usize,
    cfg: &TrainConfig,
    hook: F,
) -> Result<TrainResult>
where
    E: Environment,
    F: FnMut(&EpisodeStats, &E) -> bool,
{
    cfg.validate()?;
    actor.validate()?;
    if actor.obs_dim() != env.obs_dim() || actor.action_dim() != env.action_dim() {
        return Err(Error::Shape(format!(
            "policy is {}->{} but environment is {}->{}",
            actor.obs_dim(),
            actor.action_dim(),
            env.obs_dim(),
            env.action_dim()
        )));
    }
    if critic.sizes.first() != Some(&env.obs_dim()) || critic.sizes.last() != Some(&1) {
        return Err(Error::Shape("critic architecture mismatch".into()));
    }
    let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let actor_opt = AdamState::new(actor.param_len());
    let critic_opt = AdamState::new(critic.values.len());
    run_training(
        actor, critic, actor_opt, critic_opt, env, episodes, cfg, rng, hook,
    )
}

/// Shared training loop: collect on-policy episodes, update every
/// `update_every` episodes, log returns.
#[allow(clippy::too_many_arguments)]
pub fn run_training<E, F>(
    mut actor: PolicyParams,
    mut critic: MlpParams,
    mut actor_opt: AdamState,
    mut critic_opt: AdamState,
    env: &mut E,
    episodes: usize,
    cfg: &TrainConfig,
    mut rng: ChaCha8Rng,
    mut hook: F,
) -> Result<TrainResult>
where
    E: Environment,
    F: FnMut(&EpisodeStats, &E) -> bool,
{
    let mut buffer = RolloutBuffer::new();
    let mut returns = Vec::with_capacity(episodes);
    let mut successes = Vec::with_capacity(episodes);
    let mut running_max = f64::NEG_INFINITY;

    for episode in 0..episodes {
        let mut obs = env.reset()?;
        let mut ep_return = 0.0;
        let mut steps = 0usize;
        let mut success = false;
        for _ in 0..cfg.max_steps {
            let sample = actor.sample(&obs, &mut rng)?;
            let value = critic.forward(&obs)?[0];
            let step = env.step(&sample.action)?;
            buffer.push(
                obs,
                sample.raw,
                sample.log_prob,
                step.reward,
                value,
                step.done,
            );
            ep_return += step.reward;
            steps += 1;
            obs = step.obs;
            if step.done {
                success = step.success;
                break;
            }
        }
        // episodes the environment did not terminate are truncated here;
        // mark the boundary so the advantage pass does not leak across
        if let Some(last) = buffer.dones.last_mut() {
            *last = true;
        }
        returns.push(ep_return);
        successes.push(success);
        if ep_return > running_max {
            running_max = ep_return;
            log::debug!("episode {episode}: new best return {ep_return:.3}");
        }
        if (episode + 1) % cfg.update_every == 0 {
            buffer.compute_advantages(cfg.gamma, cfg.lambda)?;
            let stats = ppo_update(
                &buffer,
                &mut actor,
                &mut critic,
                &mut actor_opt,
                &mut critic_opt,
                cfg,
                &mut rng,
            )?;
            log::debug!(
                "episode {episode}: update over {} steps, objective {:.4}, critic {:.4}",
                buffer.len(),
                stats.actor_objective,
                stats.critic_loss
            );
            buffer.clear();
        }
        let stats = EpisodeStats {
            episode,
            ret: ep_return,
            steps,
            success,
        };
        if !hook(&stats, env) {
            break;
        }
    }

    Ok(TrainResult {
        actor,
        critic,
        actor_opt,
        critic_opt,
        returns,
        successes,
        rng_word_pos: rng.get_word_pos(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1-D line world: move toward the origin, reward is negative distance.
    struct LineWorld {
        pos: f64,
        steps: usize,
    }

    impl Environment for LineWorld {
        fn obs_dim(&self) -> usize {
            2
        }
        fn action_dim(&self) -> usize {
            1
        }
        fn reset(&mut self) -> Result<Vec<f64>> {
            self.pos = 1.0;
            self.steps = 0;
            Ok(vec![self.pos, 0.0])
        }
        fn step(&mut self, action: &[f64]) -> Result<EnvStep> {
            self.pos += 0.3 * action[0];
            self.steps += 1;
            let done = self.steps >= 8 || self.pos.abs() < 0.05;
            Ok(EnvStep {
                obs: vec![self.pos, self.steps as f64 / 8.0],
                reward: -self.pos.abs(),
                done,
                success: self.pos.abs() < 0.05,
            })
        }
    }

    fn small_cfg(episodes: usize, seed: u64) -> TrainConfig {
        TrainConfig {
            episodes,
            max_steps: 8,
            hidden: vec![16, 16],
            update_every: 5,
            epochs: 3,
            minibatch: 16,
            lr_actor: 3e-3,
            lr_critic: 1e-2,
            seed,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn zero_episodes_leaves_params_at_init() {
        let mut env = LineWorld { pos: 0.0, steps: 0 };
        let cfg = small_cfg(0, 7);
        let r = train(&mut env, &cfg).unwrap();
        assert!(r.returns.is_empty());
        // fresh networks from the same seed must match exactly
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let actor = PolicyParams::new(2, &cfg.hidden, 1, &mut rng);
        assert_eq!(r.actor.values, actor.values);
    }

    #[test]
    fn return_history_has_one_entry_per_episode() {
        let mut env = LineWorld { pos: 0.0, steps: 0 };
        let r = train(&mut env, &small_cfg(23, 1)).unwrap();
        assert_eq!(r.returns.len(), 23);
        assert_eq!(r.successes.len(), 23);
    }

    #[test]
    fn seeded_runs_are_identical() {
        let run = |seed: u64| {
            let mut env = LineWorld { pos: 0.0, steps: 0 };
            train(&mut env, &small_cfg(30, seed)).unwrap()
        };
        let a = run(5);
        let b = run(5);
        assert_eq!(a.returns, b.returns);
        assert_eq!(a.actor.values, b.actor.values);
        assert_eq!(a.critic.values, b.critic.values);
        assert_eq!(a.rng_word_pos, b.rng_word_pos);
        let c = run(6);
        assert_ne!(a.returns, c.returns);
    }

    #[test]
    fn learning_improves_line_world() {
        let mut env = LineWorld { pos: 0.0, steps: 0 };
        let r = train(&mut env, &small_cfg(300, 3)).unwrap();
        let early: f64 = r.returns[..50].iter().sum::<f64>() / 50.0;
        let late: f64 = r.returns[250..].iter().sum::<f64>() / 50.0;
        assert!(
            late > early + 0.5,
            "no improvement: early {early:.3} late {late:.3}"
        );
    }

    #[test]
    fn finetune_zero_episodes_is_identity() {
        let mut env = LineWorld { pos: 0.0, steps: 0 };
        let cfg = small_cfg(10, 2);
        let r = train(&mut env, &cfg).unwrap();
        let before = r.actor.values.clone();
        let ft = finetune(r.actor, r.critic, &mut env, 0, &cfg).unwrap();
        assert_eq!(ft.actor.values, before);
        assert!(ft.returns.is_empty());
        // fresh optimizer moments
        assert_eq!(ft.actor_opt.t, 0);
    }

    #[test]
    fn finetune_rejects_architecture_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let actor = PolicyParams::new(3, &[8], 1, &mut rng);
        let critic = MlpParams::new(&[3, 8, 1], &mut rng);
        let mut env = LineWorld { pos: 0.0, steps: 0 };
        let err = finetune(actor, critic, &mut env, 5, &small_cfg(5, 0));
        assert!(matches!(err, Err(Error::Shape(_))));
    }

    #[test]
    fn hook_stops_training_early() {
        let mut env = LineWorld { pos: 0.0, steps: 0 };
        let r = train_with_hook(&mut env, &small_cfg(100, 4), |stats, _| {
            stats.episode < 12
        })
        .unwrap();
        assert_eq!(r.returns.len(), 13);
    }
}
