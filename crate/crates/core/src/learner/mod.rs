//! From-scratch actor-critic learning stack.
//!
//! A flat-parameter dense network engine with analytic backprop, a
//! tanh-squashed diagonal-Gaussian policy with exact change-of-variables
//! log-densities, generalized advantage estimation, the clipped-surrogate
//! policy update with a separate value regression, Adam, and an episodic
//! training loop with transfer fine-tuning.

mod adam;
mod buffer;
mod checkpoint;
mod gae;
mod mlp;
mod policy;
mod ppo;
mod train;

pub use adam::AdamState;
pub use buffer::RolloutBuffer;
pub use checkpoint::{Checkpoint, OptMoments};
pub use gae::compute_gae;
pub use mlp::{backward as mlp_backward, forward as mlp_forward, param_count, Cache, MlpParams};
pub use policy::{log_prob_given_mean, tanh_log_jacobian, PolicyParams, PolicySample};
pub use ppo::{
    actor_grad, actor_loss, critic_grad, critic_loss, normalize_advantages, ppo_update, Batch,
    UpdateStats,
};
pub use train::{
    finetune, finetune_with_hook, run_training, train, train_with_hook, EnvStep, Environment,
    EpisodeStats, TrainConfig, TrainResult,
};
