use super::adam::AdamState;
use super::buffer::RolloutBuffer;
use super::mlp::{self, MlpParams};
use super::policy::{log_prob_given_mean, PolicyParams};
use super::train::TrainConfig;
use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::Rng;

/// Aggregate statistics of one clipped-surrogate update.
#[derive(Debug, Clone, Copy, Default)]
pub struct UpdateStats {
    pub actor_objective: f64,
    pub critic_loss: f64,
    pub entropy: f64,
    pub clip_fraction: f64,
    pub minibatches: usize,
}

/// Borrowed view of the samples an update epoch works on.
#[derive(Debug, Clone, Copy)]
pub struct Batch<'a> {
    pub obs: &'a [Vec<f64>],
    pub raw_actions: &'a [Vec<f64>],
    pub old_log_probs: &'a [f64],
    pub advantages: &'a [f64],
    pub value_targets: &'a [f64],
}

/// Normalize advantages to zero mean and unit variance (population).
pub fn normalize_advantages(adv: &[f64]) -> Vec<f64> {
    let n = adv.len() as f64;
    if adv.is_empty() {
        return Vec::new();
    }
    let mean = adv.iter().sum::<f64>() / n;
    let var = adv.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std < 1e-12 {
        return adv.iter().map(|a| a - mean).collect();
    }
    adv.iter().map(|a| (a - mean) / std).collect()
}

/// Clipped-surrogate actor loss (negated objective, for descent) over the
/// given sample indices: mean of min(r*A, clip(r)*A) plus the entropy
/// bonus, both negated.
pub fn actor_loss(
    actor: &PolicyParams,
    batch: &Batch,
    idx: &[usize],
    clip_eps: f64,
    entropy_coeff: f64,
) -> Result<f64> {
    let mut surr = 0.0;
    for &i in idx {
        let mean = actor.mean(&batch.obs[i])?;
        let lp = log_prob_given_mean(&mean, actor.log_std(), &batch.raw_actions[i]);
        let ratio = (lp - batch.old_log_probs[i]).exp();
        let a = ratio * batch.advantages[i];
        let b = ratio.clamp(1.0 - clip_eps, 1.0 + clip_eps) * batch.advantages[i];
        surr += a.min(b);
    }
    let objective = surr / idx.len() as f64 + entropy_coeff * actor.gaussian_entropy();
    Ok(-objective)
}

/// Analytic gradient of [`actor_loss`]; returns (loss, clip fraction).
pub fn actor_grad(
    actor: &PolicyParams,
    batch: &Batch,
    idx: &[usize],
    clip_eps: f64,
    entropy_coeff: f64,
    grads: &mut [f64],
) -> Result<(f64, f64)> {
    debug_assert_eq!(grads.len(), actor.param_len());
    let net_len = actor.net_len();
    let act_dim = actor.action_dim();
    let log_std = actor.log_std();
    let inv_n = 1.0 / idx.len() as f64;

    let mut surr = 0.0;
    let mut clipped = 0usize;
    for &i in idx {
        let (mean, cache) = mlp::forward_cached(&actor.sizes, actor.net_params(), &batch.obs[i])?;
        let raw = &batch.raw_actions[i];
        let lp = log_prob_given_mean(&mean, log_std, raw);
        let ratio = (lp - batch.old_log_probs[i]).exp();
        let adv = batch.advantages[i];
        let unclipped = ratio * adv;
        let clamped = ratio.clamp(1.0 - clip_eps, 1.0 + clip_eps) * adv;
        surr += unclipped.min(clamped);
        if ratio < 1.0 - clip_eps || ratio > 1.0 + clip_eps {
            clipped += 1;
        }
        // gradient flows only when the unclipped branch is active
        if unclipped <= clamped {
            // d(-J)/dlogpi = -adv * ratio / N
            let g = -adv * ratio * inv_n;
            let mut d_mean = vec![0.0; act_dim];
            for d in 0..act_dim {
                let sigma = log_std[d].exp();
                let z = (raw[d] - mean[d]) / sigma;
                // dlogpi/dmean = z / sigma; dlogpi/dlogstd = z^2 - 1
                d_mean[d] = g * z / sigma;
                grads[net_len + d] += g * (z * z - 1.0);
            }
            mlp::backward(
                &actor.sizes,
                actor.net_params(),
                &cache,
                &d_mean,
                &mut grads[..net_len],
            );
        }
    }
    // entropy bonus: d(-J)/dlogstd = -coeff
    for d in 0..act_dim {
        grads[net_len + d] -= entropy_coeff;
    }
    let loss = -(surr * inv_n + entropy_coeff * actor.gaussian_entropy());
    Ok((loss, clipped as f64 / idx.len() as f64))
}

/// Mean squared error between critic predictions and the value targets.
pub fn critic_loss(critic: &MlpParams, batch: &Batch, idx: &[usize]) -> Result<f64> {
    let mut acc = 0.0;
    for &i in idx {
        let v = critic.forward(&batch.obs[i])?[0];
        let e = v - batch.value_targets[i];
        acc += e * e;
    }
    Ok(acc / idx.len() as f64)
}

/// Analytic gradient of [`critic_loss`].
pub fn critic_grad(
    critic: &MlpParams,
    batch: &Batch,
    idx: &[usize],
    grads: &mut [f64],
) -> Result<f64> {
    let inv_n = 1.0 / idx.len() as f64;
    let mut acc = 0.0;
    for &i in idx {
        let (out, cache) = critic.forward_cached(&batch.obs[i])?;
        let e = out[0] - batch.value_targets[i];
        acc += e * e;
        critic.backward(&cache, &[2.0 * e * inv_n], grads);
    }
    Ok(acc * inv_n)
}

/// One PPO update over a filled rollout buffer: several epochs of shuffled
/// minibatches, ascending the clipped surrogate for the actor and
/// descending the value regression for the critic, each with its own Adam
/// state. Advantages are normalized once over the whole update batch.
#[allow(clippy::too_many_arguments)]
pub fn ppo_update(
    buffer: &RolloutBuffer,
    actor: &mut PolicyParams,
    critic: &mut MlpParams,
    actor_opt: &mut AdamState,
    critic_opt: &mut AdamState,
    cfg: &TrainConfig,
    rng: &mut impl Rng,
) -> Result<UpdateStats> {
    if buffer.is_empty() {
        return Err(Error::State("update on an empty rollout buffer".into()));
    }
    if !buffer.has_advantages() {
        return Err(Error::State(
            "advantages missing; run the advantage pass first".into(),
        ));
    }
    let normalized = normalize_advantages(&buffer.advantages);
    let batch = Batch {
        obs: &buffer.obs,
        raw_actions: &buffer.raw_actions,
        old_log_probs: &buffer.log_probs,
        advantages: &normalized,
        value_targets: &buffer.value_targets,
    };

    let mut stats = UpdateStats::default();
    let mut actor_grads = vec![0.0; actor.param_len()];
    let mut critic_grads = vec![0.0; critic.values.len()];
    let mut order: Vec<usize> = (0..buffer.len()).collect();
    for _ in 0..cfg.epochs {
        order.shuffle(rng);
        for chunk in order.chunks(cfg.minibatch.max(1)) {
            actor_grads.fill(0.0);
            let (loss, clip_frac) = actor_grad(
                actor,
                &batch,
                chunk,
                cfg.clip_eps,
                cfg.entropy_coeff,
                &mut actor_grads,
            )?;
            actor_opt.step(&mut actor.values, &actor_grads, cfg.lr_actor);

            critic_grads.fill(0.0);
            let closs = critic_grad(critic, &batch, chunk, &mut critic_grads)?;
            critic_opt.step(&mut critic.values, &critic_grads, cfg.lr_critic);

            stats.actor_objective += -loss;
            stats.critic_loss += closs;
            stats.clip_fraction += clip_frac;
            stats.minibatches += 1;
        }
    }
    let n = stats.minibatches.max(1) as f64;
    stats.actor_objective /= n;
    stats.critic_loss /= n;
    stats.clip_fraction /= n;
    stats.entropy = actor.gaussian_entropy();
    Ok(stats)
}
