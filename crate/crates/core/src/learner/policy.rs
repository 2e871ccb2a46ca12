use super::mlp;
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

const LN_2PI: f64 = 1.8378770664093453;

/// Diagonal-Gaussian policy squashed through tanh.
///
/// The mean comes from a dense network; the log standard deviations are
/// state-independent learnable parameters stored after the network weights
/// in the same flat vector (initialized to 0, i.e. unit sigma).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicyParams {
    /// Network layer sizes; the last entry is the action dimension.
    pub sizes: Vec<usize>,
    /// Network parameters followed by `action_dim` log-sigmas.
    pub values: Vec<f64>,
}

/// One draw from the policy.
#[derive(Debug, Clone)]
pub struct PolicySample {
    /// Squashed action, each channel in (-1, 1).
    pub action: Vec<f64>,
    /// Pre-squash Gaussian draw (kept for importance ratios).
    pub raw: Vec<f64>,
    /// Log-density of the squashed action.
    pub log_prob: f64,
}

impl PolicyParams {
    pub fn new(obs_dim: usize, hidden: &[usize], act_dim: usize, rng: &mut impl Rng) -> Self {
        let mut sizes = Vec::with_capacity(hidden.len() + 2);
        sizes.push(obs_dim);
        sizes.extend_from_slice(hidden);
        sizes.push(act_dim);
        let net = mlp::MlpParams::new(&sizes, rng);
        let mut values = net.values;
        values.extend(std::iter::repeat(0.0).take(act_dim));
        PolicyParams { sizes, values }
    }

    pub fn obs_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn action_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn net_len(&self) -> usize {
        mlp::param_count(&self.sizes)
    }

    pub fn param_len(&self) -> usize {
        self.net_len() + self.action_dim()
    }

    pub fn net_params(&self) -> &[f64] {
        &self.values[..self.net_len()]
    }

    pub fn log_std(&self) -> &[f64] {
        &self.values[self.net_len()..]
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.param_len() {
            return Err(Error::Shape(format!(
                "policy has {} values, architecture needs {}",
                self.values.len(),
                self.param_len()
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape("policy parameters must be finite".into()));
        }
        Ok(())
    }

    /// Gaussian mean for an observation.
    pub fn mean(&self, obs: &[f64]) -> Result<Vec<f64>> {
        mlp::forward(&self.sizes, self.net_params(), obs)
    }

    /// Deterministic action: the squashed mean.
    pub fn mean_action(&self, obs: &[f64]) -> Result<Vec<f64>> {
        Ok(self.mean(obs)?.iter().map(|m| m.tanh()).collect())
    }

    /// Draw an action; the exact squash correction is folded into the
    /// log-density.
    pub fn sample(&self, obs: &[f64], rng: &mut impl Rng) -> Result<PolicySample> {
        let mean = self.mean(obs)?;
        let log_std = self.log_std();
        let mut raw = Vec::with_capacity(mean.len());
        for (m, ls) in mean.iter().zip(log_std.iter()) {
            let z: f64 = rng.sample(StandardNormal);
            raw.push(m + ls.exp() * z);
        }
        let log_prob = log_prob_given_mean(&mean, log_std, &raw);
        let action = raw.iter().map(|u| u.tanh()).collect();
        Ok(PolicySample {
            action,
            raw,
            log_prob,
        })
    }

    /// Log-density of a stored pre-squash draw under the current
    /// parameters.
    pub fn log_prob_raw(&self, obs: &[f64], raw: &[f64]) -> Result<f64> {
        let mean = self.mean(obs)?;
        if raw.len() != mean.len() {
            return Err(Error::Shape(format!(
                "raw action has {} channels, policy has {}",
                raw.len(),
                mean.len()
            )));
        }
        Ok(log_prob_given_mean(&mean, self.log_std(), raw))
    }

    /// Entropy of the underlying Gaussian (state-independent).
    pub fn gaussian_entropy(&self) -> f64 {
        self.log_std()
            .iter()
            .map(|ls| ls + 0.5 * (1.0 + LN_2PI))
            .sum()
    }
}

/// log pi(a|s) for a squashed Gaussian, evaluated at the pre-squash draw.
pub fn log_prob_given_mean(mean: &[f64], log_std: &[f64], raw: &[f64]) -> f64 {
    let mut lp = 0.0;
    for ((m, ls), u) in mean.iter().zip(log_std.iter()).zip(raw.iter()) {
        let sigma = ls.exp();
        let z = (u - m) / sigma;
        lp += -0.5 * z * z - ls - 0.5 * LN_2PI - tanh_log_jacobian(*u);
    }
    lp
}

/// log(1 - tanh(u)^2) in a numerically stable form.
pub fn tanh_log_jacobian(u: f64) -> f64 {
    2.0 * (std::f64::consts::LN_2 - u - softplus(-2.0 * u))
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}
