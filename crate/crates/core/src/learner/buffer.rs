use super::gae::compute_gae;
use crate::error::{Error, Result};

/// On-policy transition store for one update window.
#[derive(Debug, Clone, Default)]
pub struct RolloutBuffer {
    pub obs: Vec<Vec<f64>>,
    /// Pre-squash actions under the behavior policy.
    pub raw_actions: Vec<Vec<f64>>,
    pub log_probs: Vec<f64>,
    pub rewards: Vec<f64>,
    pub values: Vec<f64>,
    pub dones: Vec<bool>,
    /// Present only after the advantage pass.
    pub advantages: Vec<f64>,
    pub value_targets: Vec<f64>,
}

impl RolloutBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    #[allow(clippy::too_many_arguments)]
    pub fn push(
        &mut self,
        obs: Vec<f64>,
        raw_action: Vec<f64>,
        log_prob: f64,
        reward: f64,
        value: f64,
        done: bool,
    ) {
        self.obs.push(obs);
        self.raw_actions.push(raw_action);
        self.log_probs.push(log_prob);
        self.rewards.push(reward);
        self.values.push(value);
        self.dones.push(done);
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }

    pub fn clear(&mut self) {
        self.obs.clear();
        self.raw_actions.clear();
        self.log_probs.clear();
        self.rewards.clear();
        self.values.clear();
        self.dones.clear();
        self.advantages.clear();
        self.value_targets.clear();
    }

    pub fn has_advantages(&self) -> bool {
        self.advantages.len() == self.len() && !self.is_empty()
    }

    /// Run the advantage estimator over the stored transitions.
    pub fn compute_advantages(&mut self, gamma: f64, lambda: f64) -> Result<()> {
        if self.is_empty() {
            return Err(Error::State("advantage pass on an empty buffer".into()));
        }
        let (adv, targets) = compute_gae(&self.rewards, &self.values, &self.dones, gamma, lambda)?;
        self.advantages = adv;
        self.value_targets = targets;
        Ok(())
    }
}
