use crate::error::{Error, Result};

/// Generalized advantage estimation over a flat batch of transitions.
///
/// `dones[i]` marks the last transition of an episode; the bootstrap value
/// after a terminal transition is 0, and the exponentially weighted sum of
/// temporal-difference errors truncates there. Returns the advantages and
/// the value regression targets (advantage plus the stored value).
pub fn compute_gae(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    gamma: f64,
    lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = rewards.len();
    if values.len() != n || dones.len() != n {
        return Err(Error::Shape(format!(
            "misaligned rollout arrays: {} rewards, {} values, {} dones",
            n,
            values.len(),
            dones.len()
        )));
    }
    let mut advantages = vec![0.0; n];
    let mut next_adv = 0.0;
    for i in (0..n).rev() {
        let (next_value, carried) = if dones[i] {
            (0.0, 0.0)
        } else if i + 1 < n {
            (values[i + 1], next_adv)
        } else {
            // truncated tail without a recorded successor: bootstrap 0
            (0.0, 0.0)
        };
        let delta = rewards[i] + gamma * next_value - values[i];
        next_adv = delta + gamma * lambda * carried;
        advantages[i] = next_adv;
    }
    let targets = advantages
        .iter()
        .zip(values.iter())
        .map(|(a, v)| a + v)
        .collect();
    Ok((advantages, targets))
}
