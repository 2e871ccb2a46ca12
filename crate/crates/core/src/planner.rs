//! Route-planning strategies behind a common trait.
//!
//! Each planner is registered by name and selected at runtime (CLI flag or
//! benchmark config). `slpr` trains the actor-critic agent on the task and
//! keeps the best finalized path it encounters; `qpso` runs the particle
//! swarm over a fixed-size control polygon.

use crate::error::{Error, Result};
use crate::geometry::NurbsPath;
use crate::learner::{train_with_hook, PolicyParams, TrainConfig};
use crate::qpso::{optimize_path, SwarmConfig};
use crate::routing::{EnvConfig, EpisodeRunner, PathMetrics, RoutingEnv};
use crate::scene::SceneContext;

/// Knobs shared by all planners; planner-specific fields are ignored by
/// the others.
#[derive(Debug, Clone)]
pub struct PlanOptions {
    /// Training episode budget (`slpr`).
    pub episodes: usize,
    /// Swarm iterations (`qpso`).
    pub iterations: usize,
    /// Swarm size (`qpso`).
    pub swarm_size: usize,
    /// Stop as soon as a violation-free path at most this multiple of the
    /// straight-line port distance is found (`slpr`).
    pub stop_length_ratio: Option<f64>,
    pub env: EnvConfig,
    pub train: TrainConfig,
}

impl Default for PlanOptions {
    fn default() -> Self {
        let swarm = SwarmConfig::default();
        PlanOptions {
            episodes: TrainConfig::default().episodes,
            iterations: swarm.iterations,
            swarm_size: swarm.swarm_size,
            stop_length_ratio: None,
            env: EnvConfig::default(),
            train: TrainConfig::default(),
        }
    }
}

/// What a planner produced for one task.
#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub method: &'static str,
    /// Best finalized path, when one was reached.
    pub path: Option<NurbsPath>,
    pub metrics: Option<PathMetrics>,
    /// A connected, violation-free path was produced.
    pub success: bool,
    /// Episodes or iterations actually spent.
    pub budget_used: usize,
    /// First episode that reached the target region (`slpr`).
    pub first_success_episode: Option<usize>,
    /// First episode whose finalized path was violation-free (`slpr`).
    pub first_clean_episode: Option<usize>,
    /// Per-episode returns (`slpr`) or per-iteration best fitness (`qpso`).
    pub trace: Vec<f64>,
}

/// A routing strategy selectable by name.
pub trait PathPlanner: Sync + Send {
    fn name(&self) -> &'static str;
    fn plan(
        &self,
        scene: &SceneContext,
        task_idx: usize,
        opts: &PlanOptions,
        seed: u64,
    ) -> Result<PlanOutcome>;
}

/// Names of all registered planners.
pub fn planner_names() -> &'static [&'static str] {
    &["slpr", "qpso"]
}

/// Look up a planner by name.
pub fn create_planner(name: &str) -> Option<Box<dyn PathPlanner>> {
    match name {
        "slpr" => Some(Box::new(SlprPlanner)),
        "qpso" => Some(Box::new(QpsoPlanner)),
        _ => None,
    }
}

/// All registered planners, in registry order.
pub fn registry() -> Vec<Box<dyn PathPlanner>> {
    planner_names()
        .iter()
        .map(|n| create_planner(n).expect("registered name"))
        .collect()
}

fn task_or_err(scene: &SceneContext, task_idx: usize) -> Result<crate::routing::RoutingTask> {
    scene.tasks.get(task_idx).copied().ok_or_else(|| {
        Error::Task(format!(
            "task index {task_idx} out of range ({} tasks in scene)",
            scene.tasks.len()
        ))
    })
}

/// Self-learning planner: trains on the task and tracks the best finalized
/// path (fewest violations, then shortest).
pub struct SlprPlanner;

impl PathPlanner for SlprPlanner {
    fn name(&self) -> &'static str {
        "slpr"
    }

    fn plan(
        &self,
        scene: &SceneContext,
        task_idx: usize,
        opts: &PlanOptions,
        seed: u64,
    ) -> Result<PlanOutcome> {
        let task = task_or_err(scene, task_idx)?;
        let env = RoutingEnv::new(task, &scene.table, &scene.space, opts.env.clone())?;
        let mut runner = EpisodeRunner::new(env);
        let cfg = TrainConfig {
            seed,
            episodes: opts.episodes,
            ..opts.train.clone()
        };
        let euclid = task.start.dist(task.target);
        let dl = opts.env.sample_interval;

        let mut best: Option<(PathMetrics, NurbsPath)> = None;
        let mut first_success = None;
        let mut first_clean = None;
        let result = train_with_hook(&mut runner, &cfg, |stats, r: &EpisodeRunner| {
            if !stats.success {
                return true;
            }
            if first_success.is_none() {
                first_success = Some(stats.episode);
            }
            let path = match r.finalize() {
                Ok(p) => p,
                Err(_) => return true,
            };
            let metrics = match RoutingEnv::evaluate_path(&path, &scene.table, dl) {
                Ok(m) => m,
                Err(_) => return true,
            };
            if metrics.violation_count == 0 && first_clean.is_none() {
                first_clean = Some(stats.episode);
            }
            let better = match &best {
                None => true,
                Some((b, _)) => {
                    metrics.violation_count < b.violation_count
                        || (metrics.violation_count == b.violation_count
                            && metrics.length < b.length)
                }
            };
            if better {
                best = Some((metrics, path));
            }
            if let Some(ratio) = opts.stop_length_ratio {
                if metrics.violation_count == 0 && metrics.length <= ratio * euclid {
                    return false;
                }
            }
            true
        })?;

        let (metrics, path) = match best {
            Some((m, p)) => (Some(m), Some(p)),
            None => (None, None),
        };
        let success = metrics.map(|m| m.violation_count == 0).unwrap_or(false);
        Ok(PlanOutcome {
            method: self.name(),
            path,
            metrics,
            success,
            budget_used: result.returns.len(),
            first_success_episode: first_success,
            first_clean_episode: first_clean,
            trace: result.returns,
        })
    }
}

/// Swarm planner over the fixed ten-point encoding.
pub struct QpsoPlanner;

impl PathPlanner for QpsoPlanner {
    fn name(&self) -> &'static str {
        "qpso"
    }

    fn plan(
        &self,
        scene: &SceneContext,
        task_idx: usize,
        opts: &PlanOptions,
        seed: u64,
    ) -> Result<PlanOutcome> {
        let task = task_or_err(scene, task_idx)?;
        let cfg = SwarmConfig {
            swarm_size: opts.swarm_size,
            iterations: opts.iterations,
            seed,
            ..SwarmConfig::default()
        };
        let outcome = optimize_path(
            &task,
            &scene.table,
            &scene.space,
            &opts.env.reward_weights,
            opts.env.sample_interval,
            &cfg,
        )?;
        let metrics =
            RoutingEnv::evaluate_path(&outcome.path, &scene.table, opts.env.sample_interval)?;
        Ok(PlanOutcome {
            method: self.name(),
            success: metrics.violation_count == 0,
            budget_used: outcome.trace.len(),
            first_success_episode: None,
            first_clean_episode: None,
            trace: outcome.trace,
            path: Some(outcome.path),
            metrics: Some(metrics),
        })
    }
}

/// Deterministic rollout of a trained policy (squashed mean actions);
/// returns the finalized path when the rollout reaches the target.
pub fn greedy_route(
    actor: &PolicyParams,
    scene: &SceneContext,
    task_idx: usize,
    env_cfg: &EnvConfig,
) -> Result<Option<NurbsPath>> {
    let task = task_or_err(scene, task_idx)?;
    let env = RoutingEnv::new(task, &scene.table, &scene.space, env_cfg.clone())?;
    let mut state = env.init_episode()?;
    while !state.done {
        let obs = env.observe(&state);
        let action = actor.mean_action(obs.as_slice())?;
        let mut a = [0.0; 4];
        a.copy_from_slice(&action);
        env.step(&mut state, &a)?;
    }
    if state.success {
        Ok(Some(env.finalize_path(&state)?))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_resolves_names() {
        assert_eq!(planner_names(), &["slpr", "qpso"]);
        for name in planner_names() {
            let p = create_planner(name).unwrap();
            assert_eq!(p.name(), *name);
        }
        assert!(create_planner("dijkstra").is_none());
        assert_eq!(registry().len(), 2);
    }
}
