//! Probe the dynamic-environment protocol: train on the base scene, insert
//! a blocking obstacle, then compare fine-tuning against retraining.
//!
//! Usage: finetune_probe <seed> [base-episodes] [retrain-cap]

use piperoute::learner::{finetune_with_hook, train_with_hook, TrainConfig};
use piperoute::routing::{EnvConfig, EpisodeRunner, RoutingEnv};
use piperoute::scene::SceneContext;
use std::time::Instant;

fn first_clean(
    runner_scene: &SceneContext,
    stats_success: bool,
    runner: &EpisodeRunner,
    dl: f64,
) -> bool {
    if !stats_success {
        return false;
    }
    match runner.finalize() {
        Ok(path) => match RoutingEnv::evaluate_path(&path, &runner_scene.table, dl) {
            Ok(m) => m.violation_count == 0,
            Err(_) => false,
        },
        Err(_) => false,
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let seed: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let base_eps: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(400);
    let cap: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1000);

    let base = SceneContext::from_file("scenes/annulus_world.json").expect("scene");
    let blocked = SceneContext::from_file("scenes/annulus_world_blocked.json").expect("scene");
    let env_cfg = EnvConfig::default();
    let dl = env_cfg.sample_interval;

    // 1. train the base model on task 0 of the unblocked scene
    let cfg = TrainConfig {
        seed,
        episodes: base_eps,
        ..TrainConfig::default()
    };
    let env = RoutingEnv::new(base.tasks[0], &base.table, &base.space, env_cfg.clone()).unwrap();
    let mut runner = EpisodeRunner::new(env);
    let t0 = Instant::now();
    let result = train_with_hook(&mut runner, &cfg, |_, _| true).unwrap();
    let base_rate: f64 = result.successes[base_eps.saturating_sub(100)..]
        .iter()
        .map(|s| if *s { 1.0 } else { 0.0 })
        .sum::<f64>()
        / 100.0;
    eprintln!(
        "seed {seed}: base trained {base_eps} eps in {:.0}s, trailing success {base_rate:.2}",
        t0.elapsed().as_secs_f64()
    );

    // 2. fine-tune 100 episodes against the blocked table
    let env =
        RoutingEnv::new(blocked.tasks[0], &blocked.table, &blocked.space, env_cfg.clone())
            .unwrap();
    let mut runner = EpisodeRunner::new(env);
    let mut ft_first: Option<usize> = None;
    let ft_cfg = TrainConfig {
        seed: seed + 1000,
        ..cfg.clone()
    };
    let t1 = Instant::now();
    let _ = finetune_with_hook(
        result.actor.clone(),
        result.critic.clone(),
        &mut runner,
        100,
        &ft_cfg,
        |stats, r| {
            if ft_first.is_none() && first_clean(&blocked, stats.success, r, dl) {
                ft_first = Some(stats.episode + 1);
            }
            true
        },
    )
    .unwrap();
    eprintln!(
        "  fine-tune: first clean success at {:?} ({:.0}s)",
        ft_first,
        t1.elapsed().as_secs_f64()
    );

    // 3. retrain from scratch on the blocked scene
    let env =
        RoutingEnv::new(blocked.tasks[0], &blocked.table, &blocked.space, env_cfg.clone())
            .unwrap();
    let mut runner = EpisodeRunner::new(env);
    let mut scratch_first: Option<usize> = None;
    let scratch_cfg = TrainConfig {
        seed: seed + 2000,
        episodes: cap,
        ..cfg.clone()
    };
    let t2 = Instant::now();
    let _ = train_with_hook(&mut runner, &scratch_cfg, |stats, r| {
        if scratch_first.is_none() && first_clean(&blocked, stats.success, r, dl) {
            scratch_first = Some(stats.episode + 1);
            return false;
        }
        true
    })
    .unwrap();
    eprintln!(
        "  scratch: first clean success at {:?} ({:.0}s)",
        scratch_first,
        t2.elapsed().as_secs_f64()
    );
    println!(
        "{seed},{},{}",
        ft_first.map(|v| v as i64).unwrap_or(-1),
        scratch_first.map(|v| v as i64).unwrap_or(-1)
    );
}
