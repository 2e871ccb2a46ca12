//! Track the trailing-100 success rate and exploration noise over a long
//! training run on an empty scene (straight-ahead task).
//!
//! Usage: rate_probe <seed> [episodes]

use piperoute::environment::LayoutSpace;
use piperoute::geometry::CartPoint;
use piperoute::learner::{train_with_hook, TrainConfig};
use piperoute::potential::PotentialTable;
use piperoute::routing::{EnvConfig, EpisodeRunner, RoutingEnv, RoutingTask};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let seed: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let episodes: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let entropy: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.01);

    let space = LayoutSpace::new(vec![500.0], vec![800.0], 0.0, 1000.0).unwrap();
    let table = PotentialTable::build(&space, &[], 19.0).unwrap();
    let task = RoutingTask {
        start: CartPoint::new(650.0, 0.0, 100.0),
        start_normal: CartPoint::new(0.0, 0.0, 1.0),
        target: CartPoint::new(650.0, 0.0, 900.0),
        target_normal: CartPoint::new(0.0, 0.0, 1.0),
        diameter: 19.0,
    };
    let env = RoutingEnv::new(task, &table, &space, EnvConfig::default()).unwrap();
    let mut runner = EpisodeRunner::new(env);
    let cfg = TrainConfig {
        seed,
        episodes,
        entropy_coeff: entropy,
        ..TrainConfig::default()
    };
    let mut wins: Vec<bool> = Vec::new();
    let mut best_window = 0.0f64;
    let mut reached_at: Option<usize> = None;
    let result = train_with_hook(&mut runner, &cfg, |stats, _| {
        wins.push(stats.success);
        if wins.len() >= 100 {
            let rate = wins[wins.len() - 100..].iter().filter(|w| **w).count() as f64 / 100.0;
            if rate > best_window {
                best_window = rate;
            }
            if rate >= 0.9 && reached_at.is_none() {
                reached_at = Some(stats.episode + 1);
            }
            if (stats.episode + 1) % 200 == 0 {
                eprintln!("ep {}: trailing rate {rate:.2}", stats.episode + 1);
            }
        }
        true
    })
    .unwrap();
    let log_std = result.actor.log_std().to_vec();
    println!(
        "seed {seed}: best window {best_window:.2}, reached 0.9 at {:?}, final log_std {:?}",
        reached_at, log_std
    );
}
