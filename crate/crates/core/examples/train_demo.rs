//! Train the routing agent on one task of a scene and report progress.
//!
//! Usage: train_demo <scene.json> <task-index> <seed> [episodes] [stop-ratio]

use piperoute::planner::{create_planner, PlanOptions};
use piperoute::scene::SceneContext;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let scene_path = args.get(1).map(String::as_str).unwrap_or("scenes/annulus_world.json");
    let task: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0);
    let episodes: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(5000);
    let stop_ratio: Option<f64> = args.get(5).and_then(|s| s.parse().ok());

    let t0 = Instant::now();
    let scene = SceneContext::from_file(scene_path).expect("scene");
    eprintln!(
        "table {:?} built in {:.2}s",
        scene.table.dims(),
        t0.elapsed().as_secs_f64()
    );

    let opts = PlanOptions {
        episodes,
        stop_length_ratio: stop_ratio,
        ..PlanOptions::default()
    };
    let planner = create_planner("slpr").unwrap();
    let t1 = Instant::now();
    let outcome = planner.plan(&scene, task, &opts, seed).expect("plan");
    let dt = t1.elapsed().as_secs_f64();

    let euclid = scene.tasks[task].start.dist(scene.tasks[task].target);
    println!(
        "task {task} seed {seed}: success={} episodes={} first_success={:?} first_clean={:?} time={dt:.1}s",
        outcome.success, outcome.budget_used, outcome.first_success_episode, outcome.first_clean_episode
    );
    if let Some(m) = outcome.metrics {
        println!(
            "  best path: length {:.1} (euclid {euclid:.1}, ratio {:.2}), violations {}, avg_pot {:.3}, ctrl {}",
            m.length,
            m.length / euclid,
            m.violation_count,
            m.avg_potential,
            m.n_control_points
        );
    }
    // success rate over trailing 100 episodes
    let n = outcome.trace.len();
    if n >= 100 {
        let wins: f64 = outcome.trace[n - 100..]
            .iter()
            .map(|r| if *r > 8.0 { 1.0 } else { 0.0 })
            .sum();
        println!("  trailing-100 proxy success rate {:.2}", wins / 100.0);
    }
}
