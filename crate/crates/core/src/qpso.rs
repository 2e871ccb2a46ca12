//! Quantum-behaved particle swarm baseline.
//!
//! Particles encode a fixed set of ten control points, each as three
//! coordinates plus a weight channel, decoded into a clamped cubic curve
//! between the forced port points. The swarm contracts toward a mean-best
//! attractor with logarithmic jumps whose amplitude anneals over the run.

use crate::environment::LayoutSpace;
use crate::error::{Error, Result};
use crate::geometry::{CartPoint, EndMode, NurbsPath, PIPE_DEGREE};
use crate::potential::PotentialTable;
use crate::routing::{potential_rewards, RoutingTask};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Control points encoded per particle.
pub const ENCODED_POINTS: usize = 10;
/// Channels per control point: x, y, z, weight.
pub const CHANNELS: usize = 4;
/// Particle dimensionality.
pub const DIMENSION: usize = ENCODED_POINTS * CHANNELS;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SwarmConfig {
    pub swarm_size: usize,
    pub iterations: usize,
    /// Contraction-expansion coefficient at the first iteration.
    pub beta_start: f64,
    /// Coefficient at the last iteration (linear anneal).
    pub beta_end: f64,
    pub seed: u64,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        SwarmConfig {
            swarm_size: 30,
            iterations: 1000,
            beta_start: 1.0,
            beta_end: 0.5,
            seed: 0,
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 {
            return Err(Error::Config(format!(
                "swarm size {} must be at least 2",
                self.swarm_size
            )));
        }
        if self.iterations < 1 {
            return Err(Error::Config("iteration count must be >= 1".into()));
        }
        Ok(())
    }

    fn beta_at(&self, iteration: usize) -> f64 {
        if self.iterations <= 1 {
            return self.beta_start;
        }
        let t = iteration as f64 / (self.iterations - 1) as f64;
        self.beta_start + (self.beta_end - self.beta_start) * t
    }
}

#[derive(Debug, Clone)]
pub struct Particle {
    pub position: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
}

#[derive(Debug, Clone)]
pub struct Swarm {
    pub particles: Vec<Particle>,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
}

impl Swarm {
    /// Initialize particles uniformly inside per-dimension bounds and
    /// evaluate them.
    pub fn init(
        objective: &dyn Fn(&[f64]) -> f64,
        lo: &[f64],
        hi: &[f64],
        size: usize,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        let dim = lo.len();
        let mut particles = Vec::with_capacity(size);
        let mut best_position = vec![0.0; dim];
        let mut best_fitness = f64::INFINITY;
        for _ in 0..size {
            let position: Vec<f64> = (0..dim)
                .map(|d| {
                    if hi[d] > lo[d] {
                        rng.random_range(lo[d]..hi[d])
                    } else {
                        lo[d]
                    }
                })
                .collect();
            let fitness = objective(&position);
            if fitness < best_fitness {
                best_fitness = fitness;
                best_position = position.clone();
            }
            particles.push(Particle {
                best_position: position.clone(),
                position,
                best_fitness: fitness,
            });
        }
        Swarm {
            particles,
            best_position,
            best_fitness,
        }
    }
}

/// One swarm sweep: every particle jumps around its attractor (a random
/// convex mix of its personal best and the global best) with an amplitude
/// set by the spread to the mean personal best, then bests are refreshed.
pub fn qpso_step(
    swarm: &mut Swarm,
    objective: &dyn Fn(&[f64]) -> f64,
    beta: f64,
    rng: &mut ChaCha8Rng,
) {
    let dim = swarm.best_position.len();
    let n = swarm.particles.len() as f64;
    let mut mbest = vec![0.0; dim];
    for p in &swarm.particles {
        for d in 0..dim {
            mbest[d] += p.best_position[d];
        }
    }
    for v in mbest.iter_mut() {
        *v /= n;
    }

    for p in swarm.particles.iter_mut() {
        for d in 0..dim {
            let phi: f64 = rng.random_range(0.0..1.0);
            let attractor = phi * p.best_position[d] + (1.0 - phi) * swarm.best_position[d];
            let u: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
            let jump = beta * (mbest[d] - p.position[d]).abs() * (1.0 / u).ln();
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            p.position[d] = attractor + sign * jump;
        }
        let fitness = objective(&p.position);
        if fitness < p.best_fitness {
            p.best_fitness = fitness;
            p.best_position = p.position.clone();
        }
        if fitness < swarm.best_fitness {
            swarm.best_fitness = fitness;
            swarm.best_position = p.position.clone();
        }
    }
}

/// Minimize an objective over box-initialized particles; returns the best
/// position, its fitness, and the per-iteration best-fitness trace.
pub fn optimize_fn(
    objective: &dyn Fn(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    cfg: &SwarmConfig,
) -> Result<(Vec<f64>, f64, Vec<f64>)> {
    cfg.validate()?;
    if lo.len() != hi.len() || lo.is_empty() {
        return Err(Error::Shape("mismatched initialization bounds".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut swarm = Swarm::init(objective, lo, hi, cfg.swarm_size, &mut rng);
    let mut trace = Vec::with_capacity(cfg.iterations);
    for it in 0..cfg.iterations {
        qpso_step(&mut swarm, objective, cfg.beta_at(it), &mut rng);
        trace.push(swarm.best_fitness);
    }
    Ok((swarm.best_position, swarm.best_fitness, trace))
}

/// Decode a particle into a clamped cubic curve: forced start points, the
/// ten encoded points (weights through exp so they stay positive), forced
/// target points.
pub fn decode_particle(position: &[f64], task: &RoutingTask) -> Result<NurbsPath> {
    if position.len() != DIMENSION {
        return Err(Error::Shape(format!(
            "particle has {} dims, expected {DIMENSION}",
            position.len()
        )));
    }
    let mut ctrl = Vec::with_capacity(ENCODED_POINTS + 6);
    let mut weights = Vec::with_capacity(ENCODED_POINTS + 6);
    ctrl.extend_from_slice(&task.start_points());
    weights.extend_from_slice(&[1.0; 3]);
    for chunk in position.chunks_exact(CHANNELS) {
        ctrl.push(CartPoint::new(chunk[0], chunk[1], chunk[2]));
        weights.push(chunk[3].exp());
    }
    ctrl.extend_from_slice(&task.target_points());
    weights.extend_from_slice(&[1.0; 3]);
    NurbsPath::with_mode(PIPE_DEGREE, ctrl, weights, EndMode::ClampedBoth)
}

/// Path objective mirroring the routing reward terms: weighted length plus
/// penalties for rule violations and for straying from high-tendency
/// space. Lower is better. Progress and success terms are omitted because
/// the encoding pins both endpoints.
pub fn fitness(
    position: &[f64],
    task: &RoutingTask,
    table: &PotentialTable,
    reward_weights: &[f64; 5],
    dl: f64,
) -> f64 {
    let path = match decode_particle(position, task) {
        Ok(p) => p,
        Err(_) => return f64::INFINITY,
    };
    let (lo, hi) = path.domain();
    let (samples, length) = match path.sample_with_length(lo, hi, dl) {
        Ok(v) => v,
        Err(_) => return f64::INFINITY,
    };
    let pots: Vec<f64> = samples.iter().map(|p| table.query(*p)).collect();
    let (r3, r4) = potential_rewards(&pots, table.max_value());
    reward_weights[1] * length - reward_weights[2] * r3 - reward_weights[3] * r4
}

/// Outcome of a swarm run over one routing task.
pub struct QpsoOutcome {
    pub path: NurbsPath,
    pub fitness: f64,
    pub trace: Vec<f64>,
}

/// Run the swarm on a routing task. Positions are initialized uniformly
/// over the Cartesian bounding box of the layout space (weight channels
/// uniform in [-1, 1]) and left unconstrained afterwards; leaving the
/// space is penalized through the table sentinel.
pub fn optimize_path(
    task: &RoutingTask,
    table: &PotentialTable,
    space: &LayoutSpace,
    reward_weights: &[f64; 5],
    dl: f64,
    cfg: &SwarmConfig,
) -> Result<QpsoOutcome> {
    task.validate()?;
    let r = space.rho_max();
    let mut lo = Vec::with_capacity(DIMENSION);
    let mut hi = Vec::with_capacity(DIMENSION);
    for _ in 0..ENCODED_POINTS {
        lo.extend_from_slice(&[-r, -r, space.z_min(), -1.0]);
        hi.extend_from_slice(&[r, r, space.z_max(), 1.0]);
    }
    let objective = move |x: &[f64]| fitness(x, task, table, reward_weights, dl);
    let (best, best_fitness, trace) = optimize_fn(&objective, &lo, &hi, cfg)?;
    Ok(QpsoOutcome {
        path: decode_particle(&best, task)?,
        fitness: best_fitness,
        trace,
    })
}
