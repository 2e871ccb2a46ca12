//! Curve-growing routing environment.
//!
//! An episode starts from three forced control points extending the start
//! port along its normal. Each action appends one control point (a bounded
//! displacement from the previous one plus a weight), the open-ended knot
//! vector gains one span, and the newly evaluable curve segment is scored:
//! progress toward the target region, segment length, rule violations,
//! layout tendency, and a success bonus. On success the three target-port
//! control points are appended and the knots re-clamped, which makes the
//! finished curve interpolate both ports tangentially.

use crate::environment::LayoutSpace;
use crate::error::{Error, Result};
use crate::geometry::{CartPoint, EndMode, NurbsPath, PIPE_DEGREE};
use crate::learner::{EnvStep, Environment};
use crate::potential::PotentialTable;
use serde::{Deserialize, Serialize};

pub const OBS_DIM: usize = 16;
pub const ACT_DIM: usize = 4;
const RAY_COUNT: usize = 10;

/// A single pipe to route: ports, port normals, and the pipe diameter.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RoutingTask {
    pub start: CartPoint,
    pub start_normal: CartPoint,
    pub target: CartPoint,
    pub target_normal: CartPoint,
    /// Pipe outer diameter (mm).
    pub diameter: f64,
}

impl RoutingTask {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("start normal", self.start_normal),
            ("target normal", self.target_normal),
        ] {
            if (v.norm() - 1.0).abs() > 1e-6 {
                return Err(Error::Task(format!("{name} is not a unit vector")));
            }
        }
        if !(self.diameter > 0.0) {
            return Err(Error::Task(format!(
                "pipe diameter {} must be > 0",
                self.diameter
            )));
        }
        if self.start.dist(self.target) == 0.0 {
            return Err(Error::Task("start and target coincide".into()));
        }
        if !self.start.is_finite() || !self.target.is_finite() {
            return Err(Error::Task("ports must be finite".into()));
        }
        Ok(())
    }

    /// Forced start-side control points: the port plus one and two pipe
    /// diameters along the port normal.
    pub fn start_points(&self) -> [CartPoint; 3] {
        [
            self.start,
            self.start + self.start_normal.scale(self.diameter),
            self.start + self.start_normal.scale(2.0 * self.diameter),
        ]
    }

    /// Forced target-side control points, ending at the target port.
    pub fn target_points(&self) -> [CartPoint; 3] {
        [
            self.target - self.target_normal.scale(2.0 * self.diameter),
            self.target - self.target_normal.scale(self.diameter),
            self.target,
        ]
    }

    /// The point the growing curve must reach: two diameters short of the
    /// target along its port normal.
    pub fn approach_point(&self) -> CartPoint {
        self.target_points()[0]
    }
}

/// Environment parameters; defaults follow the reference configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvConfig {
    pub max_steps: usize,
    /// Success radius around the approach point (mm).
    pub d_max: f64,
    /// Arc-length sampling interval for scoring (mm).
    pub sample_interval: f64,
    /// Displacement per unit action channel (mm).
    pub action_scale: f64,
    /// Observation ray cutoff (mm).
    pub ray_max: f64,
    /// Weights of the five reward components.
    pub reward_weights: [f64; 5],
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            max_steps: 20,
            d_max: 100.0,
            sample_interval: 5.0,
            action_scale: 200.0,
            ray_max: 500.0,
            reward_weights: [0.01, 0.002, 0.05, 1.0, 10.0],
        }
    }
}

/// Growing-curve state within one episode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpisodeState {
    pub control_points: Vec<CartPoint>,
    pub weights: Vec<f64>,
    /// Endpoint of the currently evaluable curve.
    pub agent_pos: CartPoint,
    pub step_index: usize,
    /// Right edge of the previously scored parameter range.
    pub prev_domain_end: f64,
    pub done: bool,
    pub success: bool,
}

/// Observation vector: agent position (3), offset to the target (3), and
/// ten normalized clearance rays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation(pub [f64; OBS_DIM]);

impl Observation {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Per-step result: the weighted reward, its five components, and the
/// termination flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub components: [f64; 5],
    pub done: bool,
    pub success: bool,
}

/// Quality summary of a finished path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathMetrics {
    pub length: f64,
    /// Mean potential over samples in permitted space (0 when none).
    pub avg_potential: f64,
    /// Samples whose potential is negative.
    pub violation_count: usize,
    /// Agent-placed control points (excludes the six forced port points).
    pub n_control_points: usize,
}

/// Progress component: how much closer the curve endpoint moved toward the
/// approach point.
pub fn progress_reward(approach: CartPoint, old_pos: CartPoint, new_pos: CartPoint) -> f64 {
    approach.dist(old_pos) - approach.dist(new_pos)
}

/// Rule components from sampled potentials: the sum of negative samples,
/// and the mean of non-negative samples referenced to the table maximum
/// (0 when no sample is non-negative).
pub fn potential_rewards(potentials: &[f64], table_max: f64) -> (f64, f64) {
    let r3: f64 = potentials.iter().filter(|&&v| v < 0.0).sum();
    let mut sum = 0.0;
    let mut count = 0usize;
    for &v in potentials {
        if v >= 0.0 {
            sum += v;
            count += 1;
        }
    }
    let r4 = if count == 0 {
        0.0
    } else {
        sum / count as f64 - table_max
    };
    (r3, r4)
}

/// Success component: 1 within the judgment threshold, else 0.
pub fn success_reward(dist_to_approach: f64, d_max: f64) -> f64 {
    if dist_to_approach <= d_max {
        1.0
    } else {
        0.0
    }
}

/// Weighted sum of the five components.
pub fn weighted_reward(components: &[f64; 5], weights: &[f64; 5]) -> f64 {
    components
        .iter()
        .zip(weights.iter())
        .map(|(c, w)| c * w)
        .sum()
}

/// Ten ray directions in the local annulus frame at a point: radial in/out,
/// both tangentials, both axials, and the four tangential/axial diagonals.
pub fn ray_directions(p: CartPoint) -> [CartPoint; RAY_COUNT] {
    let cyl = p.to_cyl();
    let (sin_t, cos_t) = cyl.theta.sin_cos();
    let rho_hat = CartPoint::new(cos_t, sin_t, 0.0);
    let theta_hat = CartPoint::new(-sin_t, cos_t, 0.0);
    let z_hat = CartPoint::new(0.0, 0.0, 1.0);
    let k = std::f64::consts::FRAC_1_SQRT_2;
    [
        rho_hat,
        -rho_hat,
        theta_hat,
        -theta_hat,
        z_hat,
        -z_hat,
        (theta_hat + z_hat).scale(k),
        (theta_hat - z_hat).scale(k),
        (-theta_hat + z_hat).scale(k),
        (-theta_hat - z_hat).scale(k),
    ]
}

/// The routing MDP over a shared read-only potential table.
pub struct RoutingEnv<'a> {
    task: RoutingTask,
    table: &'a PotentialTable,
    space: &'a LayoutSpace,
    pub config: EnvConfig,
}

impl<'a> RoutingEnv<'a> {
    pub fn new(
        task: RoutingTask,
        table: &'a PotentialTable,
        space: &'a LayoutSpace,
        config: EnvConfig,
    ) -> Result<Self> {
        task.validate()?;
        if config.max_steps == 0 || !(config.d_max > 0.0) || !(config.sample_interval > 0.0) {
            return Err(Error::Config("invalid environment configuration".into()));
        }
        Ok(RoutingEnv {
            task,
            table,
            space,
            config,
        })
    }

    pub fn task(&self) -> &RoutingTask {
        &self.task
    }

    pub fn table(&self) -> &PotentialTable {
        self.table
    }

    /// Fresh episode: the three forced start points with unit weights; the
    /// agent sits at the farthest forced point.
    pub fn init_episode(&self) -> Result<EpisodeState> {
        let pts = self.task.start_points();
        for p in &pts[1..] {
            if !self.space.contains(&p.to_cyl()) {
                return Err(Error::Task(format!(
                    "forced start point ({:.1}, {:.1}, {:.1}) lies outside the layout space",
                    p.x, p.y, p.z
                )));
            }
        }
        Ok(EpisodeState {
            control_points: pts.to_vec(),
            weights: vec![1.0; 3],
            agent_pos: pts[2],
            step_index: 0,
            prev_domain_end: 0.0,
            done: false,
            success: false,
        })
    }

    /// Clearance along a direction: the smallest marched distance (half a
    /// cell per step) whose table value is negative, capped at the ray
    /// cutoff.
    pub fn ray_distance(&self, origin: CartPoint, dir: CartPoint) -> f64 {
        let h = self.table.cell_size() / 2.0;
        let r_max = self.config.ray_max;
        let steps = (r_max / h).floor() as usize;
        for k in 0..=steps {
            let t = k as f64 * h;
            if self.table.query(origin + dir.scale(t)) < 0.0 {
                return t.min(r_max);
            }
        }
        r_max
    }

    /// Assemble the observation: positions scaled by the table extents to
    /// roughly [-1, 1], rays divided by the cutoff.
    pub fn observe(&self, state: &EpisodeState) -> Observation {
        let p = state.agent_pos;
        let hr = self.table.rho_max();
        let zc = 0.5 * (self.table.z_min() + self.table.z_max());
        let hz = 0.5 * (self.table.z_max() - self.table.z_min());
        let mut o = [0.0; OBS_DIM];
        o[0] = p.x / hr;
        o[1] = p.y / hr;
        o[2] = (p.z - zc) / hz;
        let d = self.task.target - p;
        o[3] = d.x / hr;
        o[4] = d.y / hr;
        o[5] = d.z / hz;
        for (i, dir) in ray_directions(p).iter().enumerate() {
            o[6 + i] = self.ray_distance(p, *dir) / self.config.ray_max;
        }
        Observation(o)
    }

    /// The currently evaluable open curve.
    fn open_path(&self, state: &EpisodeState) -> Result<NurbsPath> {
        NurbsPath::with_mode(
            PIPE_DEGREE,
            state.control_points.clone(),
            state.weights.clone(),
            EndMode::OpenEnd,
        )
    }

    fn finalize_from(&self, control_points: &[CartPoint], weights: &[f64]) -> Result<NurbsPath> {
        let mut ctrl = control_points.to_vec();
        let mut w = weights.to_vec();
        ctrl.extend_from_slice(&self.task.target_points());
        w.extend_from_slice(&[1.0; 3]);
        NurbsPath::with_mode(PIPE_DEGREE, ctrl, w, EndMode::ClampedBoth)
    }

    /// Apply one action: append the decoded control point, extend the knot
    /// vector by one span, and score the new curve segment. On success the
    /// closing segment of the finalized curve is folded into the length and
    /// rule components.
    pub fn step(&self, state: &mut EpisodeState, action: &[f64; ACT_DIM]) -> Result<StepOutcome> {
        if state.done {
            return Err(Error::State("step on a finished episode".into()));
        }
        let a: Vec<f64> = action.iter().map(|v| v.clamp(-1.0, 1.0)).collect();
        let delta = CartPoint::new(a[0], a[1], a[2]).scale(self.config.action_scale);
        let weight = a[3].exp();
        let last = *state.control_points.last().unwrap();
        state.control_points.push(last + delta);
        state.weights.push(weight);

        let path = self.open_path(state)?;
        let (_, hi) = path.domain();
        let seg_start = state.prev_domain_end;
        let dl = self.config.sample_interval;
        let (samples, seg_len) = path.sample_with_length(seg_start, hi, dl)?;
        let new_agent = path.eval(hi)?;

        let approach = self.task.approach_point();
        let r1 = progress_reward(approach, state.agent_pos, new_agent);
        let mut r2 = -seg_len;
        let pots: Vec<f64> = samples.iter().map(|p| self.table.query(*p)).collect();
        let (mut r3, mut r4) = potential_rewards(&pots, self.table.max_value());
        let dist = new_agent.dist(approach);
        let success = dist <= self.config.d_max;
        let r5 = success_reward(dist, self.config.d_max);

        if success {
            // the closing segment may still cross obstacles; score it too
            let final_path = self.finalize_from(&state.control_points, &state.weights)?;
            let (_, fhi) = final_path.domain();
            let (csamples, clen) = final_path.sample_with_length(hi, fhi, dl)?;
            let cpots: Vec<f64> = csamples.iter().map(|p| self.table.query(*p)).collect();
            let (cr3, cr4) = potential_rewards(&cpots, self.table.max_value());
            r2 -= clen;
            r3 += cr3;
            r4 += cr4;
        }

        state.agent_pos = new_agent;
        state.prev_domain_end = hi;
        state.step_index += 1;
        state.success = success;
        state.done = success || state.step_index >= self.config.max_steps;

        let components = [r1, r2, r3, r4, r5];
        Ok(StepOutcome {
            reward: weighted_reward(&components, &self.config.reward_weights),
            components,
            done: state.done,
            success,
        })
    }

    /// Close the curve through the target port. Valid only after success.
    pub fn finalize_path(&self, state: &EpisodeState) -> Result<NurbsPath> {
        if !state.success {
            return Err(Error::State(
                "finalize_path before the episode reached the target".into(),
            ));
        }
        self.finalize_from(&state.control_points, &state.weights)
    }

    /// Sample a finished path and summarize length, rule adherence, and
    /// complexity.
    pub fn evaluate_path(path: &NurbsPath, table: &PotentialTable, dl: f64) -> Result<PathMetrics> {
        let (lo, hi) = path.domain();
        let (samples, length) = path.sample_with_length(lo, hi, dl)?;
        let pots: Vec<f64> = samples.iter().map(|p| table.query(*p)).collect();
        let violation_count = pots.iter().filter(|&&v| v < 0.0).count();
        let mut sum = 0.0;
        let mut count = 0usize;
        for &v in &pots {
            if v >= 0.0 {
                sum += v;
                count += 1;
            }
        }
        let avg_potential = if count == 0 { 0.0 } else { sum / count as f64 };
        Ok(PathMetrics {
            length,
            avg_potential,
            violation_count,
            n_control_points: path.control_points.len().saturating_sub(6),
        })
    }
}

/// Adapter that runs episodes of a [`RoutingEnv`] behind the learner's
/// environment interface.
pub struct EpisodeRunner<'a> {
    pub env: RoutingEnv<'a>,
    pub state: Option<EpisodeState>,
}

impl<'a> EpisodeRunner<'a> {
    pub fn new(env: RoutingEnv<'a>) -> Self {
        EpisodeRunner { env, state: None }
    }

    /// Finalized path for the last episode, when it reached the target.
    pub fn finalize(&self) -> Result<NurbsPath> {
        let state = self
            .state
            .as_ref()
            .ok_or_else(|| Error::State("no episode has been run".into()))?;
        self.env.finalize_path(state)
    }
}

impl Environment for EpisodeRunner<'_> {
    fn obs_dim(&self) -> usize {
        OBS_DIM
    }

    fn action_dim(&self) -> usize {
        ACT_DIM
    }

    fn reset(&mut self) -> Result<Vec<f64>> {
        let state = self.env.init_episode()?;
        let obs = self.env.observe(&state);
        self.state = Some(state);
        Ok(obs.as_slice().to_vec())
    }

    fn step(&mut self, action: &[f64]) -> Result<EnvStep> {
        if action.len() != ACT_DIM {
            return Err(Error::Shape(format!(
                "action has {} channels, expected {ACT_DIM}",
                action.len()
            )));
        }
        let state = self
            .state
            .as_mut()
            .ok_or_else(|| Error::State("step before reset".into()))?;
        let mut a = [0.0; ACT_DIM];
        a.copy_from_slice(action);
        let outcome = self.env.step(state, &a)?;
        let obs = self.env.observe(state);
        Ok(EnvStep {
            obs: obs.as_slice().to_vec(),
            reward: outcome.reward,
            done: outcome.done,
            success: outcome.success,
        })
    }
}
