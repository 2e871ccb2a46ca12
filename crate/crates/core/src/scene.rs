//! Scene description file: layout space, rules, obstacles, and tasks.
//!
//! Scenes are versioned JSON. Obstacle point clouds are referenced by path
//! relative to the scene file location.

use crate::environment::{LayoutSpace, ObstacleOctree, PointCloud};
use crate::error::{Error, Result};
use crate::geometry::CartPoint;
use crate::potential::{
    AttractiveRule, EcGeometry, ExternalComponent, PotentialTable, RepulsiveRule,
};
use crate::routing::RoutingTask;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const SCENE_SCHEMA: u32 = 1;

/// Default octree depth when an obstacle does not specify one.
pub const DEFAULT_OCTREE_DEPTH: u32 = 5;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneFile {
    pub schema: u32,
    pub layout: LayoutSpec,
    /// Potential-table cell size (mm); conventionally the pipe diameter.
    pub cell_size: f64,
    #[serde(default)]
    pub casing_rule: Option<RuleSpec>,
    #[serde(default)]
    pub nacelle_rule: Option<RuleSpec>,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
    #[serde(default)]
    pub tasks: Vec<TaskSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayoutSpec {
    /// Casing generatrix polynomial coefficients, ascending powers of z.
    pub casing_coeffs: Vec<f64>,
    /// Nacelle generatrix polynomial coefficients.
    pub nacelle_coeffs: Vec<f64>,
    pub z_min: f64,
    pub z_max: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RuleSpec {
    #[serde(default)]
    pub repulsive: Option<RepulsiveSpec>,
    #[serde(default)]
    pub attractive: Option<AttractiveSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepulsiveSpec {
    pub k_r: f64,
    /// Clearance distance (mm); when omitted it defaults to half the
    /// largest task diameter plus 2 mm.
    #[serde(default)]
    pub clearance: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttractiveSpec {
    pub k_a: f64,
    pub d_min: f64,
    pub d_max_band: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObstacleSpec {
    /// Point-cloud file, relative to the scene file.
    pub cloud: String,
    #[serde(default)]
    pub depth: Option<u32>,
    #[serde(default)]
    pub repulsive: Option<RepulsiveSpec>,
    #[serde(default)]
    pub attractive: Option<AttractiveSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskSpec {
    pub start: [f64; 3],
    pub start_normal: [f64; 3],
    pub target: [f64; 3],
    pub target_normal: [f64; 3],
    pub diameter: f64,
}

impl TaskSpec {
    pub fn to_task(&self) -> RoutingTask {
        RoutingTask {
            start: CartPoint::from_array(self.start),
            start_normal: CartPoint::from_array(self.start_normal),
            target: CartPoint::from_array(self.target),
            target_normal: CartPoint::from_array(self.target_normal),
            diameter: self.diameter,
        }
    }
}

/// Everything needed to route within a scene, built once and shared.
#[derive(Debug)]
pub struct SceneContext {
    pub space: LayoutSpace,
    pub ecs: Vec<ExternalComponent>,
    pub table: PotentialTable,
    pub tasks: Vec<RoutingTask>,
    pub cell_size: f64,
}

impl SceneFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::data(path.display().to_string(), format!("cannot read: {e}")))?;
        let scene: SceneFile = serde_json::from_str(&text)
            .map_err(|e| Error::data(path.display().to_string(), format!("bad scene: {e}")))?;
        if scene.schema != SCENE_SCHEMA {
            return Err(Error::data(
                path.display().to_string(),
                format!("unsupported scene schema {}", scene.schema),
            ));
        }
        Ok(scene)
    }

    /// Fallback clearance: half the widest pipe plus 2 mm of margin.
    fn default_clearance(&self) -> f64 {
        let d = self
            .tasks
            .iter()
            .map(|t| t.diameter)
            .fold(0.0f64, f64::max);
        d / 2.0 + 2.0
    }

    fn build_rules(
        &self,
        rep: &Option<RepulsiveSpec>,
        att: &Option<AttractiveSpec>,
    ) -> (Option<RepulsiveRule>, Option<AttractiveRule>) {
        let repulsive = rep.as_ref().map(|r| RepulsiveRule {
            gain: r.k_r,
            clearance: r.clearance.unwrap_or_else(|| self.default_clearance()),
        });
        let attractive = att.as_ref().map(|a| AttractiveRule {
            gain: a.k_a,
            d_min: a.d_min,
            d_max_band: a.d_max_band,
        });
        (repulsive, attractive)
    }

    /// Validate the scene, load all obstacle clouds, voxelize them, and
    /// compute the potential table.
    pub fn build(&self, base_dir: &Path) -> Result<SceneContext> {
        if !(self.cell_size > 0.0) {
            return Err(Error::Config(format!(
                "cell size {} must be > 0",
                self.cell_size
            )));
        }
        let space = LayoutSpace::new(
            self.layout.casing_coeffs.clone(),
            self.layout.nacelle_coeffs.clone(),
            self.layout.z_min,
            self.layout.z_max,
        )?;

        let mut ecs = Vec::new();
        if let Some(rule) = &self.casing_rule {
            let (rep, att) = self.build_rules(&rule.repulsive, &rule.attractive);
            ecs.push(ExternalComponent::new(
                EcGeometry::Casing {
                    coeffs: self.layout.casing_coeffs.clone(),
                },
                rep,
                att,
            )?);
        }
        if let Some(rule) = &self.nacelle_rule {
            let (rep, att) = self.build_rules(&rule.repulsive, &rule.attractive);
            ecs.push(ExternalComponent::new(
                EcGeometry::Nacelle {
                    coeffs: self.layout.nacelle_coeffs.clone(),
                },
                rep,
                att,
            )?);
        }
        for spec in &self.obstacles {
            let cloud_path = resolve(base_dir, &spec.cloud);
            if !cloud_path.exists() {
                return Err(Error::data(
                    cloud_path.display().to_string(),
                    "obstacle cloud file does not exist",
                ));
            }
            let cloud = PointCloud::load(&cloud_path)?;
            let tree = ObstacleOctree::build(&cloud, spec.depth.unwrap_or(DEFAULT_OCTREE_DEPTH))?;
            let (rep, att) = self.build_rules(&spec.repulsive, &spec.attractive);
            ecs.push(ExternalComponent::new(
                EcGeometry::Obstacle(tree),
                rep,
                att,
            )?);
        }

        let tasks: Vec<RoutingTask> = self.tasks.iter().map(|t| t.to_task()).collect();
        for (i, t) in tasks.iter().enumerate() {
            t.validate()
                .map_err(|e| Error::Task(format!("task {i}: {e}")))?;
        }

        let table = PotentialTable::build(&space, &ecs, self.cell_size)?;
        Ok(SceneContext {
            space,
            ecs,
            table,
            tasks,
            cell_size: self.cell_size,
        })
    }
}

impl SceneContext {
    /// Load a scene file and build the full context (cloud paths resolve
    /// relative to the scene file's directory).
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let scene = SceneFile::load(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        scene.build(base)
    }
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}
