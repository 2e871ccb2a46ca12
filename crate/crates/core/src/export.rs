//! Path export formats: full curve data as JSON, and the sampled polyline
//! as CSV or a wavefront-style line object for CAD viewers.
//!
//! Exports are byte-stable for fixed inputs: floats print in shortest
//! round-trip form and every format carries the generating seed in its
//! header.

use crate::error::{Error, Result};
use crate::geometry::{CartPoint, EndMode, NurbsPath};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const PATH_SCHEMA: u32 = 1;

/// Serializable snapshot of a routed path plus its sampled polyline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathExport {
    pub schema: u32,
    /// Seed of the run that produced the path.
    pub seed: u64,
    pub degree: usize,
    pub control_points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub knots: Vec<f64>,
    pub end_mode: EndMode,
    /// Arc-length sampling interval of the polyline (mm).
    pub sample_interval: f64,
    pub polyline: Vec<[f64; 3]>,
}

impl PathExport {
    pub fn from_path(path: &NurbsPath, dl: f64, seed: u64) -> Result<Self> {
        let (lo, hi) = path.domain();
        let polyline = path
            .sample_by_arclength(lo, hi, dl)?
            .into_iter()
            .map(CartPoint::to_array)
            .collect();
        Ok(PathExport {
            schema: PATH_SCHEMA,
            seed,
            degree: path.degree,
            control_points: path.control_points.iter().map(|p| p.to_array()).collect(),
            weights: path.weights.clone(),
            knots: path.knots.clone(),
            end_mode: path.end_mode,
            sample_interval: dl,
            polyline,
        })
    }

    pub fn to_nurbs(&self) -> Result<NurbsPath> {
        NurbsPath::new(
            self.degree,
            self.control_points
                .iter()
                .copied()
                .map(CartPoint::from_array)
                .collect(),
            self.weights.clone(),
            self.knots.clone(),
            self.end_mode,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("path export serialization cannot fail")
    }

    pub fn from_json(text: &str, name: &str) -> Result<Self> {
        let export: PathExport = serde_json::from_str(text)
            .map_err(|e| Error::data(name, format!("bad path file: {e}")))?;
        if export.schema != PATH_SCHEMA {
            return Err(Error::data(
                name,
                format!("unsupported path schema {}", export.schema),
            ));
        }
        Ok(export)
    }

    /// Polyline as CSV, one x,y,z row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# seed={}\nx,y,z\n", self.seed);
        for p in &self.polyline {
            out.push_str(&format!("{},{},{}\n", p[0], p[1], p[2]));
        }
        out
    }

    /// Polyline as a wavefront-style line object ("v" vertex records plus
    /// one "l" record chaining them).
    pub fn to_line_object(&self) -> String {
        let mut out = format!("# seed={}\n", self.seed);
        for p in &self.polyline {
            out.push_str(&format!("v {} {} {}\n", p[0], p[1], p[2]));
        }
        out.push('l');
        for i in 1..=self.polyline.len() {
            out.push_str(&format!(" {i}"));
        }
        out.push('\n');
        out
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json())
            .map_err(|e| Error::data(path.display().to_string(), format!("cannot write: {e}")))
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::data(path.display().to_string(), format!("cannot read: {e}")))?;
        Self::from_json(&text, &path.display().to_string())
    }
}
