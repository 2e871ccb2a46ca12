use crate::error::{Error, Result};
use crate::geometry::CartPoint;
use std::path::Path;

/// Obstacle sample points in Cartesian coordinates (mm).
#[derive(Debug, Clone)]
pub struct PointCloud {
    pub points: Vec<CartPoint>,
}

impl PointCloud {
    pub fn new(points: Vec<CartPoint>) -> Self {
        PointCloud { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Load a cloud from disk. ASCII PLY files (detected by header) expose
    /// their x/y/z vertex properties; anything else is read as plain text
    /// with one "x y z" triple per line and '#' comment lines ignored.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::data(path.display().to_string(), format!("cannot read: {e}"))
        })?;
        let name = path.display().to_string();
        if text.trim_start().starts_with("ply") {
            Self::parse_ply(&text, &name)
        } else {
            Self::parse_xyz(&text, &name)
        }
    }

    pub fn parse_xyz(text: &str, name: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let mut next = || -> Result<f64> {
                it.next()
                    .ok_or_else(|| {
                        Error::data(name, format!("line {}: expected 3 values", lineno + 1))
                    })?
                    .parse::<f64>()
                    .map_err(|e| Error::data(name, format!("line {}: {e}", lineno + 1)))
            };
            let (x, y, z) = (next()?, next()?, next()?);
            points.push(CartPoint::new(x, y, z));
        }
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        Ok(PointCloud::new(points))
    }

    pub fn parse_ply(text: &str, name: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut vertex_count: Option<usize> = None;
        let mut props: Vec<String> = Vec::new();
        let mut in_vertex_element = false;
        let mut ascii = false;

        for line in lines.by_ref() {
            let line = line.trim();
            if line.starts_with("format") {
                ascii = line.contains("ascii");
            } else if let Some(rest) = line.strip_prefix("element ") {
                let mut it = rest.split_whitespace();
                let kind = it.next().unwrap_or("");
                in_vertex_element = kind == "vertex";
                if in_vertex_element {
                    vertex_count = it
                        .next()
                        .and_then(|s| s.parse().ok())
                        .or(Some(0));
                }
            } else if line.starts_with("property") && in_vertex_element {
                if let Some(pname) = line.split_whitespace().last() {
                    props.push(pname.to_string());
                }
            } else if line == "end_header" {
                break;
            }
        }
        if !ascii {
            return Err(Error::data(name, "only ASCII PLY is supported"));
        }
        let count =
            vertex_count.ok_or_else(|| Error::data(name, "PLY header has no vertex element"))?;
        let idx = |want: &str| -> Result<usize> {
            props
                .iter()
                .position(|p| p == want)
                .ok_or_else(|| Error::data(name, format!("PLY vertex has no '{want}' property")))
        };
        let (ix, iy, iz) = (idx("x")?, idx("y")?, idx("z")?);

        let mut points = Vec::with_capacity(count);
        for line in lines.take(count) {
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() < props.len() {
                return Err(Error::data(name, "PLY vertex row too short"));
            }
            let get = |i: usize| -> Result<f64> {
                cols[i]
                    .parse::<f64>()
                    .map_err(|e| Error::data(name, format!("bad PLY value: {e}")))
            };
            points.push(CartPoint::new(get(ix)?, get(iy)?, get(iz)?));
        }
        if points.len() != count {
            return Err(Error::data(
                name,
                format!("PLY declared {count} vertices, found {}", points.len()),
            ));
        }
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        Ok(PointCloud::new(points))
    }
}
