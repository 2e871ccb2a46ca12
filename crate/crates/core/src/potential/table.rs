use super::{field_value, out_of_space_sentinel, ExternalComponent};
use crate::environment::LayoutSpace;
use crate::error::{Error, Result};
use crate::geometry::{CartPoint, CylPoint};
use rayon::prelude::*;
use std::f64::consts::TAU;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"PETB";
const FORMAT_VERSION: u8 = 1;

/// Precomputed fan-grid of total potential values over the layout space.
///
/// The grid is uniform in z and rho with cell size `s`; the angular cell
/// width is `s / rho_min` radians so cells are roughly `s` wide at the
/// casing. Values are stored as f32 in z-major, then rho, then theta order,
/// which is also the on-disk layout.
#[derive(Debug, Clone)]
pub struct PotentialTable {
    cell_size: f64,
    z_min: f64,
    rho_min: f64,
    n_z: usize,
    n_rho: usize,
    n_theta: usize,
    values: Vec<f32>,
    max_value: f64,
    sentinel: f64,
}

impl PotentialTable {
    /// Evaluate the total potential at every cell center.
    ///
    /// Components whose bounding region is farther from a cell center than
    /// their influence radius are skipped, so large scenes stay cheap.
    pub fn build(space: &LayoutSpace, ecs: &[ExternalComponent], s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Config(format!("cell size {s} must be > 0")));
        }
        let z_min = space.z_min();
        let rho_min = space.rho_min();
        let n_z = (((space.z_max() - z_min) / s).ceil() as usize).max(1);
        let n_rho = (((space.rho_max() - rho_min) / s).ceil() as usize).max(1);
        let n_theta = ((TAU * rho_min / s).floor() as usize).max(1);
        let total = n_z
            .checked_mul(n_rho)
            .and_then(|v| v.checked_mul(n_theta))
            .ok_or_else(|| Error::Config("potential table too large".into()))?;
        if total > 500_000_000 {
            return Err(Error::Config(format!(
                "potential table of {total} cells is unreasonably large"
            )));
        }

        let sentinel = out_of_space_sentinel(ecs);
        let bounds: Vec<_> = ecs.iter().map(|ec| ec.prune_bound()).collect();
        let theta_step = s / rho_min;

        let mut values = vec![0f32; total];
        let slice = n_rho * n_theta;
        values
            .par_chunks_mut(slice)
            .enumerate()
            .for_each(|(iz, chunk)| {
                let z = z_min + (iz as f64 + 0.5) * s;
                for ir in 0..n_rho {
                    let rho = rho_min + (ir as f64 + 0.5) * s;
                    for it in 0..n_theta {
                        let theta = (it as f64 + 0.5) * theta_step;
                        let p = CylPoint::new(z, rho, theta);
                        let v = if !space.contains(&p) {
                            sentinel
                        } else {
                            let mut sum = 0.0;
                            for (ec, bound) in ecs.iter().zip(bounds.iter()) {
                                if let Some((sector, radius)) = bound {
                                    if sector.distance(&p) > *radius {
                                        continue;
                                    }
                                }
                                sum += field_value(ec, &p);
                            }
                            sum
                        };
                        chunk[ir * n_theta + it] = v as f32;
                    }
                }
            });

        let max_value = values.iter().copied().fold(f32::NEG_INFINITY, f32::max) as f64;
        Ok(PotentialTable {
            cell_size: s,
            z_min,
            rho_min,
            n_z,
            n_rho,
            n_theta,
            values,
            max_value,
            sentinel,
        })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n_z, self.n_rho, self.n_theta)
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_min + self.n_z as f64 * self.cell_size
    }

    pub fn rho_min(&self) -> f64 {
        self.rho_min
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_min + self.n_rho as f64 * self.cell_size
    }

    /// Largest stored value (the reference level for layout-tendency
    /// rewards), computed once at build or load.
    pub fn max_value(&self) -> f64 {
        self.max_value
    }

    pub fn sentinel(&self) -> f64 {
        self.sentinel
    }

    /// Grid indices of a cylindrical point, or None when z or rho falls
    /// outside the grid. The angular index wraps.
    pub fn indices(&self, p: &CylPoint) -> Option<(usize, usize, usize)> {
        let iz = ((p.z - self.z_min) / self.cell_size).floor();
        let ir = ((p.rho - self.rho_min) / self.cell_size).floor();
        if iz < 0.0 || ir < 0.0 || iz >= self.n_z as f64 || ir >= self.n_rho as f64 {
            return None;
        }
        let it = (p.theta * self.rho_min / self.cell_size).floor() as i64;
        let it = it.rem_euclid(self.n_theta as i64) as usize;
        Some((iz as usize, ir as usize, it))
    }

    /// Center of a grid cell.
    pub fn cell_center(&self, iz: usize, ir: usize, it: usize) -> CylPoint {
        CylPoint::new(
            self.z_min + (iz as f64 + 0.5) * self.cell_size,
            self.rho_min + (ir as f64 + 0.5) * self.cell_size,
            (it as f64 + 0.5) * self.cell_size / self.rho_min,
        )
    }

    pub fn value_at(&self, iz: usize, ir: usize, it: usize) -> f64 {
        self.values[(iz * self.n_rho + ir) * self.n_theta + it] as f64
    }

    /// Stored potential for the cell containing the point; the sentinel for
    /// out-of-range z or rho.
    pub fn query_cyl(&self, p: &CylPoint) -> f64 {
        match self.indices(p) {
            Some((iz, ir, it)) => self.value_at(iz, ir, it),
            None => self.sentinel,
        }
    }

    pub fn query(&self, p: CartPoint) -> f64 {
        self.query_cyl(&p.to_cyl())
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&[FORMAT_VERSION])?;
        for dim in [self.n_z, self.n_rho, self.n_theta] {
            w.write_all(&(dim as u64).to_le_bytes())?;
        }
        for v in [self.cell_size, self.z_min, self.rho_min] {
            w.write_all(&v.to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(self.values.len() * 4);
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)
    }

    pub fn read_from(mut r: impl Read, name: &str) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)
            .map_err(|e| Error::data(name, format!("truncated header: {e}")))?;
        if &magic != MAGIC {
            return Err(Error::data(name, "not a potential table (bad magic)"));
        }
        let mut version = [0u8; 1];
        r.read_exact(&mut version)
            .map_err(|e| Error::data(name, format!("truncated header: {e}")))?;
        if version[0] != FORMAT_VERSION {
            return Err(Error::data(
                name,
                format!("unsupported format version {}", version[0]),
            ));
        }
        let mut u64buf = [0u8; 8];
        let mut read_u64 = |r: &mut dyn Read| -> Result<u64> {
            r.read_exact(&mut u64buf)
                .map_err(|e| Error::data(name, format!("truncated header: {e}")))?;
            Ok(u64::from_le_bytes(u64buf))
        };
        let n_z = read_u64(&mut r)? as usize;
        let n_rho = read_u64(&mut r)? as usize;
        let n_theta = read_u64(&mut r)? as usize;
        let mut f64buf = [0u8; 8];
        let mut read_f64 = |r: &mut dyn Read| -> Result<f64> {
            r.read_exact(&mut f64buf)
                .map_err(|e| Error::data(name, format!("truncated header: {e}")))?;
            Ok(f64::from_le_bytes(f64buf))
        };
        let cell_size = read_f64(&mut r)?;
        let z_min = read_f64(&mut r)?;
        let rho_min = read_f64(&mut r)?;
        if !(cell_size > 0.0) || !rho_min.is_finite() || rho_min <= 0.0 {
            return Err(Error::data(name, "invalid table header values"));
        }
        let total = n_z
            .checked_mul(n_rho)
            .and_then(|v| v.checked_mul(n_theta))
            .filter(|&t| t > 0 && t <= 500_000_000)
            .ok_or_else(|| Error::data(name, "invalid table dimensions"))?;
        let mut raw = vec![0u8; total * 4];
        r.read_exact(&mut raw)
            .map_err(|e| Error::data(name, format!("truncated values: {e}")))?;
        let values: Vec<f32> = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::data(name, "non-finite table values"));
        }
        let max_value = values.iter().copied().fold(f32::NEG_INFINITY, f32::max) as f64;
        // the sentinel is not part of the on-disk format; recover it as the
        // most negative stored value, capped at the default
        let min_value = values.iter().copied().fold(f32::INFINITY, f32::min) as f64;
        let sentinel = min_value.min(super::DEFAULT_SENTINEL);
        Ok(PotentialTable {
            cell_size,
            z_min,
            rho_min,
            n_z,
            n_rho,
            n_theta,
            values,
            max_value,
            sentinel,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut f = std::fs::File::create(path)
            .map_err(|e| Error::data(path.display().to_string(), format!("cannot create: {e}")))?;
        self.write_to(&mut f)
            .map_err(|e| Error::data(path.display().to_string(), format!("write failed: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path)
            .map_err(|e| Error::data(path.display().to_string(), format!("cannot open: {e}")))?;
        Self::read_from(std::io::BufReader::new(f), &path.display().to_string())
    }
}
