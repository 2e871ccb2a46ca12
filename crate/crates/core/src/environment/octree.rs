use super::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, CylPoint, Sector};
use std::collections::HashSet;
use std::f64::consts::TAU;

const MAX_SUPPORTED_DEPTH: u32 = 16;

/// Tightest cylindrical sector containing every point of the cloud.
///
/// The angular bounds are the minimal covering arc: angles are sorted and
/// the largest gap is cut, so a cloud straddling theta = 0 gets a narrow
/// wrapped wedge instead of a nearly full circle.
pub fn cylindrical_bounds(cloud: &PointCloud) -> Result<Sector> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let cyl: Vec<CylPoint> = cloud.points.iter().map(|p| p.to_cyl()).collect();
    let mut z_lo = f64::INFINITY;
    let mut z_hi = f64::NEG_INFINITY;
    let mut rho_lo = f64::INFINITY;
    let mut rho_hi = f64::NEG_INFINITY;
    let mut angles: Vec<f64> = Vec::with_capacity(cyl.len());
    for p in &cyl {
        z_lo = z_lo.min(p.z);
        z_hi = z_hi.max(p.z);
        rho_lo = rho_lo.min(p.rho);
        rho_hi = rho_hi.max(p.rho);
        angles.push(p.theta);
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = angles.len();
    // largest gap between consecutive angles (wrapping across 2pi)
    let mut best_gap = TAU - (angles[n - 1] - angles[0]);
    let mut start = 0usize;
    for i in 1..n {
        let gap = angles[i] - angles[i - 1];
        if gap > best_gap {
            best_gap = gap;
            start = i;
        }
    }
    let theta_lo = angles[start];
    // evaluate the width with the same expression used for containment, and
    // pad it by an ulp-scale slack: the sector stores theta_hi = lo + width,
    // and (lo + width) - lo can round below width, dropping the edge point
    let width = angles
        .iter()
        .map(|&a| normalize_angle(a - theta_lo))
        .fold(0.0f64, f64::max);
    let width = if width > 0.0 { width + 1e-12 } else { 0.0 };
    Sector::new(z_lo, z_hi, rho_lo, rho_hi, theta_lo, theta_lo + width)
}

/// Occupancy octree over a cylindrical bounding sector.
///
/// The root sector is split 2x2x2 per level along (z, rho, theta); a node
/// is occupied iff it contains at least one cloud point, and only occupied
/// nodes are subdivided. Leaf cells are half-open on every axis so they
/// tile the root without overlap; the top edge of the root maps into the
/// last cell so boundary cloud points stay covered.
#[derive(Debug, Clone)]
pub struct ObstacleOctree {
    root: Sector,
    max_depth: u32,
    occupied: HashSet<(u32, u32, u32)>,
    leaves: Vec<Sector>,
}

impl ObstacleOctree {
    pub fn build(cloud: &PointCloud, max_depth: u32) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if max_depth > MAX_SUPPORTED_DEPTH {
            return Err(Error::Config(format!(
                "octree depth {max_depth} exceeds supported maximum {MAX_SUPPORTED_DEPTH}"
            )));
        }
        let mut root = cylindrical_bounds(cloud)?;
        inflate_degenerate_axes(&mut root);

        let side = 1u32 << max_depth;
        let coords: Vec<(u32, u32, u32)> = cloud
            .points
            .iter()
            .map(|p| {
                leaf_coords(&root, &p.to_cyl(), side)
                    .expect("bounding sector must contain its own cloud")
            })
            .collect();

        let mut occupied = HashSet::new();
        let all: Vec<usize> = (0..coords.len()).collect();
        subdivide(&coords, &all, 0, max_depth, (0, 0, 0), &mut occupied);

        let mut cells: Vec<(u32, u32, u32)> = occupied.iter().copied().collect();
        cells.sort_unstable();
        let leaves = cells.iter().map(|&c| cell_sector(&root, c, side)).collect();

        Ok(ObstacleOctree {
            root,
            max_depth,
            occupied,
            leaves,
        })
    }

    pub fn root(&self) -> &Sector {
        &self.root
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    /// Occupied leaf cells at the maximum depth, in deterministic order.
    pub fn leaves(&self) -> &[Sector] {
        &self.leaves
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// True iff the point lies in an occupied leaf.
    pub fn contains(&self, p: &CylPoint) -> bool {
        let side = 1u32 << self.max_depth;
        match leaf_coords(&self.root, p, side) {
            Some(c) => self.occupied.contains(&c),
            None => false,
        }
    }

    /// Shortest distance from a point to any occupied leaf (0 inside).
    pub fn distance(&self, p: &CylPoint) -> f64 {
        // cheap lower bound first
        if self.contains(p) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for leaf in &self.leaves {
            let d = leaf.distance(p);
            if d < best {
                best = d;
                if best == 0.0 {
                    break;
                }
            }
        }
        best
    }
}

/// Cell index of a point at the given grid resolution, or None outside the
/// root sector. The top edge of each axis maps into the last cell.
fn leaf_coords(root: &Sector, p: &CylPoint, side: u32) -> Option<(u32, u32, u32)> {
    let axis = |v: f64, lo: f64, hi: f64| -> Option<u32> {
        if v < lo || v > hi {
            return None;
        }
        let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
        Some(((t * side as f64).floor() as u32).min(side - 1))
    };
    let iz = axis(p.z, root.z_lo, root.z_hi)?;
    let ir = axis(p.rho, root.rho_lo, root.rho_hi)?;
    let width = root.theta_width();
    let rel = normalize_angle(p.theta - root.theta_lo);
    if rel > width {
        return None;
    }
    let t = if width > 0.0 { rel / width } else { 0.0 };
    let it = ((t * side as f64).floor() as u32).min(side - 1);
    Some((iz, ir, it))
}

/// Geometric bounds of a leaf cell.
fn cell_sector(root: &Sector, c: (u32, u32, u32), side: u32) -> Sector {
    let lerp = |lo: f64, hi: f64, i: u32| lo + (hi - lo) * i as f64 / side as f64;
    Sector {
        z_lo: lerp(root.z_lo, root.z_hi, c.0),
        z_hi: lerp(root.z_lo, root.z_hi, c.0 + 1),
        rho_lo: lerp(root.rho_lo, root.rho_hi, c.1),
        rho_hi: lerp(root.rho_lo, root.rho_hi, c.1 + 1),
        theta_lo: lerp(root.theta_lo, root.theta_hi, c.2),
        theta_hi: lerp(root.theta_lo, root.theta_hi, c.2 + 1),
    }
}

/// Recursive 8-way split: occupied nodes subdivide until max depth, free
/// nodes are dropped.
fn subdivide(
    coords: &[(u32, u32, u32)],
    indices: &[usize],
    depth: u32,
    max_depth: u32,
    node: (u32, u32, u32),
    occupied: &mut HashSet<(u32, u32, u32)>,
) {
    if indices.is_empty() {
        return;
    }
    if depth == max_depth {
        occupied.insert(node);
        return;
    }
    let shift = max_depth - depth - 1;
    let mut children: [Vec<usize>; 8] = Default::default();
    for &i in indices {
        let (cz, cr, ct) = coords[i];
        let oct =
            (((cz >> shift) & 1) << 2 | ((cr >> shift) & 1) << 1 | ((ct >> shift) & 1)) as usize;
        children[oct].push(i);
    }
    for (oct, child_idx) in children.iter().enumerate() {
        let child = (
            (node.0 << 1) | ((oct >> 2) & 1) as u32,
            (node.1 << 1) | ((oct >> 1) & 1) as u32,
            (node.2 << 1) | (oct & 1) as u32,
        );
        subdivide(coords, child_idx, depth + 1, max_depth, child, occupied);
    }
}

/// Zero-extent bounding axes are widened (by 1 mm, or an equivalent arc)
/// so subdivision never produces zero-volume cells.
fn inflate_degenerate_axes(s: &mut Sector) {
    if s.z_hi - s.z_lo < 1e-9 {
        s.z_lo -= 0.5;
        s.z_hi += 0.5;
    }
    if s.rho_hi - s.rho_lo < 1e-9 {
        s.rho_hi += 0.5;
        s.rho_lo = (s.rho_lo - 0.5).max(0.0);
        if s.rho_hi - s.rho_lo < 1.0 {
            s.rho_hi = s.rho_lo + 1.0;
        }
    }
    if s.theta_width() < 1e-9 {
        let half = 0.5 / s.rho_hi.max(1.0);
        s.theta_lo -= half;
        s.theta_hi += half;
        if s.theta_width() > TAU {
            s.theta_hi = s.theta_lo + TAU;
        }
    }
}
