//! Unified layout-rule fields and the precomputed potential-energy table.
//!
//! Every object a pipe must react to (obstacle, casing, nacelle, an already
//! laid pipe) is an external component carrying an optional repulsive rule
//! (flat negative value inside a clearance band) and an optional attractive
//! rule (positive value tapering linearly to zero across a distance band).
//! The total potential at a point is the superposition over all components;
//! points outside the layout space get a negative sentinel.

mod table;

pub use table::PotentialTable;

use crate::environment::{LayoutSpace, ObstacleOctree};
use crate::error::{Error, Result};
use crate::geometry::{CartPoint, CylPoint, Sector};

/// Sentinel used when no repulsive gain is configured.
pub const DEFAULT_SENTINEL: f64 = -1.0;

/// Geometry an external component measures distances to.
#[derive(Debug, Clone)]
pub enum EcGeometry {
    /// Voxelized obstacle; distance is the minimum over occupied leaves.
    Obstacle(ObstacleOctree),
    /// Inner surface of revolution; signed distance `rho - f_c(z)`
    /// (negative below the casing).
    Casing { coeffs: Vec<f64> },
    /// Outer surface of revolution; signed distance `f_n(z) - rho`.
    Nacelle { coeffs: Vec<f64> },
    /// Existing pipe axis; distance to the closest polyline segment.
    Polyline(Vec<CartPoint>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepulsiveRule {
    /// Field value inside the clearance zone; must be <= 0.
    pub gain: f64,
    /// Clearance distance below which the field applies (mm).
    pub clearance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractiveRule {
    /// Field value at the near edge of the band; must be >= 0.
    pub gain: f64,
    /// Near edge of the attraction band (mm).
    pub d_min: f64,
    /// Far edge of the attraction band (mm); field tapers to 0 here.
    pub d_max_band: f64,
}

/// One rule-bearing object in the layout space.
#[derive(Debug, Clone)]
pub struct ExternalComponent {
    pub geometry: EcGeometry,
    pub repulsive: Option<RepulsiveRule>,
    pub attractive: Option<AttractiveRule>,
}

impl ExternalComponent {
    pub fn new(
        geometry: EcGeometry,
        repulsive: Option<RepulsiveRule>,
        attractive: Option<AttractiveRule>,
    ) -> Result<Self> {
        if let Some(r) = &repulsive {
            if r.gain > 0.0 || !r.gain.is_finite() {
                return Err(Error::Config(format!(
                    "repulsive gain {} must be <= 0",
                    r.gain
                )));
            }
            if r.clearance < 0.0 {
                return Err(Error::Config(format!(
                    "repulsive clearance {} must be >= 0",
                    r.clearance
                )));
            }
        }
        if let Some(a) = &attractive {
            if a.gain < 0.0 || !a.gain.is_finite() {
                return Err(Error::Config(format!(
                    "attractive gain {} must be >= 0",
                    a.gain
                )));
            }
            if !(0.0 <= a.d_min && a.d_min < a.d_max_band) {
                return Err(Error::Config(format!(
                    "attraction band [{}, {}] invalid",
                    a.d_min, a.d_max_band
                )));
            }
        }
        Ok(ExternalComponent {
            geometry,
            repulsive,
            attractive,
        })
    }

    /// Largest distance at which this component's field is nonzero.
    fn influence_radius(&self) -> f64 {
        let r = self.repulsive.map(|r| r.clearance).unwrap_or(0.0);
        let a = self.attractive.map(|a| a.d_max_band).unwrap_or(0.0);
        r.max(a)
    }

    /// Conservative pruning bound: when `Some((sector, radius))`, any point
    /// farther than `radius` from the sector is guaranteed a zero field.
    fn prune_bound(&self) -> Option<(Sector, f64)> {
        match &self.geometry {
            EcGeometry::Obstacle(tree) => Some((*tree.root(), self.influence_radius())),
            _ => None,
        }
    }
}

/// Distance from a point to an external component's geometry (mm).
pub fn ec_distance(p: &CylPoint, ec: &ExternalComponent) -> f64 {
    match &ec.geometry {
        EcGeometry::Obstacle(tree) => tree.distance(p),
        EcGeometry::Casing { coeffs } => {
            p.rho - coeffs.iter().rev().fold(0.0, |acc, &c| acc * p.z + c)
        }
        EcGeometry::Nacelle { coeffs } => {
            coeffs.iter().rev().fold(0.0, |acc, &c| acc * p.z + c) - p.rho
        }
        EcGeometry::Polyline(pts) => {
            let q = p.to_cart();
            if pts.len() == 1 {
                return q.dist(pts[0]);
            }
            pts.windows(2)
                .map(|seg| point_segment_distance(q, seg[0], seg[1]))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

fn point_segment_distance(p: CartPoint, a: CartPoint, b: CartPoint) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab.scale(t))
}

/// Field contribution of one component at a point.
///
/// Inside the repulsive zone (distance below the clearance, including the
/// interior where the distance is non-positive) the field is the flat
/// repulsive gain. Inside the attraction band the field tapers linearly
/// from the attractive gain at `d_min` down to 0 at `d_max_band`.
/// Everywhere else the field is zero.
pub fn field_value(ec: &ExternalComponent, p: &CylPoint) -> f64 {
    let d = ec_distance(p, ec);
    if let Some(r) = &ec.repulsive {
        if d < r.clearance || d <= 0.0 {
            return r.gain;
        }
    }
    if let Some(a) = &ec.attractive {
        if a.d_min <= d && d <= a.d_max_band {
            return a.gain * (a.d_max_band - d) / (a.d_max_band - a.d_min);
        }
    }
    0.0
}

/// Sentinel potential for points outside the layout space: the most
/// negative configured repulsive gain, or -1 when none is configured.
pub fn out_of_space_sentinel(ecs: &[ExternalComponent]) -> f64 {
    let m = ecs
        .iter()
        .filter_map(|e| e.repulsive.map(|r| r.gain))
        .fold(f64::INFINITY, f64::min);
    if m.is_finite() {
        m
    } else {
        DEFAULT_SENTINEL
    }
}

/// Superposition of all component fields, or the sentinel outside the
/// layout space.
pub fn total_potential(p: &CylPoint, ecs: &[ExternalComponent], space: &LayoutSpace) -> f64 {
    if !space.contains(p) {
        return out_of_space_sentinel(ecs);
    }
    ecs.iter().map(|ec| field_value(ec, p)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::PointCloud;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::TAU;

    fn annulus() -> LayoutSpace {
        LayoutSpace::new(vec![500.0], vec![800.0], 0.0, 1000.0).unwrap()
    }

    fn box_obstacle() -> ExternalComponent {
        let mut pts = Vec::new();
        for i in 0..=8 {
            for j in 0..=8 {
                for k in 0..=8 {
                    pts.push(CartPoint::new(
                        600.0 + 10.0 * i as f64,
                        -40.0 + 10.0 * j as f64,
                        400.0 + 10.0 * k as f64,
                    ));
                }
            }
        }
        let tree = ObstacleOctree::build(&PointCloud::new(pts), 3).unwrap();
        ExternalComponent::new(
            EcGeometry::Obstacle(tree),
            Some(RepulsiveRule {
                gain: -1.0,
                clearance: 11.5,
            }),
            None,
        )
        .unwrap()
    }

    #[test]
    fn inside_obstacle_distance_zero_field_repulsive() {
        let ec = box_obstacle();
        let p = CartPoint::new(640.0, 0.0, 440.0).to_cyl();
        assert_eq!(ec_distance(&p, &ec), 0.0);
        assert_eq!(field_value(&ec, &p), -1.0);
    }

    #[test]
    fn casing_distance_is_signed_radial_offset() {
        let ec = ExternalComponent::new(
            EcGeometry::Casing {
                coeffs: vec![500.0],
            },
            None,
            None,
        )
        .unwrap();
        assert!((ec_distance(&CylPoint::new(10.0, 510.0, 0.3), &ec) - 10.0).abs() < 1e-12);
        assert!((ec_distance(&CylPoint::new(10.0, 490.0, 0.3), &ec) + 10.0).abs() < 1e-12);
    }

    #[test]
    fn obstacle_distance_matches_leaf_scan() {
        let ec = box_obstacle();
        let tree = match &ec.geometry {
            EcGeometry::Obstacle(t) => t,
            _ => unreachable!(),
        };
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..300 {
            let p = CylPoint::new(
                rng.random_range(300.0..600.0),
                rng.random_range(500.0..800.0),
                rng.random_range(0.0..TAU),
            );
            let brute = tree
                .leaves()
                .iter()
                .map(|s| s.distance(&p))
                .fold(f64::INFINITY, f64::min);
            assert!((ec_distance(&p, &ec) - brute).abs() < 1e-9);
        }
    }

    #[test]
    fn attraction_band_endpoints_and_midpoint() {
        let ec = ExternalComponent::new(
            EcGeometry::Casing {
                coeffs: vec![500.0],
            },
            None,
            Some(AttractiveRule {
                gain: 0.2,
                d_min: 0.0,
                d_max_band: 100.0,
            }),
        )
        .unwrap();
        let at = |d: f64| field_value(&ec, &CylPoint::new(10.0, 500.0 + d, 0.0));
        assert!((at(0.0) - 0.2).abs() < 1e-12);
        assert!(at(100.0).abs() < 1e-12);
        assert!((at(50.0) - 0.1).abs() < 1e-12);
        assert_eq!(at(150.0), 0.0);
    }

    #[test]
    fn superposition_and_sentinel() {
        let space = annulus();
        let a = ExternalComponent::new(
            EcGeometry::Casing {
                coeffs: vec![500.0],
            },
            Some(RepulsiveRule {
                gain: -1.0,
                clearance: 20.0,
            }),
            None,
        )
        .unwrap();
        let b = ExternalComponent::new(
            EcGeometry::Casing {
                coeffs: vec![500.0],
            },
            Some(RepulsiveRule {
                gain: -1.0,
                clearance: 30.0,
            }),
            None,
        )
        .unwrap();
        let ecs = vec![a, b];
        // two overlapping repulsive zones
        let p = CylPoint::new(100.0, 510.0, 0.0);
        assert_eq!(total_potential(&p, &ecs, &space), -2.0);
        // no component in range
        let far = CylPoint::new(100.0, 700.0, 0.0);
        assert_eq!(total_potential(&far, &ecs, &space), 0.0);
        // outside the space
        let out = CylPoint::new(100.0, 900.0, 0.0);
        assert_eq!(total_potential(&out, &ecs, &space), -1.0);
        // empty EC list still has a sentinel
        assert_eq!(total_potential(&out, &[], &space), -1.0);
    }

    #[test]
    fn superposition_is_linear() {
        let space = annulus();
        let a = box_obstacle();
        let b = ExternalComponent::new(
            EcGeometry::Casing {
                coeffs: vec![500.0],
            },
            Some(RepulsiveRule {
                gain: -1.0,
                clearance: 11.5,
            }),
            Some(AttractiveRule {
                gain: 0.2,
                d_min: 11.5,
                d_max_band: 100.0,
            }),
        )
        .unwrap();
        let both = vec![a.clone(), b.clone()];
        let only_a = vec![a];
        let only_b = vec![b];
        let mut rng = StdRng::seed_from_u64(8);
        for _ in 0..500 {
            let p = CylPoint::new(
                rng.random_range(0.0..1000.0),
                rng.random_range(500.0..800.0),
                rng.random_range(0.0..TAU),
            );
            if !space.contains(&p) {
                continue;
            }
            let lhs = total_potential(&p, &both, &space);
            let rhs =
                total_potential(&p, &only_a, &space) + total_potential(&p, &only_b, &space);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn field_bounded_by_gains() {
        let ec = ExternalComponent::new(
            EcGeometry::Casing {
                coeffs: vec![500.0],
            },
            Some(RepulsiveRule {
                gain: -1.0,
                clearance: 10.0,
            }),
            Some(AttractiveRule {
                gain: 0.2,
                d_min: 10.0,
                d_max_band: 60.0,
            }),
        )
        .unwrap();
        let mut prev_in_band: Option<(f64, f64)> = None;
        for i in 0..200 {
            let d = -20.0 + i as f64;
            let v = field_value(&ec, &CylPoint::new(0.0, 500.0 + d, 0.0));
            assert!((-1.0..=0.2).contains(&v));
            if (10.0..=60.0).contains(&d) {
                if let Some((pd, pv)) = prev_in_band {
                    assert!(d > pd && v <= pv + 1e-12, "attraction not non-increasing");
                }
                prev_in_band = Some((d, v));
            }
        }
    }

    #[test]
    fn polyline_distance() {
        let ec = ExternalComponent::new(
            EcGeometry::Polyline(vec![
                CartPoint::new(0.0, 0.0, 0.0),
                CartPoint::new(100.0, 0.0, 0.0),
            ]),
            None,
            None,
        )
        .unwrap();
        let p = CartPoint::new(50.0, 30.0, 0.0).to_cyl();
        assert!((ec_distance(&p, &ec) - 30.0).abs() < 1e-9);
        let beyond = CartPoint::new(130.0, 40.0, 0.0).to_cyl();
        assert!((ec_distance(&beyond, &ec) - 50.0).abs() < 1e-9);
    }

    #[test]
    fn sentinel_is_most_negative_gain() {
        let mk = |gain: f64| {
            ExternalComponent::new(
                EcGeometry::Casing {
                    coeffs: vec![500.0],
                },
                Some(RepulsiveRule {
                    gain,
                    clearance: 5.0,
                }),
                None,
            )
            .unwrap()
        };
        assert_eq!(out_of_space_sentinel(&[]), -1.0);
        assert_eq!(out_of_space_sentinel(&[mk(-1.0), mk(-5.0)]), -5.0);
        assert_eq!(out_of_space_sentinel(&[mk(-0.5)]), -0.5);
    }
}
