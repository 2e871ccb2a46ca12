use super::point::{normalize_angle, CylPoint};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Solid cylindrical sector: an axial slab crossed with an annular wedge.
///
/// `theta_lo` is a reference angle; `theta_hi` may exceed 2pi so that a
/// wedge crossing theta = 0 stays contiguous (`theta_hi - theta_lo` is the
/// arc width and never exceeds 2pi).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub z_lo: f64,
    pub z_hi: f64,
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
}

impl Sector {
    pub fn new(
        z_lo: f64,
        z_hi: f64,
        rho_lo: f64,
        rho_hi: f64,
        theta_lo: f64,
        theta_hi: f64,
    ) -> Result<Self> {
        let s = Sector {
            z_lo,
            z_hi,
            rho_lo,
            rho_hi,
            theta_lo,
            theta_hi,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z_lo <= self.z_hi) {
            return Err(Error::Config(format!(
                "sector z bounds inverted: [{}, {}]",
                self.z_lo, self.z_hi
            )));
        }
        if !(0.0 <= self.rho_lo && self.rho_lo <= self.rho_hi) {
            return Err(Error::Config(format!(
                "sector rho bounds invalid: [{}, {}]",
                self.rho_lo, self.rho_hi
            )));
        }
        let w = self.theta_hi - self.theta_lo;
        if !(0.0 <= w && w <= TAU + 1e-12) {
            return Err(Error::Config(format!(
                "sector arc width invalid: {} rad",
                w
            )));
        }
        Ok(())
    }

    pub fn theta_width(&self) -> f64 {
        self.theta_hi - self.theta_lo
    }

    /// Angular offset of `theta` from the wedge: 0 when inside the arc,
    /// otherwise the smaller rotation needed to reach either edge.
    pub fn angular_offset(&self, theta: f64) -> f64 {
        let width = self.theta_width();
        let rel = normalize_angle(theta - self.theta_lo);
        if rel <= width {
            0.0
        } else {
            (rel - width).min(TAU - rel)
        }
    }

    /// Closed containment test.
    pub fn contains(&self, p: &CylPoint) -> bool {
        self.z_lo <= p.z
            && p.z <= self.z_hi
            && self.rho_lo <= p.rho
            && p.rho <= self.rho_hi
            && self.angular_offset(p.theta) == 0.0
    }

    /// Euclidean (Cartesian) distance from `p` to the closest point of the
    /// solid sector; 0 when `p` is inside.
    ///
    /// The sector is a product set of a z interval and a planar annular
    /// wedge, so the axial and in-plane distances decouple. In-plane, the
    /// closest point is found by clamping the angle to the wedge and then
    /// clamping the radius along the nearest radial edge.
    pub fn distance(&self, p: &CylPoint) -> f64 {
        let dz = if p.z < self.z_lo {
            self.z_lo - p.z
        } else if p.z > self.z_hi {
            p.z - self.z_hi
        } else {
            0.0
        };

        let delta = self.angular_offset(p.theta);
        let d_plane = if delta == 0.0 {
            if p.rho < self.rho_lo {
                self.rho_lo - p.rho
            } else if p.rho > self.rho_hi {
                p.rho - self.rho_hi
            } else {
                0.0
            }
        } else {
            // Nearest point lies on the radial edge segment at angular
            // distance `delta`; the unconstrained minimiser along that edge
            // is rho = r cos(delta), clamped into [rho_lo, rho_hi]. For
            // delta >= pi/2 the clamp lands on rho_lo.
            let r = p.rho;
            let cosd = delta.cos();
            let rho_c = (r * cosd).clamp(self.rho_lo, self.rho_hi);
            (r * r + rho_c * rho_c - 2.0 * r * rho_c * cosd)
                .max(0.0)
                .sqrt()
        };

        (d_plane * d_plane + dz * dz).sqrt()
    }
}

/// Exact Euclidean distance from a point to a solid cylindrical sector.
pub fn distance_point_to_sector(p: &CylPoint, s: &Sector) -> f64 {
    s.distance(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point::CartPoint;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn sample_sector(rng: &mut StdRng) -> Sector {
        let z_lo = rng.random_range(-200.0..200.0);
        let z_hi = z_lo + rng.random_range(0.0..300.0);
        let rho_lo = rng.random_range(0.0..500.0);
        let rho_hi = rho_lo + rng.random_range(0.0..300.0);
        let theta_lo = rng.random_range(0.0..TAU);
        let theta_hi = theta_lo + rng.random_range(0.0..TAU);
        Sector::new(z_lo, z_hi, rho_lo, rho_hi, theta_lo, theta_hi).unwrap()
    }

    /// Small sector so the 0.1 mm face-sampling oracle stays cheap.
    fn sample_small_sector(rng: &mut StdRng) -> Sector {
        let z_lo: f64 = rng.random_range(-200.0..200.0);
        let z_hi = z_lo + rng.random_range(0.1..10.0);
        let rho_lo: f64 = rng.random_range(0.0..500.0);
        let rho_hi: f64 = rho_lo + rng.random_range(0.1..10.0);
        let theta_lo: f64 = rng.random_range(0.0..TAU);
        let arc: f64 = rng.random_range(0.1..12.0);
        let theta_hi = theta_lo + (arc / rho_hi.max(1.0)).min(TAU);
        Sector::new(z_lo, z_hi, rho_lo, rho_hi, theta_lo, theta_hi).unwrap()
    }

    /// Dense sampling of the sector boundary faces, used as an independent
    /// oracle for the closed-form distance. Only boundary points matter for
    /// a query outside the solid. A coarse scan is followed by local grid
    /// refinement around the best sample so near-field queries are accurate.
    fn oracle_distance(p: &CylPoint, s: &Sector, step: f64) -> f64 {
        if s.contains(p) {
            return 0.0;
        }
        let pc = p.to_cart();

        let scan = |rho_rng: (f64, f64), th_rng: (f64, f64), z_rng: (f64, f64), step: f64| {
            let count = |lo: f64, hi: f64, scale: f64| {
                (((hi - lo) * scale / step).ceil().max(1.0) as usize).min(4000)
            };
            let n_rho = count(rho_rng.0, rho_rng.1, 1.0);
            let n_th = count(th_rng.0, th_rng.1, s.rho_hi.max(1.0));
            let n_z = count(z_rng.0, z_rng.1, 1.0);
            let mut best = (f64::INFINITY, (0.0, 0.0, 0.0));
            let mut visit = |rho: f64, th: f64, z: f64| {
                let q = CartPoint::new(rho * th.cos(), rho * th.sin(), z);
                let d = pc.dist(q);
                if d < best.0 {
                    best = (d, (rho, th, z));
                }
            };
            let at = |rng: (f64, f64), n: usize, i: usize| {
                rng.0 + (rng.1 - rng.0) * i as f64 / n as f64
            };
            for j in 0..=n_th {
                for k in 0..=n_z {
                    let (th, z) = (at(th_rng, n_th, j), at(z_rng, n_z, k));
                    visit(rho_rng.0, th, z);
                    visit(rho_rng.1, th, z);
                }
            }
            for i in 0..=n_rho {
                for k in 0..=n_z {
                    let (rho, z) = (at(rho_rng, n_rho, i), at(z_rng, n_z, k));
                    visit(rho, th_rng.0, z);
                    visit(rho, th_rng.1, z);
                }
            }
            for i in 0..=n_rho {
                for j in 0..=n_th {
                    let (rho, th) = (at(rho_rng, n_rho, i), at(th_rng, n_th, j));
                    visit(rho, th, z_rng.0);
                    visit(rho, th, z_rng.1);
                }
            }
            best
        };

        let (mut best_d, mut at) = scan(
            (s.rho_lo, s.rho_hi),
            (s.theta_lo, s.theta_hi),
            (s.z_lo, s.z_hi),
            step,
        );
        // refine twice around the best coarse sample
        let mut h = step;
        for _ in 0..2 {
            let th_h = h / s.rho_hi.max(1.0);
            let rho_rng = (
                (at.0 - h).max(s.rho_lo),
                (at.0 + h).min(s.rho_hi),
            );
            let th_rng = (
                (at.1 - th_h).max(s.theta_lo),
                (at.1 + th_h).min(s.theta_hi),
            );
            let z_rng = ((at.2 - h).max(s.z_lo), (at.2 + h).min(s.z_hi));
            let (d, a) = scan(rho_rng, th_rng, z_rng, h / 50.0);
            if d < best_d {
                best_d = d;
                at = a;
            }
            h /= 50.0;
        }
        best_d
    }

    #[test]
    fn inside_is_zero() {
        let s = Sector::new(0.0, 10.0, 100.0, 200.0, 0.0, PI).unwrap();
        let p = CylPoint::new(5.0, 150.0, 1.0);
        assert_eq!(s.distance(&p), 0.0);
    }

    #[test]
    fn pure_radial_offset() {
        let s = Sector::new(0.0, 10.0, 100.0, 200.0, 0.0, PI).unwrap();
        let p = CylPoint::new(5.0, 210.0, 1.5);
        assert!((s.distance(&p) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn angular_offset_matches_oracle() {
        // 30 degrees beyond theta_hi at rho_hi, mid z
        let s = Sector::new(0.0, 100.0, 300.0, 400.0, 0.2, 1.2).unwrap();
        let p = CylPoint::new(50.0, 400.0, 1.2 + PI / 6.0);
        let exact = s.distance(&p);
        let approx = oracle_distance(&p, &s, 0.1);
        assert!(
            (exact - approx).abs() < 1e-3,
            "exact {} vs oracle {}",
            exact,
            approx
        );
    }

    #[test]
    fn wrapped_sector_containment() {
        // wedge crossing theta = 0
        let s = Sector::new(0.0, 1.0, 1.0, 2.0, 6.0, 6.0 + 1.0).unwrap();
        assert!(s.contains(&CylPoint::new(0.5, 1.5, 6.2)));
        assert!(s.contains(&CylPoint::new(0.5, 1.5, 0.4)));
        assert!(!s.contains(&CylPoint::new(0.5, 1.5, 3.0)));
    }

    #[test]
    fn random_pairs_match_sampling_oracle() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..60 {
            let s = sample_small_sector(&mut rng);
            // near the sector, where the oracle resolution is meaningful
            let p = CylPoint::new(
                (s.z_lo + s.z_hi) / 2.0 + rng.random_range(-40.0..40.0),
                (s.rho_lo + rng.random_range(-40.0..40.0)).max(0.0),
                s.theta_lo + rng.random_range(-0.3..0.3),
            );
            let exact = s.distance(&p);
            let approx = oracle_distance(&p, &s, 0.1);
            assert!(
                (exact - approx).abs() < 1e-3,
                "sector {:?} point {:?}: exact {} oracle {}",
                s,
                p,
                exact,
                approx
            );
        }
    }

    #[test]
    fn distance_never_exceeds_vertex_distance() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..1000 {
            let s = sample_sector(&mut rng);
            let p = CylPoint::new(
                rng.random_range(-300.0..500.0),
                rng.random_range(0.0..900.0),
                rng.random_range(0.0..TAU),
            );
            let d = s.distance(&p);
            // every corner of the sector is a feasible closest-point candidate
            let pc = p.to_cart();
            for &z in &[s.z_lo, s.z_hi] {
                for &rho in &[s.rho_lo, s.rho_hi] {
                    for &th in &[s.theta_lo, s.theta_hi] {
                        let v = CartPoint::new(rho * th.cos(), rho * th.sin(), z);
                        assert!(d <= pc.dist(v) + 1e-9);
                    }
                }
            }
        }
    }
}
