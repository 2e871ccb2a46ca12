use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

/// Cartesian point / vector, components in millimetres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CartPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        CartPoint { x, y, z }
    }

    pub const ZERO: CartPoint = CartPoint::new(0.0, 0.0, 0.0);

    pub fn scale(self, k: f64) -> Self {
        CartPoint::new(self.x * k, self.y * k, self.z * k)
    }

    pub fn dot(self, o: CartPoint) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(self, o: CartPoint) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction, or `None` for a (near-)zero vector.
    pub fn try_normalized(self) -> Option<CartPoint> {
        let n = self.norm();
        if n > 1e-12 {
            Some(self.scale(1.0 / n))
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_cyl(self) -> CylPoint {
        let rho = (self.x * self.x + self.y * self.y).sqrt();
        let theta = if rho == 0.0 {
            // on-axis convention
            0.0
        } else {
            normalize_angle(self.y.atan2(self.x))
        };
        CylPoint {
            z: self.z,
            rho,
            theta,
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        CartPoint::new(a[0], a[1], a[2])
    }
}

impl Add for CartPoint {
    type Output = CartPoint;
    fn add(self, o: CartPoint) -> CartPoint {
        CartPoint::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for CartPoint {
    type Output = CartPoint;
    fn sub(self, o: CartPoint) -> CartPoint {
        CartPoint::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for CartPoint {
    type Output = CartPoint;
    fn mul(self, k: f64) -> CartPoint {
        self.scale(k)
    }
}

impl Neg for CartPoint {
    type Output = CartPoint;
    fn neg(self) -> CartPoint {
        self.scale(-1.0)
    }
}

/// Cylindrical point: axial position `z` (mm), radius `rho` (mm, >= 0),
/// azimuth `theta` (radians in [0, 2pi)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylPoint {
    pub z: f64,
    pub rho: f64,
    pub theta: f64,
}

impl CylPoint {
    pub fn new(z: f64, rho: f64, theta: f64) -> Self {
        CylPoint {
            z,
            rho,
            theta: normalize_angle(theta),
        }
    }

    pub fn to_cart(self) -> CartPoint {
        CartPoint::new(
            self.rho * self.theta.cos(),
            self.rho * self.theta.sin(),
            self.z,
        )
    }
}

/// Reduce an angle to [0, 2pi).
pub fn normalize_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn axis_aligned_conversions() {
        let c = CartPoint::new(1.0, 0.0, 2.0).to_cyl();
        assert_eq!(c.z, 2.0);
        assert!((c.rho - 1.0).abs() < 1e-12);
        assert_eq!(c.theta, 0.0);

        let c = CartPoint::new(0.0, 1.0, 2.0).to_cyl();
        assert!((c.theta - FRAC_PI_2).abs() < 1e-12);
        assert!((c.rho - 1.0).abs() < 1e-12);
    }

    #[test]
    fn on_axis_theta_convention() {
        let c = CartPoint::new(0.0, 0.0, 5.0).to_cyl();
        assert_eq!(c.rho, 0.0);
        assert_eq!(c.theta, 0.0);
        assert_eq!(c.z, 5.0);
    }

    #[test]
    fn negative_quadrant_normalized() {
        let c = CartPoint::new(-1.0, -1.0, 0.0).to_cyl();
        assert!(c.theta >= 0.0 && c.theta < TAU);
        assert!((c.theta - (PI + PI / 4.0)).abs() < 1e-12);
    }

    #[test]
    fn normalize_angle_edges() {
        assert_eq!(normalize_angle(0.0), 0.0);
        assert_eq!(normalize_angle(TAU), 0.0);
        assert!(normalize_angle(-1e-18) < TAU);
        assert!((normalize_angle(-FRAC_PI_2) - (TAU - FRAC_PI_2)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn round_trip_off_axis(x in -1000.0f64..1000.0, y in -1000.0f64..1000.0, z in -1000.0f64..1000.0) {
            prop_assume!(x.abs() > 1e-6 || y.abs() > 1e-6);
            let p = CartPoint::new(x, y, z);
            let back = p.to_cyl().to_cart();
            prop_assert!(p.dist(back) < 1e-9, "round trip drifted by {}", p.dist(back));
        }

        #[test]
        fn cyl_round_trip(z in -500.0f64..500.0, rho in 0.001f64..900.0, theta in 0.0f64..TAU) {
            let p = CylPoint::new(z, rho, theta);
            let back = p.to_cart().to_cyl();
            prop_assert!((back.z - p.z).abs() < 1e-9);
            prop_assert!((back.rho - p.rho).abs() < 1e-9);
            let dt = (back.theta - p.theta).abs();
            let dt = dt.min(TAU - dt);
            prop_assert!(dt * rho < 1e-9, "angular drift {} at rho {}", dt, rho);
        }
    }
}
