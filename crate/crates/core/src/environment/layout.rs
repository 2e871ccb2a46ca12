use crate::error::{Error, Result};
use crate::geometry::CylPoint;
use serde::{Deserialize, Serialize};

/// Annular layout space between two surfaces of revolution.
///
/// The inner (casing) and outer (nacelle) surfaces are generated by
/// rotating the generatrices `rho = f_c(z)` and `rho = f_n(z)` around the
/// z axis; both are given as polynomial coefficients in ascending order.
/// A point lies in the space iff `f_c(z) <= rho < f_n(z)` and
/// `z_min <= z < z_max`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayoutSpace {
    casing_coeffs: Vec<f64>,
    nacelle_coeffs: Vec<f64>,
    z_min: f64,
    z_max: f64,
    rho_min: f64,
    rho_max: f64,
}

fn polyval(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

impl LayoutSpace {
    /// Validates that the casing stays strictly below the nacelle over the
    /// whole z range, sampling at 1 mm.
    pub fn new(
        casing_coeffs: Vec<f64>,
        nacelle_coeffs: Vec<f64>,
        z_min: f64,
        z_max: f64,
    ) -> Result<Self> {
        if casing_coeffs.is_empty() || nacelle_coeffs.is_empty() {
            return Err(Error::Config("generatrix coefficients are empty".into()));
        }
        if !(z_min < z_max) {
            return Err(Error::Config(format!(
                "z range [{z_min}, {z_max}] is empty"
            )));
        }
        let n = ((z_max - z_min).ceil() as usize).max(1);
        let mut rho_min = f64::INFINITY;
        let mut rho_max = f64::NEG_INFINITY;
        for i in 0..=n {
            let z = (z_min + i as f64).min(z_max);
            let c = polyval(&casing_coeffs, z);
            let nc = polyval(&nacelle_coeffs, z);
            if !(c < nc) {
                return Err(Error::Config(format!(
                    "casing radius {c} not below nacelle radius {nc} at z = {z}"
                )));
            }
            if c < 0.0 {
                return Err(Error::Config(format!(
                    "casing radius {c} negative at z = {z}"
                )));
            }
            rho_min = rho_min.min(c);
            rho_max = rho_max.max(nc);
        }
        Ok(LayoutSpace {
            casing_coeffs,
            nacelle_coeffs,
            z_min,
            z_max,
            rho_min,
            rho_max,
        })
    }

    pub fn casing_radius(&self, z: f64) -> f64 {
        polyval(&self.casing_coeffs, z)
    }

    pub fn nacelle_radius(&self, z: f64) -> f64 {
        polyval(&self.nacelle_coeffs, z)
    }

    pub fn casing_coeffs(&self) -> &[f64] {
        &self.casing_coeffs
    }

    pub fn nacelle_coeffs(&self) -> &[f64] {
        &self.nacelle_coeffs
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    /// Smallest casing radius over the z range (the radial table origin).
    pub fn rho_min(&self) -> f64 {
        self.rho_min
    }

    /// Largest nacelle radius over the z range.
    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    /// Membership test: inclusive at the casing, exclusive at the nacelle
    /// and at z_max.
    pub fn contains(&self, p: &CylPoint) -> bool {
        self.z_min <= p.z
            && p.z < self.z_max
            && self.casing_radius(p.z) <= p.rho
            && p.rho < self.nacelle_radius(p.z)
    }
}
