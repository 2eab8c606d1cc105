use serde::{Deserialize, Serialize};

use crate::error::TrussError;

/// Linear elastic isotropic material. Units: N, cm, kg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// Young's modulus in N/cm².
    pub young_modulus: f64,
    /// Mass density in kg/cm³.
    pub density: f64,
    /// Allowable axial stress magnitude in N/cm².
    pub allowable_stress: f64,
}

impl Default for Material {
    /// Aluminium.
    fn default() -> Self {
        Self {
            young_modulus: 6.88e6,
            density: 2.7e-3,
            allowable_stress: 17_200.0,
        }
    }
}

impl Material {
    pub fn validate(&self) -> Result<(), TrussError> {
        let fields = [
            ("young_modulus", self.young_modulus),
            ("density", self.density),
            ("allowable_stress", self.allowable_stress),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(TrussError::InvalidProblem(format!(
                    "material {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_aluminium() {
        let m = Material::default();
        assert_eq!(m.young_modulus, 6.88e6);
        assert_eq!(m.density, 2.7e-3);
        assert_eq!(m.allowable_stress, 17_200.0);
        assert!(m.validate().is_ok());
    }

    #[test]
    fn rejects_non_positive() {
        let m = Material {
            density: 0.0,
            ..Material::default()
        };
        assert!(m.validate().is_err());
    }
}
