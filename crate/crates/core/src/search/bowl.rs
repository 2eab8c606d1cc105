use super::{Assessment, GridPoint, GridSpace, Objective};
use crate::truss::FamilyTotals;

/// Separable quadratic test objective `Σ (x_i − c_i)²` on a uniform grid.
///
/// An optional limit adds a constraint `Σ x_i ≤ limit`, reported as a stress
/// violation, so hard- and soft-constraint paths can be exercised.
#[derive(Debug, Clone)]
pub struct QuadraticBowl {
    pub center: Vec<f64>,
    pub limit: Option<f64>,
    space: GridSpace,
}

impl QuadraticBowl {
    pub fn new(center: Vec<f64>, resolution: f64, lo: f64, hi: f64) -> Self {
        let space = GridSpace::uniform(center.len(), resolution, lo, hi);
        Self {
            center,
            limit: None,
            space,
        }
    }

    pub fn with_limit(mut self, limit: f64) -> Self {
        self.limit = Some(limit);
        self
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.center)
            .map(|(a, c)| (a - c).powi(2))
            .sum()
    }
}

impl Objective for QuadraticBowl {
    fn space(&self) -> &GridSpace {
        &self.space
    }

    fn assess(&self, point: &GridPoint) -> Assessment {
        let x = self.space.values(point);
        let excess = self
            .limit
            .map_or(0.0, |l| (x.iter().sum::<f64>() - l).max(0.0));
        Assessment {
            objective: self.value(&x),
            violation: FamilyTotals {
                stress: excess,
                ..FamilyTotals::default()
            },
            singular: false,
        }
    }
}
