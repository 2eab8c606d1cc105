use serde::{Deserialize, Serialize};

use super::{TrussProblem, VariableKind};
use crate::error::TrussError;
use crate::search::{GridPoint, GridSpace};

/// Free parameters of a truss design: the (x, y) of every movable node in id
/// order, then the area of every member in id order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignVector {
    /// Movable-node coordinates in cm, flattened as x, y pairs.
    pub coords: Vec<f64>,
    /// Member areas in cm².
    pub areas: Vec<f64>,
}

impl DesignVector {
    pub fn new(coords: Vec<f64>, areas: Vec<f64>) -> Self {
        Self { coords, areas }
    }

    /// Flat value list in variable-layout order.
    pub fn values(&self) -> Vec<f64> {
        self.coords.iter().chain(&self.areas).copied().collect()
    }

    pub fn from_values(problem: &TrussProblem, values: &[f64]) -> Result<Self, TrussError> {
        let nc = 2 * problem.num_movable();
        if values.len() != problem.num_variables() {
            return Err(TrussError::DesignMismatch(format!(
                "expected {} values, got {}",
                problem.num_variables(),
                values.len()
            )));
        }
        Ok(Self {
            coords: values[..nc].to_vec(),
            areas: values[nc..].to_vec(),
        })
    }

    /// Design that places every movable node at its base position with the
    /// given area on every member.
    pub fn base(problem: &TrussProblem, area: f64) -> Self {
        let coords = problem.movable_nodes().flat_map(|n| [n.x, n.y]).collect();
        Self {
            coords,
            areas: vec![area; problem.members.len()],
        }
    }

    pub fn check_shape(&self, problem: &TrussProblem) -> Result<(), TrussError> {
        if self.coords.len() != 2 * problem.num_movable()
            || self.areas.len() != problem.members.len()
        {
            return Err(TrussError::DesignMismatch(format!(
                "design has {} coords and {} areas, problem expects {} and {}",
                self.coords.len(),
                self.areas.len(),
                2 * problem.num_movable(),
                problem.members.len()
            )));
        }
        Ok(())
    }

    pub fn area_of(&self, problem: &TrussProblem, member_id: u32) -> Result<f64, TrussError> {
        let i = problem
            .member_index(member_id)
            .ok_or(TrussError::UnknownMember(member_id))?;
        Ok(self.areas[i])
    }

    pub fn set_area(
        &mut self,
        problem: &TrussProblem,
        member_id: u32,
        area: f64,
    ) -> Result<(), TrussError> {
        let i = problem
            .member_index(member_id)
            .ok_or(TrussError::UnknownMember(member_id))?;
        self.areas[i] = area;
        Ok(())
    }

    /// Snap every value to its resolution grid and clip to bounds.
    pub fn quantized(&self, problem: &TrussProblem) -> Self {
        let space = GridSpace::for_problem(problem);
        let p = space.snap(&self.values());
        Self::from_values(problem, &space.values(&p)).expect("same layout")
    }

    pub fn is_quantized(&self, problem: &TrussProblem) -> bool {
        problem.variables().iter().zip(self.values()).all(|(v, x)| {
            let u = x / v.resolution;
            (u - u.round()).abs() < 1e-6
        })
    }

    pub fn in_bounds(&self, problem: &TrussProblem) -> bool {
        problem.variables().iter().zip(self.values()).all(|(v, x)| {
            let tol = 1e-9 * v.resolution;
            x >= v.bounds.0 - tol && x <= v.bounds.1 + tol
        })
    }

    pub fn to_grid(&self, problem: &TrussProblem) -> GridPoint {
        GridSpace::for_problem(problem).snap(&self.values())
    }

    pub fn from_grid(problem: &TrussProblem, point: &GridPoint) -> Self {
        let space = GridSpace::for_problem(problem);
        Self::from_values(problem, &space.values(point)).expect("same layout")
    }

    /// Current position of a node: design coordinates for movable nodes,
    /// problem coordinates otherwise.
    pub fn node_position(
        &self,
        problem: &TrussProblem,
        node_id: u32,
    ) -> Result<[f64; 2], TrussError> {
        let node = problem.node(node_id)?;
        for (k, v) in problem.variables().iter().enumerate() {
            match v.kind {
                VariableKind::X(id) if id == node_id => {
                    return Ok([self.coords[k], self.coords[k + 1]]);
                }
                VariableKind::Area(_) => break,
                _ => {}
            }
        }
        Ok([node.x, node.y])
    }

    /// Positions of all nodes in problem node order.
    pub fn node_positions(&self, problem: &TrussProblem) -> Vec<[f64; 2]> {
        let mut k = 0;
        problem
            .nodes
            .iter()
            .map(|n| {
                if n.kind == super::NodeKind::Movable {
                    let p = [self.coords[k], self.coords[k + 1]];
                    k += 2;
                    p
                } else {
                    [n.x, n.y]
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantize_snaps_and_clips() {
        let p = TrussProblem::canonical();
        let mut d = DesignVector::base(&p, 12.3456);
        d.coords[0] = 445.4;
        d.areas[0] = 9999.0;
        d.areas[1] = 0.0;
        let q = d.quantized(&p);
        assert_eq!(q.coords[0], 445.0);
        assert_eq!(q.areas[0], 500.0);
        assert_eq!(q.areas[1], 0.01);
        assert!((q.areas[2] - 12.35).abs() < 1e-12);
        assert!(q.is_quantized(&p));
        assert!(q.in_bounds(&p));
        assert!(!d.in_bounds(&p));
    }

    #[test]
    fn node_positions_follow_design() {
        let p = TrussProblem::canonical();
        let mut d = DesignVector::base(&p, 1.0);
        d.coords = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        assert_eq!(d.node_position(&p, 5).unwrap(), [3.0, 4.0]);
        assert_eq!(d.node_position(&p, 3).unwrap(), [1811.0, 0.0]);
        let all = d.node_positions(&p);
        assert_eq!(all[1], [1.0, 2.0]);
        assert_eq!(all[5], [5.0, 6.0]);
    }

    #[test]
    fn grid_roundtrip() {
        let p = TrussProblem::canonical();
        let d = DesignVector::base(&p, 60.39).quantized(&p);
        let g = d.to_grid(&p);
        assert_eq!(DesignVector::from_grid(&p, &g), d);
    }
}
