//! Turning optimizer output into usable designs: dropping minimum-area
//! members and nudging areas to clear small violations.

use serde::{Deserialize, Serialize};

use super::{solve, DesignVector, Evaluation, TrussProblem};
use crate::error::TrussError;

/// State of a structure after minimum-area members were removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ReductionStatus {
    /// Nothing matched the removal criterion.
    Unchanged,
    Feasible,
    /// The reduced structure is a mechanism.
    Singular,
    /// Ids of members that violate a constraint after removal.
    Violations(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub problem: TrussProblem,
    pub design: DesignVector,
    pub evaluation: Evaluation,
    pub removed: Vec<u32>,
    pub status: ReductionStatus,
}

/// Removes every member at the minimum area, plus any member whose area is
/// below `small_area` when given, and re-analyses the result.
///
/// Infeasibility of the reduced structure is reported in the status, never
/// returned as an error.
pub fn reduce_topology(
    problem: &TrussProblem,
    design: &DesignVector,
    evaluation: &Evaluation,
    small_area: Option<f64>,
) -> Result<Reduction, TrussError> {
    if !evaluation.feasible {
        return Err(TrussError::NotFeasible(
            "topology reduction starts from a feasible design".into(),
        ));
    }
    design.check_shape(problem)?;
    let amin = problem.limits.area_min;
    let eps = 1e-9 * problem.limits.area_resolution;
    let removed: Vec<u32> = problem
        .members
        .iter()
        .zip(&design.areas)
        .filter(|&(_, &a)| a <= amin + eps || small_area.is_some_and(|t| a < t))
        .map(|(m, _)| m.id)
        .collect();
    if removed.is_empty() {
        return Ok(Reduction {
            problem: problem.clone(),
            design: design.clone(),
            evaluation: evaluation.clone(),
            removed,
            status: ReductionStatus::Unchanged,
        });
    }
    let reduced = problem.without_members(&removed);
    let areas = problem
        .members
        .iter()
        .zip(&design.areas)
        .filter(|(m, _)| !removed.contains(&m.id))
        .map(|(_, &a)| a)
        .collect();
    let reduced_design = DesignVector::new(design.coords.clone(), areas);
    let ev = solve(&reduced, &reduced_design)?;
    let status = if ev.singular {
        ReductionStatus::Singular
    } else if ev.feasible {
        ReductionStatus::Feasible
    } else {
        ReductionStatus::Violations(ev.violating_members())
    };
    Ok(Reduction {
        problem: reduced,
        design: reduced_design,
        evaluation: ev,
        removed,
        status,
    })
}

/// One area change made by [`repair_minimal`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaChange {
    pub member: u32,
    pub from: f64,
    pub to: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Repair {
    pub design: DesignVector,
    pub evaluation: Evaluation,
    pub changes: Vec<AreaChange>,
    pub iterations: usize,
}

/// Default iteration cap for [`repair_minimal`].
pub const REPAIR_MAX_ITERATIONS: usize = 50;

/// Raises the area of each stress- or buckling-violating member to the
/// smallest grid value that clears its violation at its current force, then
/// re-analyses; repeats until feasible or `max_iterations` passes.
///
/// Only areas change, so length deficits and mechanisms cannot be repaired.
pub fn repair_minimal(
    problem: &TrussProblem,
    design: &DesignVector,
    evaluation: &Evaluation,
    max_iterations: usize,
) -> Result<Repair, TrussError> {
    let fail = |iterations, ev: &Evaluation| TrussError::RepairFailed {
        iterations,
        residual: Box::new(ev.violations.clone()),
    };
    if evaluation.singular
        || evaluation
            .violations
            .length_deficit
            .iter()
            .any(|&d| d > 0.0)
    {
        return Err(fail(0, evaluation));
    }
    let res = problem.limits.area_resolution;
    let e = problem.material.young_modulus;
    let allow = problem.material.allowable_stress;
    let mut current = design.clone();
    let mut ev = evaluation.clone();
    let original = design.areas.clone();
    let mut iterations = 0;
    while !ev.feasible {
        if iterations == max_iterations {
            return Err(fail(iterations, &ev));
        }
        iterations += 1;
        for (i, m) in problem.members.iter().enumerate() {
            let (se, be) = (
                ev.violations.stress_excess[i],
                ev.violations.buckling_excess[i],
            );
            if se == 0.0 && be == 0.0 {
                continue;
            }
            let a = current.areas[i];
            let f = ev.axial_forces[i].abs();
            let l = ev.lengths[i];
            let mut need = f / allow;
            if ev.axial_forces[i] < 0.0 {
                // |F| / A <= π E A / (4 L²)
                need = need.max((4.0 * l * l * f / (std::f64::consts::PI * e)).sqrt());
            }
            let units = ((need / res) - 1e-9).ceil().max((a / res).round() + 1.0);
            let new_area = units * res;
            let (_, hi) = problem.area_bounds(m);
            if new_area > hi + 1e-9 * res {
                return Err(fail(iterations, &ev));
            }
            current.areas[i] = new_area;
        }
        ev = solve(problem, &current)?;
        if ev.singular {
            return Err(fail(iterations, &ev));
        }
    }
    let changes = problem
        .members
        .iter()
        .zip(original.iter().zip(&current.areas))
        .filter(|(_, (a, b))| a != b)
        .map(|(m, (&from, &to))| AreaChange {
            member: m.id,
            from,
            to,
        })
        .collect();
    Ok(Repair {
        design: current,
        evaluation: ev,
        changes,
        iterations,
    })
}
