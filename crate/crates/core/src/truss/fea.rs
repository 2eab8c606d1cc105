//! Linear-elastic analysis of 2-D pin-jointed trusses by the direct
//! stiffness method.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{check_constraints, DesignVector, Material, TrussProblem, Violations};
use crate::error::TrussError;

/// Relative pivot tolerance of the Cholesky factorization. A pivot below
/// `PIVOT_TOLERANCE * max(diag K)` marks the structure as a mechanism.
pub const PIVOT_TOLERANCE: f64 = 1e-10;

/// Result of analysing one design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// Member ids, in the order of every per-member vector below.
    pub member_ids: Vec<u32>,
    /// kg.
    pub mass: f64,
    /// cm.
    pub lengths: Vec<f64>,
    /// N, tension positive.
    pub axial_forces: Vec<f64>,
    /// N/cm², tension positive.
    pub stresses: Vec<f64>,
    /// `σ_cr − |σ|` for compression members, `+∞` for tension members.
    pub buckling_margins: Vec<f64>,
    /// Nodal displacements (ux, uy) in problem node order, cm.
    pub displacements: Vec<[f64; 2]>,
    pub violations: Violations,
    pub feasible: bool,
    /// The reduced stiffness matrix is singular (mechanism).
    pub singular: bool,
}

impl Evaluation {
    /// Index of a member in the per-member vectors.
    pub fn index_of(&self, member_id: u32) -> Option<usize> {
        self.member_ids.iter().position(|&m| m == member_id)
    }

    /// Ids of members with any non-zero violation.
    pub fn violating_members(&self) -> Vec<u32> {
        self.member_ids
            .iter()
            .enumerate()
            .filter(|&(i, _)| self.violations.member_violated(i))
            .map(|(_, &id)| id)
            .collect()
    }
}

/// Euclidean length of a member at the current design.
pub fn member_length(
    problem: &TrussProblem,
    design: &DesignVector,
    member_id: u32,
) -> Result<f64, TrussError> {
    let m = problem.member(member_id)?;
    let a = design.node_position(problem, m.ends[0])?;
    let b = design.node_position(problem, m.ends[1])?;
    let l = (b[0] - a[0]).hypot(b[1] - a[1]);
    if l == 0.0 {
        return Err(TrussError::DegenerateGeometry { member: member_id });
    }
    Ok(l)
}

fn lengths_and_cosines(
    problem: &TrussProblem,
    positions: &[[f64; 2]],
) -> Result<Vec<(f64, f64, f64)>, TrussError> {
    problem
        .members
        .iter()
        .map(|m| {
            let ia = problem.node_index(m.ends[0]).expect("validated");
            let ib = problem.node_index(m.ends[1]).expect("validated");
            let dx = positions[ib][0] - positions[ia][0];
            let dy = positions[ib][1] - positions[ia][1];
            let l = dx.hypot(dy);
            if l == 0.0 {
                return Err(TrussError::DegenerateGeometry { member: m.id });
            }
            Ok((l, dx / l, dy / l))
        })
        .collect()
}

/// Structural mass `ρ Σ A_i L_i` in kg.
pub fn mass(problem: &TrussProblem, design: &DesignVector) -> Result<f64, TrussError> {
    design.check_shape(problem)?;
    let geo = lengths_and_cosines(problem, &design.node_positions(problem))?;
    Ok(problem.material.density
        * geo
            .iter()
            .zip(&design.areas)
            .map(|(&(l, _, _), &a)| a * l)
            .sum::<f64>())
}

/// Euler critical stress of a pinned solid circular bar:
/// `σ_cr = P_cr / A = π E A / (4 L²)` with `I = A² / (4π)`.
pub fn buckling_critical_stress(material: &Material, area: f64, length: f64) -> f64 {
    PI * material.young_modulus * area / (4.0 * length * length)
}

/// Dense Cholesky factorization in place (lower triangle). Returns `false`
/// when a pivot falls below the tolerance.
fn cholesky(k: &mut [f64], n: usize) -> bool {
    let max_diag = (0..n).map(|i| k[i * n + i]).fold(0.0_f64, f64::max);
    if max_diag <= 0.0 {
        return n == 0;
    }
    let tol = PIVOT_TOLERANCE * max_diag;
    for j in 0..n {
        let mut d = k[j * n + j];
        for p in 0..j {
            d -= k[j * n + p] * k[j * n + p];
        }
        if d <= tol {
            return false;
        }
        let d = d.sqrt();
        k[j * n + j] = d;
        for i in j + 1..n {
            let mut s = k[i * n + j];
            for p in 0..j {
                s -= k[i * n + p] * k[j * n + p];
            }
            k[i * n + j] = s / d;
        }
    }
    true
}

fn cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for p in 0..i {
            s -= l[i * n + p] * b[p];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for p in i + 1..n {
            s -= l[p * n + i] * b[p];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Reduced stiffness matrix (free DOFs only, row-major) and load vector.
/// `dof_map[node]` gives the first reduced DOF of a free node.
pub(crate) struct Assembly {
    pub n: usize,
    pub k: Vec<f64>,
    pub f: Vec<f64>,
    pub dof_map: Vec<Option<usize>>,
    geo: Vec<(f64, f64, f64)>,
}

pub(crate) fn assemble(
    problem: &TrussProblem,
    design: &DesignVector,
) -> Result<Assembly, TrussError> {
    design.check_shape(problem)?;
    let positions = design.node_positions(problem);
    let geo = lengths_and_cosines(problem, &positions)?;
    let mut dof_map = Vec::with_capacity(problem.nodes.len());
    let mut n = 0;
    for node in &problem.nodes {
        if node.is_free() {
            dof_map.push(Some(n));
            n += 2;
        } else {
            dof_map.push(None);
        }
    }
    let mut k = vec![0.0; n * n];
    let mut f = vec![0.0; n];
    for (node, d) in problem.nodes.iter().zip(&dof_map) {
        if let Some(d) = d {
            let [fx, fy] = node.applied_load();
            f[*d] = fx;
            f[d + 1] = fy;
        }
    }
    let e = problem.material.young_modulus;
    for (m, (&(l, c, s), &a)) in problem.members.iter().zip(geo.iter().zip(&design.areas)) {
        let stiff = e * a / l;
        let ia = problem.node_index(m.ends[0]).expect("validated");
        let ib = problem.node_index(m.ends[1]).expect("validated");
        // Element DOF vector (ua_x, ua_y, ub_x, ub_y) and direction (-c, -s, c, s).
        let dofs = [
            dof_map[ia],
            dof_map[ia].map(|d| d + 1),
            dof_map[ib],
            dof_map[ib].map(|d| d + 1),
        ];
        let t = [-c, -s, c, s];
        for i in 0..4 {
            let Some(di) = dofs[i] else { continue };
            for j in 0..4 {
                let Some(dj) = dofs[j] else { continue };
                k[di * n + dj] += stiff * t[i] * t[j];
            }
        }
    }
    Ok(Assembly {
        n,
        k,
        f,
        dof_map,
        geo,
    })
}

/// Analyses a design: assembles and solves the stiffness system, then fills
/// forces, stresses, buckling margins and constraint violations.
///
/// A singular reduced stiffness matrix is not an error: the evaluation comes
/// back with `singular = true` and `feasible = false`.
pub fn solve(problem: &TrussProblem, design: &DesignVector) -> Result<Evaluation, TrussError> {
    let asm = assemble(problem, design)?;
    let n = asm.n;
    let mut l = asm.k.clone();
    let ok = cholesky(&mut l, n);
    let mut u = asm.f.clone();
    if ok {
        cholesky_solve(&l, n, &mut u);
    }
    let singular = !ok;

    let displacements: Vec<[f64; 2]> = asm
        .dof_map
        .iter()
        .map(|d| match (d, singular) {
            (Some(d), false) => [u[*d], u[d + 1]],
            _ => [0.0, 0.0],
        })
        .collect();

    let e = problem.material.young_modulus;
    let nm = problem.members.len();
    let mut lengths = Vec::with_capacity(nm);
    let mut axial_forces = Vec::with_capacity(nm);
    let mut stresses = Vec::with_capacity(nm);
    let mut buckling_margins = Vec::with_capacity(nm);
    for (m, (&(len, c, s), &a)) in problem
        .members
        .iter()
        .zip(asm.geo.iter().zip(&design.areas))
    {
        let ia = problem.node_index(m.ends[0]).expect("validated");
        let ib = problem.node_index(m.ends[1]).expect("validated");
        let du = displacements[ib][0] - displacements[ia][0];
        let dv = displacements[ib][1] - displacements[ia][1];
        let force = e * a / len * (c * du + s * dv);
        let stress = force / a;
        lengths.push(len);
        axial_forces.push(force);
        stresses.push(stress);
        buckling_margins.push(if force < 0.0 {
            buckling_critical_stress(&problem.material, a, len) - stress.abs()
        } else {
            f64::INFINITY
        });
    }
    let mass = problem.material.density
        * lengths
            .iter()
            .zip(&design.areas)
            .map(|(l, a)| l * a)
            .sum::<f64>();

    let mut ev = Evaluation {
        member_ids: problem.members.iter().map(|m| m.id).collect(),
        mass,
        lengths,
        axial_forces,
        stresses,
        buckling_margins,
        displacements,
        violations: Violations::zeros(nm),
        feasible: false,
        singular,
    };
    let (violations, feasible) = check_constraints(problem, &ev);
    ev.violations = violations;
    ev.feasible = feasible;
    Ok(ev)
}
