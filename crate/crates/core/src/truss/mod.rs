//! The parametric truss model: problem definition, design vector, analysis,
//! constraint checks and post-processing.

mod constraints;
mod design;
mod fea;
mod material;
mod postprocess;
mod problem;

pub use constraints::{check_constraints, FamilyTotals, Violations};
pub use design::DesignVector;
pub use fea::{buckling_critical_stress, mass, member_length, solve, Evaluation, PIVOT_TOLERANCE};
pub use material::Material;
pub use postprocess::{
    reduce_topology, repair_minimal, AreaChange, Reduction, ReductionStatus, Repair,
    REPAIR_MAX_ITERATIONS,
};
pub use problem::{
    Limits, MemberSpec, NodeKind, NodeSpec, TrussProblem, Variable, VariableKind,
    CANONICAL_PROBLEM_TOML,
};
