use serde::{Deserialize, Serialize};

use super::{Evaluation, TrussProblem};

/// Per-member constraint violation magnitudes. Zero means satisfied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violations {
    /// `max(0, |σ| − σ_allow)`, N/cm².
    pub stress_excess: Vec<f64>,
    /// `max(0, |σ| − σ_cr)` for compression members, N/cm².
    pub buckling_excess: Vec<f64>,
    /// `max(0, L_min − L)`, cm.
    pub length_deficit: Vec<f64>,
}

/// Summed violation per constraint family.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FamilyTotals {
    pub stress: f64,
    pub buckling: f64,
    pub length: f64,
}

impl FamilyTotals {
    pub fn as_array(&self) -> [f64; 3] {
        [self.stress, self.buckling, self.length]
    }

    pub fn is_zero(&self) -> bool {
        self.stress == 0.0 && self.buckling == 0.0 && self.length == 0.0
    }

    pub fn sum(&self) -> f64 {
        self.stress + self.buckling + self.length
    }
}

impl Violations {
    pub fn zeros(n: usize) -> Self {
        Self {
            stress_excess: vec![0.0; n],
            buckling_excess: vec![0.0; n],
            length_deficit: vec![0.0; n],
        }
    }

    pub fn member_violated(&self, i: usize) -> bool {
        self.stress_excess[i] > 0.0 || self.buckling_excess[i] > 0.0 || self.length_deficit[i] > 0.0
    }

    pub fn is_clear(&self) -> bool {
        (0..self.stress_excess.len()).all(|i| !self.member_violated(i))
    }

    pub fn totals(&self) -> FamilyTotals {
        FamilyTotals {
            stress: self.stress_excess.iter().sum(),
            buckling: self.buckling_excess.iter().sum(),
            length: self.length_deficit.iter().sum(),
        }
    }
}

/// Stress, Euler buckling (compression only) and minimum-length checks.
/// Returns the violation magnitudes and the feasibility flag, which also
/// requires a non-singular structure.
pub fn check_constraints(problem: &TrussProblem, evaluation: &Evaluation) -> (Violations, bool) {
    let allow = problem.material.allowable_stress;
    let min_len = problem.limits.min_member_length;
    let n = evaluation.lengths.len();
    let mut v = Violations::zeros(n);
    for i in 0..n {
        v.length_deficit[i] = (min_len - evaluation.lengths[i]).max(0.0);
        if evaluation.singular {
            continue;
        }
        v.stress_excess[i] = (evaluation.stresses[i].abs() - allow).max(0.0);
        // Margin is +inf for tension members.
        v.buckling_excess[i] = (-evaluation.buckling_margins[i]).max(0.0);
    }
    let feasible = !evaluation.singular && v.is_clear();
    (v, feasible)
}
