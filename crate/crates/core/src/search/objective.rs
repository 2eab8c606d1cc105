use serde::{Deserialize, Serialize};

use super::{GridPoint, GridSpace, SearchOutcome};
use crate::error::SearchError;
use crate::truss::{solve, DesignVector, FamilyTotals, TrussProblem};

/// What a search sees of one design: the objective (mass) and the summed
/// violation of each constraint family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub objective: f64,
    pub violation: FamilyTotals,
    /// Mechanism or degenerate geometry: unusable under any penalty.
    pub singular: bool,
}

impl Assessment {
    pub fn feasible(&self) -> bool {
        !self.singular && self.violation.is_zero()
    }

    pub fn unconstrained(objective: f64) -> Self {
        Self {
            objective,
            violation: FamilyTotals::default(),
            singular: false,
        }
    }
}

/// A quantized minimization problem.
pub trait Objective: Sync {
    fn space(&self) -> &GridSpace;
    fn assess(&self, point: &GridPoint) -> Assessment;
}

/// The truss as a search objective: mass subject to stress, buckling and
/// length constraints.
#[derive(Debug, Clone)]
pub struct TrussObjective {
    problem: TrussProblem,
    space: GridSpace,
}

impl TrussObjective {
    pub fn new(problem: TrussProblem) -> Self {
        let space = GridSpace::for_problem(&problem);
        Self { problem, space }
    }

    pub fn problem(&self) -> &TrussProblem {
        &self.problem
    }

    pub fn design(&self, point: &GridPoint) -> DesignVector {
        DesignVector::from_values(&self.problem, &self.space.values(point)).expect("same layout")
    }
}

impl Objective for TrussObjective {
    fn space(&self) -> &GridSpace {
        &self.space
    }

    fn assess(&self, point: &GridPoint) -> Assessment {
        match solve(&self.problem, &self.design(point)) {
            Ok(ev) => Assessment {
                objective: ev.mass,
                violation: ev.violations.totals(),
                singular: ev.singular,
            },
            Err(_) => Assessment {
                objective: f64::INFINITY,
                violation: FamilyTotals::default(),
                singular: true,
            },
        }
    }
}

/// Evaluation counter with a hard cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationBudget {
    pub max_evaluations: u64,
    pub used: u64,
}

impl EvaluationBudget {
    pub fn new(max_evaluations: u64) -> Self {
        Self {
            max_evaluations,
            used: 0,
        }
    }

    pub fn remaining(&self) -> u64 {
        self.max_evaluations - self.used
    }

    pub fn exhausted(&self) -> bool {
        self.used >= self.max_evaluations
    }
}

/// The only path from a search to its objective. Every call to
/// [`Evaluator::evaluate`] costs exactly one evaluation.
pub struct Evaluator<'a, O: Objective + ?Sized> {
    objective: &'a O,
    budget: EvaluationBudget,
    trace: Option<Vec<(u64, f64)>>,
    best_feasible: Option<(GridPoint, Assessment, u64)>,
}

impl<'a, O: Objective + ?Sized> Evaluator<'a, O> {
    pub fn new(objective: &'a O, max_evaluations: u64) -> Self {
        Self {
            objective,
            budget: EvaluationBudget::new(max_evaluations),
            trace: None,
            best_feasible: None,
        }
    }

    /// Records `(evaluation index, best feasible objective so far)` whenever
    /// the best improves.
    pub fn with_trace(mut self, on: bool) -> Self {
        self.trace = on.then(Vec::new);
        self
    }

    pub fn space(&self) -> &GridSpace {
        self.objective.space()
    }

    pub fn objective(&self) -> &'a O {
        self.objective
    }

    pub fn budget(&self) -> EvaluationBudget {
        self.budget
    }

    pub fn used(&self) -> u64 {
        self.budget.used
    }

    pub fn exhausted(&self) -> bool {
        self.budget.exhausted()
    }

    pub fn evaluate(&mut self, point: &GridPoint) -> Result<Assessment, SearchError> {
        if self.budget.exhausted() {
            return Err(SearchError::BudgetExhausted(self.budget.max_evaluations));
        }
        self.budget.used += 1;
        let a = self.objective.assess(point);
        let improves = self
            .best_feasible
            .as_ref()
            .is_none_or(|(_, b, _)| a.objective < b.objective);
        if a.feasible() && improves {
            self.best_feasible = Some((point.clone(), a, self.budget.used));
            if let Some(t) = self.trace.as_mut() {
                t.push((self.budget.used, a.objective));
            }
        }
        Ok(a)
    }

    /// Lightest feasible design evaluated so far, with the evaluation index
    /// at which it was first seen.
    pub fn best_feasible(&self) -> Option<&(GridPoint, Assessment, u64)> {
        self.best_feasible.as_ref()
    }

    /// Packages the best feasible design seen as a run outcome.
    pub fn outcome(&mut self, budget_exhausted: bool) -> Option<SearchOutcome> {
        let (best, best_assessment, at) = self.best_feasible.clone()?;
        Some(SearchOutcome {
            best,
            best_assessment,
            evaluations_used: self.budget.used,
            evaluations_to_best: at,
            budget_exhausted,
            trace: self.take_trace(),
        })
    }

    pub fn take_trace(&mut self) -> Option<Vec<(u64, f64)>> {
        self.trace.take()
    }
}

/// Wraps an objective and counts how often it is actually assessed. Used to
/// check that budget accounting matches real work.
pub struct CountingObjective<O> {
    inner: O,
    calls: std::sync::atomic::AtomicU64,
}

impl<O> CountingObjective<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            calls: std::sync::atomic::AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(std::sync::atomic::Ordering::Relaxed)
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: Objective> Objective for CountingObjective<O> {
    fn space(&self) -> &GridSpace {
        self.inner.space()
    }

    fn assess(&self, point: &GridPoint) -> Assessment {
        self.calls
            .fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        self.inner.assess(point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::QuadraticBowl;

    #[test]
    fn budget_is_exact() {
        let bowl = CountingObjective::new(QuadraticBowl::new(vec![3.0, -2.0], 1.0, -10.0, 10.0));
        let mut ev = Evaluator::new(&bowl, 5);
        let p = GridPoint(vec![0, 0]);
        for _ in 0..5 {
            ev.evaluate(&p).unwrap();
        }
        assert_eq!(ev.used(), 5);
        assert!(matches!(
            ev.evaluate(&p),
            Err(SearchError::BudgetExhausted(5))
        ));
        assert_eq!(ev.used(), 5);
        assert_eq!(bowl.calls(), 5);
    }

    #[test]
    fn degenerate_truss_geometry_is_singular() {
        let obj = TrussObjective::new(TrussProblem::canonical());
        let mut d = DesignVector::base(obj.problem(), 10.0);
        // Put node 2 on top of the support node 1.
        d.coords[0] = 0.0;
        d.coords[1] = 0.0;
        let mut p = d.to_grid(obj.problem());
        p.0[0] = 0;
        p.0[1] = 0;
        let a = obj.assess(&p);
        assert!(a.singular);
        assert!(!a.feasible());
    }
}
