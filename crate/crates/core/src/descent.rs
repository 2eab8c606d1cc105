//! Variable-step steepest descent over the quantized design grid.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::SearchError;
use crate::search::{
    scatter_init, Assessment, Evaluator, GridPoint, GridSpace, Objective, SearchOutcome,
};

/// Settings shared by every algorithm's run driver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub max_evaluations: u64,
    pub scatter_count: usize,
    pub seed: u64,
    pub trace: bool,
}

impl RunSettings {
    pub fn new(max_evaluations: u64, seed: u64) -> Self {
        Self {
            max_evaluations,
            scatter_count: crate::search::DEFAULT_SCATTER_COUNT,
            seed,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescentConfig {
    /// Initial step is the variable's range divided by this, in grid units.
    pub step_divisor: i64,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self { step_divisor: 16 }
    }
}

/// Per-variable step sizes in grid units. The minimum is one unit, i.e. one
/// resolution step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepState {
    pub steps: Vec<i64>,
}

impl StepState {
    pub fn initial(space: &GridSpace, config: &DescentConfig) -> Self {
        let div = config.step_divisor.max(1);
        Self {
            steps: (0..space.dim())
                .map(|i| (space.range(i) / div).max(1))
                .collect(),
        }
    }

    pub fn minimum(dim: usize) -> Self {
        Self {
            steps: vec![1; dim],
        }
    }

    pub fn at_minimum(&self) -> bool {
        self.steps.iter().all(|&s| s == 1)
    }

    pub fn halve(&mut self) {
        for s in &mut self.steps {
            *s = (*s / 2).max(1);
        }
    }
}

/// The ± step perturbation of every variable, clipped to bounds. Candidates
/// that clip back onto `point` are dropped. Order is `+` then `−` per
/// variable, in variable order.
pub fn propose_neighbors(
    space: &GridSpace,
    point: &GridPoint,
    steps: &StepState,
) -> Vec<GridPoint> {
    let mut out = Vec::with_capacity(2 * space.dim());
    for i in 0..space.dim() {
        for dir in [1, -1] {
            let u = space.clip(i, point[i] + dir * steps.steps[i]);
            if u != point[i] {
                let mut q = point.clone();
                q.0[i] = u;
                out.push(q);
            }
        }
    }
    out
}

/// Outcome of evaluating one neighborhood.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// Every evaluated candidate, in proposal order.
    pub evaluated: Vec<(GridPoint, Assessment)>,
    /// Index into `evaluated` of the best feasible candidate that improves on
    /// the incumbent.
    pub improving: Option<usize>,
    pub budget_exhausted: bool,
}

/// Evaluates the neighborhood of `incumbent`, skipping candidates rejected by
/// `allowed`. Stops early when the budget runs out.
pub fn sweep<O, F>(
    evaluator: &mut Evaluator<'_, O>,
    incumbent: &GridPoint,
    incumbent_objective: f64,
    steps: &StepState,
    allowed: F,
) -> Sweep
where
    O: Objective + ?Sized,
    F: Fn(&GridPoint) -> bool,
{
    let mut evaluated = Vec::new();
    let mut improving: Option<usize> = None;
    let mut best = incumbent_objective;
    let mut budget_exhausted = false;
    for q in propose_neighbors(evaluator.space(), incumbent, steps) {
        if !allowed(&q) {
            continue;
        }
        let Ok(a) = evaluator.evaluate(&q) else {
            budget_exhausted = true;
            break;
        };
        if a.feasible() && a.objective < best {
            best = a.objective;
            improving = Some(evaluated.len());
        }
        evaluated.push((q, a));
    }
    Sweep {
        evaluated,
        improving,
        budget_exhausted,
    }
}

/// Result of a descent from a given start.
#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    pub point: GridPoint,
    pub assessment: Assessment,
    /// Evaluation index at which `point` was reached.
    pub reached_at: u64,
    /// Incumbents and their objectives in order, starting with the start
    /// point.
    pub path: Vec<(GridPoint, f64)>,
    /// The last (failed) sweep at minimum step, when the descent converged.
    pub final_sweep: Option<Sweep>,
    pub budget_exhausted: bool,
}

/// Steepest descent from a feasible start: move to the best feasible
/// improving neighbor; on failure halve every step; stop when a sweep at the
/// minimum step fails or the budget runs out.
pub fn descend_from<O, F>(
    evaluator: &mut Evaluator<'_, O>,
    start: GridPoint,
    start_assessment: Assessment,
    mut steps: StepState,
    allowed: F,
) -> Result<Descent, SearchError>
where
    O: Objective + ?Sized,
    F: Fn(&GridPoint) -> bool,
{
    if !start_assessment.feasible() {
        return Err(SearchError::InvalidConfig(
            "descent must start from a feasible design".into(),
        ));
    }
    let mut point = start;
    let mut assessment = start_assessment;
    let mut reached_at = evaluator.used();
    let mut path = vec![(point.clone(), assessment.objective)];
    loop {
        let s = sweep(evaluator, &point, assessment.objective, &steps, &allowed);
        if let Some(i) = s.improving {
            let (p, a) = s.evaluated[i].clone();
            point = p;
            assessment = a;
            reached_at = evaluator.used() - (s.evaluated.len() - 1 - i) as u64;
            path.push((point.clone(), assessment.objective));
            if s.budget_exhausted {
                return Ok(Descent {
                    point,
                    assessment,
                    reached_at,
                    path,
                    final_sweep: None,
                    budget_exhausted: true,
                });
            }
            continue;
        }
        if s.budget_exhausted {
            return Ok(Descent {
                point,
                assessment,
                reached_at,
                path,
                final_sweep: None,
                budget_exhausted: true,
            });
        }
        if steps.at_minimum() {
            return Ok(Descent {
                point,
                assessment,
                reached_at,
                path,
                final_sweep: Some(s),
                budget_exhausted: false,
            });
        }
        steps.halve();
    }
}

/// Descent from a known feasible start with the initial step state of
/// `config`. The outcome is the best feasible design the evaluator has seen.
pub fn descend<O: Objective + ?Sized>(
    evaluator: &mut Evaluator<'_, O>,
    start: GridPoint,
    start_assessment: Assessment,
    config: &DescentConfig,
) -> Result<SearchOutcome, SearchError> {
    let steps = StepState::initial(evaluator.space(), config);
    let d = descend_from(evaluator, start, start_assessment, steps, |_| true)?;
    Ok(evaluator
        .outcome(d.budget_exhausted)
        .expect("a feasible start was evaluated"))
}

/// A full steepest-descent run: scatter start, then descent.
pub fn steepest_descent<O, R>(
    objective: &O,
    settings: &RunSettings,
    config: &DescentConfig,
    rng: &mut R,
) -> Result<SearchOutcome, SearchError>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let mut ev = Evaluator::new(objective, settings.max_evaluations).with_trace(settings.trace);
    let (start, a) = scatter_init(&mut ev, settings.scatter_count, rng, settings.seed)?;
    descend(&mut ev, start, a, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::QuadraticBowl;

    #[test]
    fn neighbor_counts() {
        let space = GridSpace::uniform(16, 1.0, -100.0, 100.0);
        let p = GridPoint(vec![0; 16]);
        assert_eq!(
            propose_neighbors(&space, &p, &StepState::minimum(16)).len(),
            32
        );
        let mut q = p.clone();
        q.0[3] = 100;
        assert_eq!(
            propose_neighbors(&space, &q, &StepState::minimum(16)).len(),
            31
        );
        for n in propose_neighbors(&space, &p, &StepState::minimum(16)) {
            let diff: i64 = n.0.iter().zip(&p.0).map(|(a, b)| (a - b).abs()).sum();
            assert_eq!(diff, 1);
        }
    }

    #[test]
    fn local_optimum_is_a_fixed_point() {
        let bowl = QuadraticBowl::new(vec![2.0, -3.0], 1.0, -10.0, 10.0);
        let start = GridPoint(vec![2, -3]);
        let mut ev = Evaluator::new(&bowl, 1000);
        let a = ev.evaluate(&start).unwrap();
        let out = descend(&mut ev, start.clone(), a, &DescentConfig::default()).unwrap();
        assert_eq!(out.best, start);
        assert_eq!(out.evaluations_to_best, 1);
    }

    #[test]
    fn infeasible_start_rejected() {
        let bowl = QuadraticBowl::new(vec![0.0], 1.0, -10.0, 10.0).with_limit(-20.0);
        let mut ev = Evaluator::new(&bowl, 10);
        let p = GridPoint(vec![0]);
        let a = ev.evaluate(&p).unwrap();
        assert!(descend(&mut ev, p, a, &DescentConfig::default()).is_err());
    }

    #[test]
    fn budget_stops_mid_sweep() {
        let bowl = QuadraticBowl::new(vec![50.0; 4], 1.0, -100.0, 100.0);
        let mut ev = Evaluator::new(&bowl, 5);
        let p = GridPoint(vec![0; 4]);
        let a = ev.evaluate(&p).unwrap();
        let out = descend(&mut ev, p, a, &DescentConfig::default()).unwrap();
        assert!(out.budget_exhausted);
        assert_eq!(out.evaluations_used, 5);
        assert!(out.best_assessment.objective < a.objective);
    }
}
