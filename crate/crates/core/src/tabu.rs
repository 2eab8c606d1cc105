//! Tabu search around the descent engine: a recency list forbids revisits,
//! a best-solution list drives intensification, and random scatter drives
//! diversification.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::descent::{descend_from, DescentConfig, RunSettings, StepState};
use crate::error::SearchError;
use crate::search::{
    scatter_init, Assessment, Evaluator, GridPoint, GridSpace, Objective, SearchOutcome,
};

/// Centroid size used by intensification.
pub const CENTROID_TOP_K: usize = 5;

/// Fixed-capacity FIFO of recently visited designs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortTermMemory {
    entries: VecDeque<GridPoint>,
    capacity: usize,
}

impl ShortTermMemory {
    pub fn new(capacity: usize) -> Self {
        Self {
            entries: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends, evicting the oldest entry when full.
    pub fn push(&mut self, p: GridPoint) {
        if self.capacity == 0 {
            return;
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(p);
    }

    pub fn contains(&self, p: &GridPoint) -> bool {
        self.entries.iter().any(|e| e == p)
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &GridPoint> {
        self.entries.iter()
    }
}

pub fn is_tabu(memory: &ShortTermMemory, design: &GridPoint) -> bool {
    memory.contains(design)
}

/// Best designs found, ascending by objective, without duplicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntermediateMemory {
    entries: Vec<(GridPoint, f64)>,
    capacity: usize,
}

impl IntermediateMemory {
    pub fn new(capacity: usize) -> Self {
        Self {
            entries: Vec::with_capacity(capacity + 1),
            capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() >= self.capacity
    }

    pub fn entries(&self) -> &[(GridPoint, f64)] {
        &self.entries
    }

    pub fn worst(&self) -> Option<f64> {
        self.entries.last().map(|e| e.1)
    }

    /// Would `objective` earn a place?
    pub fn admits(&self, objective: f64) -> bool {
        self.capacity > 0 && (!self.is_full() || self.worst().is_some_and(|w| objective < w))
    }

    /// Inserts in order; returns whether the entry was kept.
    pub fn insert(&mut self, p: GridPoint, objective: f64) -> bool {
        if !self.admits(objective) || self.entries.iter().any(|(e, _)| *e == p) {
            return false;
        }
        let at = self.entries.partition_point(|e| e.1 <= objective);
        self.entries.insert(at, (p, objective));
        self.entries.truncate(self.capacity);
        true
    }
}

/// The five tabu tunables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TabuConfig {
    pub stm_capacity: usize,
    pub itm_capacity: usize,
    /// Non-improving cycles before intensifying; 0 disables.
    pub stall_before_intensify: usize,
    /// Non-improving cycles before diversifying; 0 disables.
    pub stall_before_diversify: usize,
    pub diversify_scatter_count: usize,
}

impl TabuConfig {
    /// Defaults scaled by the number of design variables.
    pub fn for_dimension(n: usize) -> Self {
        Self {
            stm_capacity: 2 * n,
            itm_capacity: n,
            stall_before_intensify: n,
            stall_before_diversify: 3 * n,
            diversify_scatter_count: 3 * n,
        }
    }
}

impl Default for TabuConfig {
    fn default() -> Self {
        Self::for_dimension(16)
    }
}

/// Best feasible candidate not in the recency list, regardless of whether it
/// improves. `None` means the neighborhood is exhausted.
pub fn select_tabu_move<'a>(
    candidates: &'a [(GridPoint, Assessment)],
    stm: &ShortTermMemory,
) -> Option<&'a (GridPoint, Assessment)> {
    candidates
        .iter()
        .filter(|(p, a)| a.feasible() && !stm.contains(p))
        .fold(
            None,
            |best: Option<&(GridPoint, Assessment)>, c| match best {
                Some(b) if b.1.objective <= c.1.objective => Some(b),
                _ => Some(c),
            },
        )
}

/// Forced move out of a local optimum: evaluates the minimum-step
/// neighborhood of `incumbent` (skipping tabu designs), pushes the incumbent
/// into the recency list and returns the best feasible non-tabu neighbor.
pub fn tabu_move<O: Objective + ?Sized>(
    evaluator: &mut Evaluator<'_, O>,
    incumbent: &GridPoint,
    stm: &mut ShortTermMemory,
) -> Result<Option<(GridPoint, Assessment)>, SearchError> {
    let steps = StepState::minimum(evaluator.space().dim());
    let mut evaluated = Vec::new();
    for q in crate::descent::propose_neighbors(evaluator.space(), incumbent, &steps) {
        if stm.contains(&q) {
            continue;
        }
        let a = evaluator.evaluate(&q)?;
        evaluated.push((q, a));
    }
    stm.push(incumbent.clone());
    Ok(select_tabu_move(&evaluated, stm).cloned())
}

/// Trend extension of the two best entries, then the centroid of the top
/// `min(5, len)` entries. Empty with fewer than two entries.
pub fn intensify(space: &GridSpace, itm: &IntermediateMemory) -> Vec<GridPoint> {
    let e = itm.entries();
    if e.len() < 2 {
        return Vec::new();
    }
    let (best, second) = (&e[0].0, &e[1].0);
    let trend = GridPoint(
        (0..space.dim())
            .map(|i| space.clip(i, 2 * best[i] - second[i]))
            .collect(),
    );
    let k = CENTROID_TOP_K.min(e.len());
    let centroid: Vec<f64> = (0..space.dim())
        .map(|i| {
            let mean = e[..k].iter().map(|(p, _)| p[i] as f64).sum::<f64>() / k as f64;
            mean * space.resolution[i]
        })
        .collect();
    let centroid = space.snap(&centroid);
    let mut out = vec![trend];
    if centroid != out[0] {
        out.push(centroid);
    }
    out
}

/// Random refresh: best feasible point of a fresh scatter. The recency list
/// is cleared.
pub fn diversify<O, R>(
    evaluator: &mut Evaluator<'_, O>,
    stm: &mut ShortTermMemory,
    rng: &mut R,
    count: usize,
    seed: u64,
) -> Result<(GridPoint, Assessment), SearchError>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    stm.clear();
    scatter_init(evaluator, count, rng, seed)
}

/// How an incumbent was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TabuStepKind {
    Start,
    Descent,
    TabuMove,
    Intensify,
    Diversify,
}

/// One accepted incumbent and the recency list at the moment it was
/// accepted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabuStep {
    pub kind: TabuStepKind,
    pub point: GridPoint,
    pub objective: f64,
    pub tabu_list: Vec<GridPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabuRun {
    pub outcome: SearchOutcome,
    /// Recorded only when requested.
    pub history: Option<Vec<TabuStep>>,
}

struct History(Option<Vec<TabuStep>>);

impl History {
    fn record(&mut self, kind: TabuStepKind, p: &GridPoint, objective: f64, stm: &ShortTermMemory) {
        if let Some(h) = self.0.as_mut() {
            h.push(TabuStep {
                kind,
                point: p.clone(),
                objective,
                tabu_list: stm.iter().cloned().collect(),
            });
        }
    }
}

/// Budget-terminated tabu search. Each cycle descends to a local optimum
/// without entering tabu designs, records it, then either intensifies,
/// diversifies or makes a forced tabu move depending on how many cycles have
/// passed without improving the best design.
pub fn tabu_search<O, R>(
    objective: &O,
    settings: &RunSettings,
    config: &TabuConfig,
    descent: &DescentConfig,
    rng: &mut R,
) -> Result<SearchOutcome, SearchError>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    tabu_search_recorded(objective, settings, config, descent, rng, false).map(|r| r.outcome)
}

pub fn tabu_search_recorded<O, R>(
    objective: &O,
    settings: &RunSettings,
    config: &TabuConfig,
    descent: &DescentConfig,
    rng: &mut R,
    record: bool,
) -> Result<TabuRun, SearchError>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let mut ev = Evaluator::new(objective, settings.max_evaluations).with_trace(settings.trace);
    let (mut current, mut current_a) =
        scatter_init(&mut ev, settings.scatter_count, rng, settings.seed)?;
    let mut stm = ShortTermMemory::new(config.stm_capacity);
    let mut itm = IntermediateMemory::new(config.itm_capacity);
    let mut history = History(record.then(Vec::new));
    history.record(TabuStepKind::Start, &current, current_a.objective, &stm);

    let mut best = current_a.objective;
    let mut stall = 0usize;
    let mut local = false;
    let fires = |threshold: usize, stall: usize| {
        threshold > 0 && stall > 0 && stall.is_multiple_of(threshold)
    };

    while !ev.exhausted() {
        // A forced move stays local; fresh starts get the full initial steps.
        let steps = if local {
            StepState::minimum(ev.space().dim())
        } else {
            StepState::initial(ev.space(), descent)
        };
        let d = descend_from(&mut ev, current.clone(), current_a, steps, |q| {
            !stm.contains(q)
        })?;
        for (p, o) in &d.path[1..] {
            history.record(TabuStepKind::Descent, p, *o, &stm);
        }
        for (p, _) in &d.path[..d.path.len() - 1] {
            stm.push(p.clone());
        }
        current = d.point;
        current_a = d.assessment;
        if d.budget_exhausted {
            break;
        }
        itm.insert(current.clone(), current_a.objective);
        if current_a.objective < best {
            best = current_a.objective;
            stall = 0;
        } else {
            stall += 1;
        }

        let mut restart: Option<(GridPoint, Assessment, TabuStepKind)> = None;
        if fires(config.stall_before_diversify, stall) {
            match diversify(
                &mut ev,
                &mut stm,
                rng,
                config.diversify_scatter_count,
                settings.seed,
            ) {
                Ok((p, a)) => restart = Some((p, a, TabuStepKind::Diversify)),
                Err(SearchError::ScatterFailed { .. }) if !ev.exhausted() => {}
                Err(_) => break,
            }
        } else if fires(config.stall_before_intensify, stall) {
            restart =
                try_intensify(&mut ev, &itm, &stm)?.map(|(p, a)| (p, a, TabuStepKind::Intensify));
        }

        if restart.is_none() {
            let cands = d.final_sweep.map(|s| s.evaluated).unwrap_or_default();
            stm.push(current.clone());
            match select_tabu_move(&cands, &stm) {
                Some((p, a)) => restart = Some((p.clone(), *a, TabuStepKind::TabuMove)),
                None => {
                    // Exhausted neighborhood: escalate.
                    restart = try_intensify(&mut ev, &itm, &stm)?
                        .map(|(p, a)| (p, a, TabuStepKind::Intensify));
                    if restart.is_none() {
                        match diversify(
                            &mut ev,
                            &mut stm,
                            rng,
                            config.diversify_scatter_count.max(1),
                            settings.seed,
                        ) {
                            Ok((p, a)) => restart = Some((p, a, TabuStepKind::Diversify)),
                            Err(_) if ev.exhausted() => break,
                            Err(_) => {}
                        }
                    }
                }
            }
        }
        let (p, a, kind) = match restart {
            Some(r) => r,
            None => {
                // Nothing usable: restart from the best design seen.
                let (p, a, _) = ev.best_feasible().cloned().expect("start was feasible");
                stm.clear();
                (p, a, TabuStepKind::Diversify)
            }
        };
        history.record(kind, &p, a.objective, &stm);
        local = kind == TabuStepKind::TabuMove;
        current = p;
        current_a = a;
    }
    let exhausted = ev.exhausted();
    Ok(TabuRun {
        outcome: ev.outcome(exhausted).expect("start was feasible"),
        history: history.0,
    })
}

/// Evaluates intensification candidates; the lightest feasible non-tabu one
/// that would enter the best list seeds a restart.
fn try_intensify<O: Objective + ?Sized>(
    ev: &mut Evaluator<'_, O>,
    itm: &IntermediateMemory,
    stm: &ShortTermMemory,
) -> Result<Option<(GridPoint, Assessment)>, SearchError> {
    let mut chosen: Option<(GridPoint, Assessment)> = None;
    for c in intensify(ev.space(), itm) {
        if stm.contains(&c) || itm.entries().iter().any(|(p, _)| *p == c) {
            continue;
        }
        let Ok(a) = ev.evaluate(&c) else { break };
        if a.feasible()
            && itm.admits(a.objective)
            && chosen
                .as_ref()
                .is_none_or(|(_, b)| a.objective < b.objective)
        {
            chosen = Some((c, a));
        }
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gp(v: &[i64]) -> GridPoint {
        GridPoint(v.to_vec())
    }

    #[test]
    fn stm_fifo() {
        let mut m = ShortTermMemory::new(2);
        assert!(!is_tabu(&m, &gp(&[1])));
        m.push(gp(&[1]));
        assert!(is_tabu(&m, &gp(&[1])));
        m.push(gp(&[2]));
        m.push(gp(&[3]));
        assert!(!is_tabu(&m, &gp(&[1])));
        assert!(is_tabu(&m, &gp(&[2])));
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn itm_sorted_unique_bounded() {
        let mut m = IntermediateMemory::new(2);
        assert!(m.insert(gp(&[1]), 5.0));
        assert!(!m.insert(gp(&[1]), 5.0));
        assert!(m.insert(gp(&[2]), 3.0));
        assert!(!m.insert(gp(&[3]), 6.0));
        assert!(m.insert(gp(&[4]), 4.0));
        let objs: Vec<f64> = m.entries().iter().map(|e| e.1).collect();
        assert_eq!(objs, vec![3.0, 4.0]);
    }

    #[test]
    fn intensify_trend_and_centroid() {
        let space = GridSpace::uniform(1, 1.0, -100.0, 100.0);
        let mut m = IntermediateMemory::new(4);
        m.insert(gp(&[10]), 1.0);
        m.insert(gp(&[6]), 2.0);
        assert_eq!(intensify(&space, &m)[0], gp(&[14]));

        let mut m = IntermediateMemory::new(4);
        m.insert(gp(&[0]), 1.0);
        m.insert(gp(&[10]), 2.0);
        let c = intensify(&space, &m);
        assert_eq!(c, vec![gp(&[-10]), gp(&[5])]);

        let mut m = IntermediateMemory::new(4);
        m.insert(gp(&[0]), 1.0);
        assert!(intensify(&space, &m).is_empty());
    }

    #[test]
    fn tabu_move_selection() {
        let feasible = |o: f64| Assessment::unconstrained(o);
        let mut infeasible = Assessment::unconstrained(0.5);
        infeasible.violation.stress = 1.0;
        let stm = ShortTermMemory::new(4);
        let one = [(gp(&[1]), feasible(9.0)), (gp(&[2]), infeasible)];
        assert_eq!(select_tabu_move(&one, &stm).unwrap().0, gp(&[1]));
        let two = [(gp(&[1]), feasible(9.0)), (gp(&[2]), feasible(7.0))];
        assert_eq!(select_tabu_move(&two, &stm).unwrap().0, gp(&[2]));
        let mut stm = ShortTermMemory::new(4);
        stm.push(gp(&[1]));
        stm.push(gp(&[2]));
        assert!(select_tabu_move(&two, &stm).is_none());
    }

    #[test]
    fn default_config_from_dimension() {
        let c = TabuConfig::default();
        assert_eq!(
            (
                c.stm_capacity,
                c.itm_capacity,
                c.stall_before_intensify,
                c.stall_before_diversify,
                c.diversify_scatter_count
            ),
            (32, 16, 16, 48, 48)
        );
    }
}
