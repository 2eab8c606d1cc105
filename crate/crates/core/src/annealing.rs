//! Simulated annealing with soft constraints: Metropolis acceptance, a
//! temperature steered toward a target acceptance curve, quality-weighted
//! move selection and penalty weights that tighten over the run.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::descent::RunSettings;
use crate::error::SearchError;
use crate::search::{
    Assessment, AxisKind, Evaluator, GridPoint, GridSpace, Objective, SearchOutcome,
};
use crate::truss::FamilyTotals;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealConfig {
    /// Total evaluations per run, scatter included.
    pub evaluations_total: u64,
    /// Starting temperature as a fraction of the start's penalized cost.
    pub initial_temperature_ratio: f64,
    /// Smoothing factor of the acceptance-ratio estimate.
    pub acceptance_smoothing: f64,
    /// Log-temperature change per unit of acceptance-ratio error.
    pub temperature_gain: f64,
    pub schedule: LamSchedule,
    pub moves: MoveConfig,
    pub weights: WeightConfig,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            evaluations_total: 34_000,
            initial_temperature_ratio: 0.1,
            acceptance_smoothing: 0.01,
            temperature_gain: 0.05,
            schedule: LamSchedule::default(),
            moves: MoveConfig::default(),
            weights: WeightConfig::default(),
        }
    }
}

/// Cost seen by the annealer: objective plus weighted violation.
pub fn penalized_cost(a: &Assessment, weights: &ConstraintWeights) -> f64 {
    if a.singular {
        return f64::INFINITY;
    }
    let v = a.violation.as_array();
    a.objective + (0..3).map(|k| weights.w[k] * v[k]).sum::<f64>()
}

pub fn metropolis_accept<R: Rng + ?Sized>(delta_cost: f64, temperature: f64, rng: &mut R) -> bool {
    if delta_cost <= 0.0 {
        return true;
    }
    if !delta_cost.is_finite() {
        return false;
    }
    rng.gen::<f64>() < (-delta_cost / temperature).exp()
}

/// Target acceptance-ratio curve: from 1 down to the plateau over the warm-up
/// fraction, flat until `hold_end`, then decaying toward 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LamSchedule {
    pub plateau: f64,
    pub warmup_end: f64,
    pub hold_end: f64,
}

impl Default for LamSchedule {
    fn default() -> Self {
        Self {
            plateau: 0.44,
            warmup_end: 0.15,
            hold_end: 0.65,
        }
    }
}

impl LamSchedule {
    /// Target ratio at budget fraction `f`.
    pub fn target(&self, f: f64) -> f64 {
        if f < self.warmup_end {
            self.plateau + (1.0 - self.plateau) * 560f64.powf(-f / self.warmup_end)
        } else if f < self.hold_end {
            self.plateau
        } else {
            self.plateau * 440f64.powf(-(f - self.hold_end) / (1.0 - self.hold_end))
        }
    }
}

/// Temperature controller state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealState {
    pub temperature: f64,
    pub acceptance_estimate: f64,
    pub evaluations_done: u64,
    pub evaluations_total: u64,
}

impl AnnealState {
    pub fn fraction(&self) -> f64 {
        if self.evaluations_total == 0 {
            1.0
        } else {
            (self.evaluations_done as f64 / self.evaluations_total as f64).min(1.0)
        }
    }
}

/// Folds one accept/reject outcome into the estimate and moves the
/// temperature toward the target curve. Returns the new temperature.
pub fn schedule_update(
    state: &mut AnnealState,
    accepted: bool,
    schedule: &LamSchedule,
    smoothing: f64,
    gain: f64,
) -> f64 {
    let x = if accepted { 1.0 } else { 0.0 };
    state.acceptance_estimate += smoothing * (x - state.acceptance_estimate);
    let target = schedule.target(state.fraction());
    state.temperature *= (gain * (target - state.acceptance_estimate)).exp();
    state.temperature = state.temperature.clamp(1e-12, 1e12);
    state.temperature
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoveConfig {
    pub large_coordinate_step: i64,
    pub large_area_step: i64,
    pub probability_floor: f64,
    /// Evaluations between renormalizations.
    pub period: u64,
    /// Weight of past quality carried into each renormalization.
    pub quality_memory: f64,
}

impl Default for MoveConfig {
    fn default() -> Self {
        Self {
            large_coordinate_step: 16,
            large_area_step: 100,
            probability_floor: 0.01,
            period: 100,
            quality_memory: 0.5,
        }
    }
}

/// A move type: one variable, one magnitude. Direction is drawn per move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveType {
    pub variable: usize,
    pub large: bool,
    /// Magnitude in grid units.
    pub units: i64,
}

/// Move types with their quality scores and selection probabilities.
#[derive(Debug, Clone)]
pub struct MoveTable {
    pub moves: Vec<MoveType>,
    /// Smoothed quality used at the last renormalization.
    pub quality: Vec<f64>,
    /// Credit accumulated since the last renormalization.
    pub credit: Vec<f64>,
    pub probabilities: Vec<f64>,
    floor: f64,
    memory: f64,
    sampler: WeightedIndex<f64>,
}

impl MoveTable {
    pub fn new(space: &GridSpace, config: &MoveConfig) -> Self {
        let moves: Vec<MoveType> = (0..space.dim())
            .flat_map(|i| {
                let large = match space.kinds[i] {
                    AxisKind::Coordinate => config.large_coordinate_step,
                    AxisKind::Area => config.large_area_step,
                };
                [
                    MoveType {
                        variable: i,
                        large: false,
                        units: 1,
                    },
                    MoveType {
                        variable: i,
                        large: true,
                        units: large,
                    },
                ]
            })
            .collect();
        let n = moves.len();
        let probabilities = vec![1.0 / n as f64; n];
        Self {
            sampler: WeightedIndex::new(&probabilities).expect("non-empty"),
            moves,
            quality: vec![0.0; n],
            credit: vec![0.0; n],
            probabilities,
            floor: config.probability_floor.min(1.0 / n as f64),
            memory: config.quality_memory,
        }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Folds the period's credit into the smoothed quality and recomputes
    /// probabilities: `p = floor + (1 − n·floor)·q / Σq`, uniform if `Σq = 0`.
    pub fn renormalize(&mut self) {
        for (q, c) in self.quality.iter_mut().zip(&mut self.credit) {
            *q = self.memory * *q + *c;
            *c = 0.0;
        }
        let n = self.moves.len() as f64;
        let total: f64 = self.quality.iter().sum();
        for (p, q) in self.probabilities.iter_mut().zip(&self.quality) {
            *p = if total > 0.0 {
                self.floor + (1.0 - n * self.floor) * q / total
            } else {
                1.0 / n
            };
        }
        self.sampler = WeightedIndex::new(&self.probabilities).expect("positive weights");
    }
}

pub fn select_move<R: Rng + ?Sized>(table: &MoveTable, rng: &mut R) -> usize {
    table.sampler.sample(rng)
}

/// Accepted moves earn their absolute cost change; rejected moves earn
/// nothing.
pub fn update_quality(table: &mut MoveTable, mv: usize, delta_cost: f64, accepted: bool) {
    if accepted && delta_cost.is_finite() {
        table.credit[mv] += delta_cost.abs();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    pub initial: f64,
    pub growth: f64,
    /// Initial allowance as a multiple of the scatter's mean violation.
    pub allowance_scale: f64,
    /// Evaluations between weight updates.
    pub period: u64,
}

impl Default for WeightConfig {
    fn default() -> Self {
        Self {
            initial: 1.0,
            growth: 1.5,
            allowance_scale: 1.0,
            period: 100,
        }
    }
}

/// Penalty weight per constraint family (stress, buckling, length), in cost
/// per unit violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintWeights {
    pub w: [f64; 3],
    /// Violation allowed at the start of the run, per family.
    pub initial_allowance: [f64; 3],
    pub growth: f64,
}

impl ConstraintWeights {
    pub fn new(initial: f64, growth: f64, initial_allowance: [f64; 3]) -> Self {
        Self {
            w: [initial; 3],
            initial_allowance,
            growth,
        }
    }

    pub fn allowance(&self, budget_fraction: f64) -> [f64; 3] {
        let s = (1.0 - budget_fraction).clamp(0.0, 1.0);
        self.initial_allowance.map(|a| a * s)
    }
}

/// Raises the weight of every family whose recent mean violation exceeds
/// its allowance, which shrinks linearly to zero over the run.
pub fn weight_update(
    weights: &ConstraintWeights,
    mean_violation: [f64; 3],
    budget_fraction: f64,
) -> ConstraintWeights {
    let allow = weights.allowance(budget_fraction);
    let mut out = *weights;
    for k in 0..3 {
        if mean_violation[k] > 0.0 && mean_violation[k] > allow[k] {
            out.w[k] *= weights.growth;
        }
    }
    out
}

/// Run statistics beyond the search outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealStats {
    pub proposals: u64,
    pub accepted: u64,
    /// Raw acceptance ratio over the plateau of the target curve.
    pub plateau_acceptance: f64,
    pub final_temperature: f64,
    pub final_weights: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealRun {
    /// Best feasible design if any, else the least-violating design seen.
    pub outcome: SearchOutcome,
    /// Design with the lowest penalized cost seen (under the weights in force
    /// when it was seen).
    pub best_penalized: (GridPoint, Assessment),
    pub stats: AnnealStats,
}

fn perturb<R: Rng + ?Sized>(
    space: &GridSpace,
    p: &GridPoint,
    mv: &MoveType,
    rng: &mut R,
) -> GridPoint {
    let i = mv.variable;
    let dir = if rng.gen::<bool>() { 1 } else { -1 };
    let mut u = space.clip(i, p[i] + dir * mv.units);
    if u == p[i] {
        u = space.clip(i, p[i] - dir * mv.units);
    }
    let mut q = p.clone();
    q.0[i] = u;
    q
}

/// Anneals from `start` until the evaluator's budget is spent. The budget
/// fraction that drives the schedule counts evaluations already spent, so a
/// scatter run on the same evaluator shifts the curve accordingly.
pub fn anneal_from<O, R>(
    ev: &mut Evaluator<'_, O>,
    start: GridPoint,
    start_assessment: Assessment,
    initial_allowance: [f64; 3],
    config: &AnnealConfig,
    rng: &mut R,
) -> AnnealRun
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let space = ev.space().clone();
    let mut weights = ConstraintWeights::new(
        config.weights.initial,
        config.weights.growth,
        initial_allowance.map(|a| a * config.weights.allowance_scale),
    );
    let mut table = MoveTable::new(&space, &config.moves);
    let mut current = start;
    let mut current_a = start_assessment;
    let start_cost = penalized_cost(&current_a, &weights);
    let mut state = AnnealState {
        temperature: (config.initial_temperature_ratio * start_cost.abs()).max(1e-9),
        acceptance_estimate: 1.0,
        evaluations_done: ev.used(),
        evaluations_total: ev.budget().max_evaluations,
    };
    if !state.temperature.is_finite() {
        state.temperature = 1.0;
    }
    let mut best_pen = (current.clone(), current_a);
    let mut least_violating = (current.clone(), current_a, ev.used());
    let mut period_violation = [0.0; 3];
    let mut period_count = 0u64;
    let (mut proposals, mut accepted_total) = (0u64, 0u64);
    let (mut plateau_prop, mut plateau_acc) = (0u64, 0u64);

    while !ev.exhausted() {
        let mv = select_move(&table, rng);
        let cand = perturb(&space, &current, &table.moves[mv], rng);
        let Ok(a) = ev.evaluate(&cand) else { break };
        state.evaluations_done = ev.used();
        let delta = penalized_cost(&a, &weights) - penalized_cost(&current_a, &weights);
        let accepted = metropolis_accept(delta, state.temperature, rng);
        update_quality(&mut table, mv, delta, accepted);
        let f = state.fraction();
        proposals += 1;
        if (config.schedule.warmup_end..config.schedule.hold_end).contains(&f) {
            plateau_prop += 1;
            plateau_acc += accepted as u64;
        }
        if accepted {
            accepted_total += 1;
            current = cand;
            current_a = a;
            if penalized_cost(&current_a, &weights) < penalized_cost(&best_pen.1, &weights) {
                best_pen = (current.clone(), current_a);
            }
            let key = |x: &Assessment| (x.violation.sum(), x.objective);
            if !current_a.singular
                && key(&current_a).partial_cmp(&key(&least_violating.1))
                    == Some(std::cmp::Ordering::Less)
            {
                least_violating = (current.clone(), current_a, ev.used());
            }
        }
        schedule_update(
            &mut state,
            accepted,
            &config.schedule,
            config.acceptance_smoothing,
            config.temperature_gain,
        );

        let v = current_a.violation.as_array();
        for k in 0..3 {
            period_violation[k] += v[k];
        }
        period_count += 1;
        if config.weights.period > 0 && period_count >= config.weights.period {
            let mean = period_violation.map(|s| s / period_count as f64);
            weights = weight_update(&weights, mean, f);
            period_violation = [0.0; 3];
            period_count = 0;
        }
        if config.moves.period > 0 && proposals % config.moves.period == 0 {
            table.renormalize();
        }
    }

    let exhausted = ev.exhausted();
    let outcome = ev.outcome(exhausted).unwrap_or_else(|| SearchOutcome {
        best: least_violating.0.clone(),
        best_assessment: least_violating.1,
        evaluations_used: ev.used(),
        evaluations_to_best: least_violating.2,
        budget_exhausted: exhausted,
        trace: ev.take_trace(),
    });
    AnnealRun {
        outcome,
        best_penalized: best_pen,
        stats: AnnealStats {
            proposals,
            accepted: accepted_total,
            plateau_acceptance: if plateau_prop > 0 {
                plateau_acc as f64 / plateau_prop as f64
            } else {
                f64::NAN
            },
            final_temperature: state.temperature,
            final_weights: weights.w,
        },
    }
}

/// A full annealing run: an infeasible-tolerant scatter start followed by
/// annealing, `config.evaluations_total` evaluations in all.
pub fn simulated_annealing<O, R>(
    objective: &O,
    settings: &RunSettings,
    config: &AnnealConfig,
    rng: &mut R,
) -> Result<AnnealRun, SearchError>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let mut ev = Evaluator::new(objective, config.evaluations_total).with_trace(settings.trace);
    let count = settings
        .scatter_count
        .min(config.evaluations_total as usize);
    let mut samples = Vec::with_capacity(count);
    let (start, start_a) = {
        // Scatter, keeping the sample violations to scale the allowance.
        let mut best: Option<(GridPoint, Assessment)> = None;
        let key = |a: &Assessment| (!a.feasible(), a.violation.sum(), a.objective);
        for _ in 0..count {
            let p = crate::search::sample_point(ev.space(), rng);
            let a = ev.evaluate(&p)?;
            if a.singular {
                continue;
            }
            samples.push(a.violation);
            if best
                .as_ref()
                .is_none_or(|(_, b)| key(&a).partial_cmp(&key(b)) == Some(std::cmp::Ordering::Less))
            {
                best = Some((p, a));
            }
        }
        best.ok_or(SearchError::ScatterFailed {
            count,
            seed: settings.seed,
        })?
    };
    let allowance = mean_violation(&samples);
    Ok(anneal_from(&mut ev, start, start_a, allowance, config, rng))
}

fn mean_violation(samples: &[FamilyTotals]) -> [f64; 3] {
    if samples.is_empty() {
        return [0.0; 3];
    }
    let mut m = [0.0; 3];
    for s in samples {
        for (k, v) in s.as_array().iter().enumerate() {
            m[k] += v;
        }
    }
    m.map(|x| x / samples.len() as f64)
}
