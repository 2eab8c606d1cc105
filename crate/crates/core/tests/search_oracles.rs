use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tenbar_core::annealing::{simulated_annealing, AnnealConfig};
use tenbar_core::descent::{descend_from, steepest_descent, DescentConfig, RunSettings, StepState};
use tenbar_core::search::{scatter_init, Evaluator, GridPoint, Objective, QuadraticBowl};
use tenbar_core::tabu::{tabu_search, tabu_search_recorded, TabuConfig, TabuStepKind};

/// Exhaustive minimum of a bowl over its feasible grid points.
fn brute_force(bowl: &QuadraticBowl) -> (GridPoint, f64) {
    let space = bowl.space();
    let mut best: Option<(GridPoint, f64)> = None;
    let mut idx = space.lo.clone();
    loop {
        let p = GridPoint(idx.clone());
        let a = bowl.assess(&p);
        if a.feasible() && best.as_ref().is_none_or(|(_, b)| a.objective < *b) {
            best = Some((p, a.objective));
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return best.expect("some feasible point");
            }
            if idx[k] < space.hi[k] {
                idx[k] += 1;
                break;
            }
            idx[k] = space.lo[k];
            k += 1;
        }
    }
}

fn bowl() -> QuadraticBowl {
    QuadraticBowl::new(vec![1.3, -2.7, 0.4], 0.5, -6.0, 6.0)
}

/// Optimum sits on the constraint face off the coordinate directions.
fn constrained_bowl() -> QuadraticBowl {
    QuadraticBowl::new(vec![3.0, 3.0, 3.0], 1.0, -6.0, 6.0).with_limit(3.0)
}

#[test]
fn descent_reaches_the_unconstrained_grid_minimum() {
    let b = bowl();
    let (opt, v) = brute_force(&b);
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let out = steepest_descent(
            &b,
            &RunSettings::new(10_000, seed),
            &DescentConfig::default(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(out.best, opt, "seed {seed}");
        assert!((out.best_assessment.objective - v).abs() < 1e-12);
        assert!(!out.budget_exhausted);
    }
}

#[test]
fn tabu_and_annealing_find_the_constrained_grid_minimum() {
    let b = constrained_bowl();
    let (_, v) = brute_force(&b);
    assert_eq!(v, 12.0);
    for seed in 0..5 {
        let settings = RunSettings::new(4000, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ts = tabu_search(
            &b,
            &settings,
            &TabuConfig::for_dimension(3),
            &DescentConfig::default(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(ts.best_assessment.objective, v, "tabu seed {seed}");

        let cfg = AnnealConfig {
            evaluations_total: 8000,
            ..AnnealConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sa = simulated_annealing(&b, &RunSettings::new(8000, seed), &cfg, &mut rng).unwrap();
        assert!(sa.outcome.best_assessment.feasible());
        assert_eq!(
            sa.outcome.best_assessment.objective, v,
            "annealing seed {seed}"
        );
    }
}

#[test]
fn tabu_never_does_worse_than_its_first_descent() {
    let b = constrained_bowl();
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sd = steepest_descent(
            &b,
            &RunSettings::new(4000, seed),
            &DescentConfig::default(),
            &mut rng,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ts = tabu_search(
            &b,
            &RunSettings::new(4000, seed),
            &TabuConfig::for_dimension(3),
            &DescentConfig::default(),
            &mut rng,
        )
        .unwrap();
        assert!(ts.best_assessment.objective <= sd.best_assessment.objective);
    }
}

#[test]
fn memoryless_tabu_first_cycle_is_plain_descent() {
    let b = constrained_bowl();
    let off = TabuConfig {
        stm_capacity: 0,
        itm_capacity: 0,
        stall_before_intensify: 0,
        stall_before_diversify: 0,
        diversify_scatter_count: 0,
    };
    for seed in 0..10 {
        let settings = RunSettings::new(3000, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let run = tabu_search_recorded(
            &b,
            &settings,
            &off,
            &DescentConfig::default(),
            &mut rng,
            true,
        )
        .unwrap();
        let h = run.history.unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ev = Evaluator::new(&b, 3000);
        let (start, a) = scatter_init(&mut ev, settings.scatter_count, &mut rng, seed).unwrap();
        let steps = StepState::initial(ev.space(), &DescentConfig::default());
        let d = descend_from(&mut ev, start.clone(), a, steps, |_| true).unwrap();

        assert_eq!(h[0].point, start);
        let first_cycle: Vec<&GridPoint> = h[1..]
            .iter()
            .take_while(|s| s.kind == TabuStepKind::Descent)
            .map(|s| &s.point)
            .collect();
        let expected: Vec<&GridPoint> = d.path[1..].iter().map(|(p, _)| p).collect();
        assert_eq!(first_cycle, expected, "seed {seed}");
    }
}

#[test]
fn every_algorithm_is_deterministic_per_seed() {
    let b = constrained_bowl();
    let settings = RunSettings::new(2000, 7);
    let run_all = || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sd = steepest_descent(&b, &settings, &DescentConfig::default(), &mut rng).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ts = tabu_search(
            &b,
            &settings,
            &TabuConfig::for_dimension(3),
            &DescentConfig::default(),
            &mut rng,
        )
        .unwrap();
        let cfg = AnnealConfig {
            evaluations_total: 2000,
            ..AnnealConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sa = simulated_annealing(&b, &settings, &cfg, &mut rng).unwrap();
        (sd, ts, sa.outcome, sa.stats)
    };
    assert_eq!(run_all(), run_all());
}
