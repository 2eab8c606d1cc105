use rand::Rng;

use super::{Assessment, Evaluator, GridPoint, GridSpace, Objective};
use crate::error::SearchError;

/// Default number of scatter samples.
pub const DEFAULT_SCATTER_COUNT: usize = 50;

/// Uniform sample of the quantized bounds box.
pub fn sample_point<R: Rng + ?Sized>(space: &GridSpace, rng: &mut R) -> GridPoint {
    GridPoint(
        (0..space.dim())
            .map(|i| rng.gen_range(space.lo[i]..=space.hi[i]))
            .collect(),
    )
}

/// Evaluates `count` uniform samples and returns the feasible one of lowest
/// objective. Sampling stops early if the budget runs out. `seed` is only
/// used to label the error.
pub fn scatter_init<O, R>(
    evaluator: &mut Evaluator<'_, O>,
    count: usize,
    rng: &mut R,
    seed: u64,
) -> Result<(GridPoint, Assessment), SearchError>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    if count == 0 {
        return Err(SearchError::InvalidConfig(
            "scatter count must be at least 1".into(),
        ));
    }
    let mut best: Option<(GridPoint, Assessment)> = None;
    for _ in 0..count {
        let p = sample_point(evaluator.space(), rng);
        let Ok(a) = evaluator.evaluate(&p) else { break };
        if a.feasible() && best.as_ref().is_none_or(|(_, b)| a.objective < b.objective) {
            best = Some((p, a));
        }
    }
    best.ok_or(SearchError::ScatterFailed { count, seed })
}

/// Like [`scatter_init`], but falls back to the non-singular sample with the
/// smallest total violation when none is feasible. Used by soft-constraint
/// searches.
pub fn scatter_init_tolerant<O, R>(
    evaluator: &mut Evaluator<'_, O>,
    count: usize,
    rng: &mut R,
    seed: u64,
) -> Result<(GridPoint, Assessment), SearchError>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    if count == 0 {
        return Err(SearchError::InvalidConfig(
            "scatter count must be at least 1".into(),
        ));
    }
    let key = |a: &Assessment| (!a.feasible(), a.violation.sum(), a.objective);
    let mut best: Option<(GridPoint, Assessment)> = None;
    for _ in 0..count {
        let p = sample_point(evaluator.space(), rng);
        let Ok(a) = evaluator.evaluate(&p) else { break };
        if a.singular {
            continue;
        }
        let better = match &best {
            None => true,
            Some((_, b)) => key(&a).partial_cmp(&key(b)) == Some(std::cmp::Ordering::Less),
        };
        if better {
            best = Some((p, a));
        }
    }
    best.ok_or(SearchError::ScatterFailed { count, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::QuadraticBowl;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn collapsed_bounds_return_the_point() {
        let bowl = QuadraticBowl::new(vec![0.0, 0.0], 1.0, 3.0, 3.0);
        let mut ev = Evaluator::new(&bowl, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (p, _) = scatter_init(&mut ev, 1, &mut rng, 1).unwrap();
        assert_eq!(p, GridPoint(vec![3, 3]));
        assert_eq!(ev.used(), 1);
    }

    #[test]
    fn seeded_scatter_is_deterministic() {
        let bowl = QuadraticBowl::new(vec![1.0, 2.0, 3.0], 1.0, -50.0, 50.0);
        let run = || {
            let mut ev = Evaluator::new(&bowl, 100);
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            scatter_init(&mut ev, 50, &mut rng, 42).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn infeasible_everywhere_fails() {
        let bowl = QuadraticBowl::new(vec![0.0], 1.0, -5.0, 5.0).with_limit(-10.0);
        let mut ev = Evaluator::new(&bowl, 100);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let err = scatter_init(&mut ev, 20, &mut rng, 7).unwrap_err();
        assert_eq!(err, SearchError::ScatterFailed { count: 20, seed: 7 });
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut ev = Evaluator::new(&bowl, 100);
        let (_, a) = scatter_init_tolerant(&mut ev, 20, &mut rng, 7).unwrap();
        assert!(!a.feasible());
    }
}
