use channel_select::evaluators::{evaluate, FnEvaluator, Memoized, PerformanceFunction, SyntheticMonotoneFunction};
use channel_select::model::{normalize_costs, ChannelSet, CostModel, Direction, ScoreParams};
use channel_select::search::{
    branch_and_bound, exhaustive_search, greedy_select, verify_pruning_soundness, BnbOptions,
};
use proptest::prelude::*;

fn cost_model(n: usize, raw: &[f64], equal: bool) -> CostModel {
    if equal {
        CostModel::equal(n).unwrap()
    } else {
        normalize_costs(&raw[..n]).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bnb_matches_exhaustive_when_maximizing(
        n in 2usize..=10,
        seed in any::<u64>(),
        raw in prop::collection::vec(0.1f64..5.0, 10),
        equal in any::<bool>(),
        lambda_frac in 0.2f64..1.1,
        alpha in 0.0f64..=1.0,
    ) {
        let model = cost_model(n, &raw, equal);
        let f = SyntheticMonotoneFunction::seeded(n, seed, 0.05, 0.5).unwrap();
        let top = evaluate(&f, ChannelSet::full(n).unwrap()).unwrap();
        let p = ScoreParams::new(alpha, top * lambda_frac, Direction::Maximize).unwrap();
        let bnb = branch_and_bound(&model, &f, &p, BnbOptions { record_trace: true }).unwrap();
        let ex = exhaustive_search(&model, &f, &p).unwrap();
        prop_assert_eq!(bnb.best, ex.best);
        prop_assert!(verify_pruning_soundness(bnb.trace.as_ref().unwrap(), p.lambda(), Direction::Maximize).unwrap());
        // Every reported feasible subset really is feasible and listed once.
        let mut seen = std::collections::HashSet::new();
        for e in &bnb.feasible {
            prop_assert!(p.is_feasible(e.performance));
            prop_assert!(seen.insert(e.subset));
            prop_assert!(ex.feasible.contains(e));
        }
        prop_assert!(bnb.stats.evaluations < (1u64 << n));
    }

    #[test]
    fn bnb_matches_exhaustive_when_minimizing(
        n in 2usize..=9,
        seed in any::<u64>(),
        raw in prop::collection::vec(0.1f64..5.0, 10),
        slack in 0.0f64..0.6,
    ) {
        let model = cost_model(n, &raw, false);
        let inner = SyntheticMonotoneFunction::seeded(n, seed, 0.05, 0.5).unwrap();
        // Error rate: removing channels can only raise it.
        let f = FnEvaluator::new(n, move |s| 1.0 - evaluate(&inner, s).unwrap())
            .with_direction(Direction::Minimize)
            .claiming_monotone(true);
        let best_err = evaluate(&f, ChannelSet::full(n).unwrap()).unwrap();
        let p = ScoreParams::new(0.5, best_err + slack, Direction::Minimize).unwrap();
        let bnb = branch_and_bound(&model, &f, &p, BnbOptions::default()).unwrap();
        let ex = exhaustive_search(&model, &f, &p).unwrap();
        prop_assert_eq!(bnb.best, ex.best);
        prop_assert!(bnb.best.is_some());
    }

    #[test]
    fn greedy_path_shrinks_by_one_and_stays_feasible(
        n in 1usize..=12,
        seed in any::<u64>(),
        lambda in 0.0f64..1.0,
        alpha in 0.0f64..=1.0,
    ) {
        let model = CostModel::equal(n).unwrap();
        let f = SyntheticMonotoneFunction::seeded(n, seed, 0.05, 0.5).unwrap();
        let p = ScoreParams::new(alpha, lambda, Direction::Maximize).unwrap();
        let g = greedy_select(&model, &f, &p).unwrap();
        prop_assert!(g.evaluations <= (n * (n + 1) / 2) as u64);
        if g.infeasible_root {
            prop_assert_eq!(g.path.len(), 1);
        } else {
            for w in g.path.windows(2) {
                prop_assert!(w[1].subset.is_proper_subset_of(w[0].subset));
                prop_assert_eq!(w[1].subset.len() + 1, w[0].subset.len());
            }
            prop_assert!(g.path.iter().all(|e| p.is_feasible(e.performance)));
            prop_assert!(g.path.iter().all(|e| e.score >= g.best.score));
        }
    }

    #[test]
    fn memoization_does_not_change_results(n in 2usize..=9, seed in any::<u64>(), lambda in 0.0f64..0.8) {
        let model = CostModel::equal(n).unwrap();
        let f = SyntheticMonotoneFunction::seeded(n, seed, 0.05, 0.5).unwrap();
        let p = ScoreParams::new(0.5, lambda, Direction::Maximize).unwrap();
        let memo = Memoized::new(&f);
        let plain = branch_and_bound(&model, &f, &p, BnbOptions::default()).unwrap();
        let cached = branch_and_bound(&model, &memo, &p, BnbOptions::default()).unwrap();
        prop_assert_eq!(plain.best, cached.best);
        prop_assert_eq!(plain.feasible, cached.feasible);
        let again = branch_and_bound(&model, &memo, &p, BnbOptions::default()).unwrap();
        prop_assert_eq!(again.best, cached.best);
        prop_assert!(memo.hits() >= plain.stats.evaluations);
        prop_assert!(memo.claims_monotone());
    }
}

#[test]
fn non_monotone_evaluator_is_reported_heuristic() {
    let f = FnEvaluator::new(3, |s| if s.bits() == 0b001 { 0.9 } else { 0.1 + 0.3 * s.len() as f64 });
    let p = ScoreParams::new(0.5, 0.8, Direction::Maximize).unwrap();
    let model = CostModel::equal(3).unwrap();
    let bnb = branch_and_bound(&model, &f, &p, BnbOptions::default()).unwrap();
    assert!(!bnb.exact);
    // Pruning under a false monotonicity assumption misses {0}; exhaustive finds it.
    let ex = exhaustive_search(&model, &f, &p).unwrap();
    assert_eq!(ex.best.unwrap().subset.bits(), 0b001);
    assert_ne!(bnb.best.map(|b| b.subset.bits()), Some(0b001));
}
