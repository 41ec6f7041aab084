use super::{check_inputs, cost_order, evaluate_subset, SearchError};
use crate::evaluators::PerformanceFunction;
use crate::model::{ChannelSet, CostModel, EvaluatedSubset, ScoreParams};

/// Exhaustive search refuses universes larger than this (2^20 evaluations).
pub const EXHAUSTIVE_MAX_CHANNELS: usize = 20;

#[derive(Clone, Debug)]
pub struct ExhaustiveOutcome {
    pub best: Option<EvaluatedSubset>,
    /// All feasible subsets, cheapest first.
    pub feasible: Vec<EvaluatedSubset>,
    pub evaluations: u64,
}

/// Evaluate every nonempty subset in ascending bitmask order and return the
/// minimum-cost feasible one. Exact whether or not `f` is monotone.
pub fn exhaustive_search(
    model: &CostModel,
    f: &dyn PerformanceFunction,
    params: &ScoreParams,
) -> Result<ExhaustiveOutcome, SearchError> {
    if model.len() > EXHAUSTIVE_MAX_CHANNELS {
        return Err(SearchError::SearchSpaceTooLarge(model.len()));
    }
    let n = check_inputs(model, f, params)?;
    let direction = params.direction();
    let mut feasible = Vec::new();
    let mut evaluations = 0;
    for bits in 1..(1u64 << n) {
        let eval = evaluate_subset(f, ChannelSet::from_bits(n, bits)?, model, params)?;
        evaluations += 1;
        if params.is_feasible(eval.performance) {
            feasible.push(eval);
        }
    }
    feasible.sort_by(|a, b| cost_order(a, b, direction));
    Ok(ExhaustiveOutcome {
        best: feasible.first().copied(),
        feasible,
        evaluations,
    })
}
