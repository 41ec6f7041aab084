//! Subset searches: branch and bound, greedy descent and exhaustive
//! enumeration.
//!
//! All three minimize subset cost subject to the performance bound in
//! [`ScoreParams`]. Ties are broken deterministically: lower cost, then
//! better performance, then smaller bitmask.

mod bnb;
mod exhaustive;
mod greedy;

pub use bnb::{
    branch_and_bound, verify_pruning_soundness, write_trace_jsonl, BnbOptions, BnbOutcome,
    BnbStats, NodeAction, TraceError, TraceNode,
};
pub use exhaustive::{exhaustive_search, ExhaustiveOutcome, EXHAUSTIVE_MAX_CHANNELS};
pub use greedy::{alpha_sweep, greedy_select, write_sweep_csv, GreedyOutcome, SweepPoint};

use std::cmp::Ordering;

use thiserror::Error;

use crate::evaluators::{self, EvalError, PerformanceFunction};
use crate::model::{ChannelSet, CostModel, Direction, EvaluatedSubset, ModelError, ScoreParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("exhaustive search refuses {0} channels (limit {EXHAUSTIVE_MAX_CHANNELS})")]
    SearchSpaceTooLarge(usize),
    #[error("cost model has {cost_model} channels but the evaluator covers {evaluator}")]
    DimensionMismatch { cost_model: usize, evaluator: usize },
    #[error("search direction {params:?} disagrees with evaluator direction {evaluator:?}")]
    DirectionMismatch {
        params: Direction,
        evaluator: Direction,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn check_inputs(
    model: &CostModel,
    f: &dyn PerformanceFunction,
    params: &ScoreParams,
) -> Result<usize, SearchError> {
    if model.len() != f.channel_count() {
        return Err(SearchError::DimensionMismatch {
            cost_model: model.len(),
            evaluator: f.channel_count(),
        });
    }
    if params.direction() != f.direction() {
        return Err(SearchError::DirectionMismatch {
            params: params.direction(),
            evaluator: f.direction(),
        });
    }
    Ok(model.len())
}

fn evaluate_subset(
    f: &dyn PerformanceFunction,
    subset: ChannelSet,
    model: &CostModel,
    params: &ScoreParams,
) -> Result<EvaluatedSubset, SearchError> {
    let performance = evaluators::evaluate(f, subset)?;
    Ok(EvaluatedSubset::new(subset, performance, model, params)?)
}

/// Ordering used for optimal subsets and for the feasible list: cheaper
/// first, then better performing, then smaller bitmask.
pub fn cost_order(a: &EvaluatedSubset, b: &EvaluatedSubset, direction: Direction) -> Ordering {
    a.cost
        .total_cmp(&b.cost)
        .then_with(|| match direction {
            Direction::Maximize => b.performance.total_cmp(&a.performance),
            Direction::Minimize => a.performance.total_cmp(&b.performance),
        })
        .then_with(|| a.subset.cmp(&b.subset))
}

/// Ordering used by greedy descent: lower score, then lower cost, then
/// smaller bitmask.
pub fn score_order(a: &EvaluatedSubset, b: &EvaluatedSubset) -> Ordering {
    a.score
        .total_cmp(&b.score)
        .then_with(|| a.cost.total_cmp(&b.cost))
        .then_with(|| a.subset.cmp(&b.subset))
}
