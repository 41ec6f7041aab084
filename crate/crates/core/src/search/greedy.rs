//! Greedy backward descent guided by the α-balanced score.
//!
//! From the full set, every remove-one child of the current node is
//! evaluated and the walk moves to the feasible child of lowest score, even
//! when that score is worse than the current node's. The walk ends when no
//! child is feasible or a single channel remains; the lowest-score node seen
//! on the path is returned. At most `n(n+1)/2` subsets are evaluated.

use std::io::Write;

use super::{check_inputs, evaluate_subset, score_order, SearchError};
use crate::evaluators::{Memoized, PerformanceFunction};
use crate::model::{children, ChannelNames, ChannelSet, CostModel, EvaluatedSubset, ScoreParams};

#[derive(Clone, Debug)]
pub struct GreedyOutcome {
    /// Lowest-score node on the path, or the full set when it is infeasible.
    pub best: EvaluatedSubset,
    /// One entry per stage, starting at the full set.
    pub path: Vec<EvaluatedSubset>,
    pub evaluations: u64,
    /// The full set itself misses the bound; `best` is then the full set
    /// and no descent took place.
    pub infeasible_root: bool,
}

pub fn greedy_select(
    model: &CostModel,
    f: &dyn PerformanceFunction,
    params: &ScoreParams,
) -> Result<GreedyOutcome, SearchError> {
    let n = check_inputs(model, f, params)?;
    let root = evaluate_subset(f, ChannelSet::full(n)?, model, params)?;
    let mut evaluations = 1;
    if !params.is_feasible(root.performance) {
        return Ok(GreedyOutcome {
            best: root,
            path: vec![root],
            evaluations,
            infeasible_root: true,
        });
    }

    let mut path = vec![root];
    let mut current = root.subset;
    while current.len() > 1 {
        let mut chosen: Option<EvaluatedSubset> = None;
        for child in children(current, 0) {
            let eval = evaluate_subset(f, child, model, params)?;
            evaluations += 1;
            if !params.is_feasible(eval.performance) {
                continue;
            }
            if chosen.is_none_or(|c| score_order(&eval, &c).is_lt()) {
                chosen = Some(eval);
            }
        }
        let Some(next) = chosen else { break };
        path.push(next);
        current = next.subset;
    }

    let best = *path
        .iter()
        .min_by(|a, b| score_order(a, b))
        .expect("path holds the root");
    Ok(GreedyOutcome {
        best,
        path,
        evaluations,
        infeasible_root: false,
    })
}

#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub alpha: f64,
    pub outcome: GreedyOutcome,
}

/// One greedy run per α, sharing a memoized evaluator across runs.
pub fn alpha_sweep(
    model: &CostModel,
    f: &dyn PerformanceFunction,
    params: &ScoreParams,
    alphas: &[f64],
) -> Result<Vec<SweepPoint>, SearchError> {
    let memo = Memoized::new(f);
    alphas
        .iter()
        .map(|&alpha| {
            let run_params = params.with_alpha(alpha)?;
            Ok(SweepPoint {
                alpha,
                outcome: greedy_select(model, &memo, &run_params)?,
            })
        })
        .collect()
}

/// `alpha,accuracy,cost,score,num_channels,channels`, one row per point,
/// channels joined with `;`.
pub fn write_sweep_csv(
    points: &[SweepPoint],
    names: &ChannelNames,
    out: impl Write,
) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["alpha", "accuracy", "cost", "score", "num_channels", "channels"])?;
    for point in points {
        let best = &point.outcome.best;
        writer.write_record([
            point.alpha.to_string(),
            best.performance.to_string(),
            best.cost.to_string(),
            best.score.to_string(),
            best.subset.len().to_string(),
            names.names_of(best.subset).join(";"),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
