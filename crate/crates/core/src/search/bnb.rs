//! Branch and bound over the subset lattice.
//!
//! The search starts from the full channel set and removes one channel per
//! level. Children only remove channels with an index above the last one
//! removed on the path from the root, so every subset has exactly one parent
//! in the tree. A node whose performance misses the bound is pruned and its
//! subtree is never generated: with a monotone performance function every
//! subset of an infeasible set is infeasible too. The same argument lets a
//! child be skipped without evaluation when one of its one-larger supersets
//! is already known to be infeasible.
//!
//! Children of a node are evaluated cheapest first and feasible ones are
//! descended into depth first, again cheapest first.

use std::collections::{HashMap, HashSet};
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use super::{check_inputs, cost_order, evaluate_subset, SearchError};
use crate::evaluators::PerformanceFunction;
use crate::model::{ChannelNames, ChannelSet, CostModel, Direction, EvaluatedSubset, ScoreParams};

#[derive(Clone, Copy, Debug, Default)]
pub struct BnbOptions {
    /// Keep a log of every generated node.
    pub record_trace: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BnbStats {
    pub evaluations: u64,
    pub nodes_pruned_infeasible: u64,
    pub nodes_skipped_visited: u64,
    /// Children skipped because a one-larger superset was already infeasible.
    pub subsets_skipped_dominated: u64,
    pub max_stack_depth: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeAction {
    Feasible,
    Pruned,
    VisitedSkip,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceNode {
    pub subset: ChannelSet,
    pub parent: Option<ChannelSet>,
    pub performance: f64,
    pub cost: f64,
    pub action: NodeAction,
}

#[derive(Clone, Debug)]
pub struct BnbOutcome {
    /// Minimum-cost feasible subset, absent when the full set is infeasible.
    pub best: Option<EvaluatedSubset>,
    /// Every feasible subset evaluated, cheapest first.
    pub feasible: Vec<EvaluatedSubset>,
    pub stats: BnbStats,
    pub trace: Option<Vec<TraceNode>>,
    /// True when the evaluator claims monotonicity, so `best` is the global
    /// optimum; otherwise the result is heuristic.
    pub exact: bool,
}

struct Search<'a> {
    model: &'a CostModel,
    f: &'a dyn PerformanceFunction,
    params: &'a ScoreParams,
    visited: HashMap<ChannelSet, f64>,
    infeasible: HashSet<ChannelSet>,
    stats: BnbStats,
    trace: Option<Vec<TraceNode>>,
}

impl Search<'_> {
    fn log(&mut self, subset: ChannelSet, parent: Option<ChannelSet>, performance: f64, cost: f64, action: NodeAction) {
        if let Some(trace) = &mut self.trace {
            trace.push(TraceNode {
                subset,
                parent,
                performance,
                cost,
                action,
            });
        }
    }

    fn dominated(&self, subset: ChannelSet) -> bool {
        subset
            .complement()
            .iter()
            .any(|j| self.infeasible.contains(&subset.with(j)))
    }

    fn evaluate(&mut self, subset: ChannelSet, parent: Option<ChannelSet>) -> Result<(EvaluatedSubset, bool), SearchError> {
        let eval = evaluate_subset(self.f, subset, self.model, self.params)?;
        self.stats.evaluations += 1;
        self.visited.insert(subset, eval.performance);
        let feasible = self.params.is_feasible(eval.performance);
        if feasible {
            self.log(subset, parent, eval.performance, eval.cost, NodeAction::Feasible);
        } else {
            self.stats.nodes_pruned_infeasible += 1;
            self.infeasible.insert(subset);
            self.log(subset, parent, eval.performance, eval.cost, NodeAction::Pruned);
        }
        Ok((eval, feasible))
    }
}

/// Minimum-cost subset whose performance meets `params.lambda()`.
pub fn branch_and_bound(
    model: &CostModel,
    f: &dyn PerformanceFunction,
    params: &ScoreParams,
    options: BnbOptions,
) -> Result<BnbOutcome, SearchError> {
    let n = check_inputs(model, f, params)?;
    let direction = params.direction();
    let mut search = Search {
        model,
        f,
        params,
        visited: HashMap::new(),
        infeasible: HashSet::new(),
        stats: BnbStats::default(),
        trace: options.record_trace.then(Vec::new),
    };
    let exact = f.claims_monotone();

    let root = ChannelSet::full(n)?;
    let (root_eval, root_feasible) = search.evaluate(root, None)?;
    if !root_feasible {
        return Ok(BnbOutcome {
            best: None,
            feasible: Vec::new(),
            stats: search.stats,
            trace: search.trace,
            exact,
        });
    }
    let mut best = root_eval;
    let mut feasible = vec![root_eval];

    // (node, lowest channel index its children may remove)
    let mut stack = vec![(root, 0usize)];
    search.stats.max_stack_depth = 1;
    while let Some((node, min_index)) = stack.pop() {
        if node.len() <= 1 {
            continue;
        }
        let mut kids: Vec<(ChannelSet, usize, f64)> = node
            .iter()
            .filter(|&i| i >= min_index)
            .map(|i| {
                let child = node.without(i);
                Ok((child, i, model.subset_cost(child)?))
            })
            .collect::<Result<_, SearchError>>()?;
        kids.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.1.cmp(&b.1)));

        let mut expand = Vec::new();
        for (child, removed, cost) in kids {
            if let Some(&performance) = search.visited.get(&child) {
                search.stats.nodes_skipped_visited += 1;
                search.log(child, Some(node), performance, cost, NodeAction::VisitedSkip);
                continue;
            }
            if search.dominated(child) {
                search.stats.subsets_skipped_dominated += 1;
                search.infeasible.insert(child);
                continue;
            }
            let (eval, ok) = search.evaluate(child, Some(node))?;
            if ok {
                if cost_order(&eval, &best, direction).is_lt() {
                    best = eval;
                }
                feasible.push(eval);
                expand.push((child, removed + 1));
            }
        }
        stack.extend(expand.into_iter().rev());
        search.stats.max_stack_depth = search.stats.max_stack_depth.max(stack.len() as u64);
    }

    feasible.sort_by(|a, b| cost_order(a, b, direction));
    Ok(BnbOutcome {
        best: Some(best),
        feasible,
        stats: search.stats,
        trace: search.trace,
        exact,
    })
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
}

/// True iff no logged node descends from a node that missed the bound.
///
/// Also rejects traces that are internally inconsistent: duplicate
/// evaluations, unknown parents, parents that are not strict supersets, or
/// actions that disagree with the logged performance.
pub fn verify_pruning_soundness(
    trace: &[TraceNode],
    lambda: f64,
    direction: Direction,
) -> Result<bool, TraceError> {
    let feasible = |v: f64| match direction {
        Direction::Maximize => v >= lambda,
        Direction::Minimize => v <= lambda,
    };
    let malformed = |msg: String| Err(TraceError::MalformedTrace(msg));
    let mut nodes: HashMap<ChannelSet, &TraceNode> = HashMap::new();
    for node in trace {
        match node.action {
            NodeAction::VisitedSkip => continue,
            NodeAction::Feasible if !feasible(node.performance) => {
                return malformed(format!("{} logged feasible with f = {}", node.subset, node.performance))
            }
            NodeAction::Pruned if feasible(node.performance) => {
                return malformed(format!("{} logged pruned with f = {}", node.subset, node.performance))
            }
            _ => {}
        }
        if nodes.insert(node.subset, node).is_some() {
            return malformed(format!("{} evaluated twice", node.subset));
        }
    }
    for node in trace {
        let mut current = node;
        while let Some(parent) = current.parent {
            if !current.subset.is_proper_subset_of(parent) {
                return malformed(format!("parent {parent} does not contain {}", current.subset));
            }
            let Some(&p) = nodes.get(&parent) else {
                return malformed(format!("parent {parent} of {} not in trace", current.subset));
            };
            if !feasible(p.performance) {
                return Ok(false);
            }
            current = p;
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct TraceLine<'a> {
    subset: Vec<String>,
    f: f64,
    cost: f64,
    parent: Option<Vec<String>>,
    action: &'a NodeAction,
}

/// One JSON object per node, in visiting order.
pub fn write_trace_jsonl(
    trace: &[TraceNode],
    names: &ChannelNames,
    mut out: impl Write,
) -> std::io::Result<()> {
    for node in trace {
        let line = TraceLine {
            subset: names.names_of(node.subset),
            f: node.performance,
            cost: node.cost,
            parent: node.parent.map(|p| names.names_of(p)),
            action: &node.action,
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
