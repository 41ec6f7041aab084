//! The performance-function contract and its implementations.
//!
//! A search only ever sees `dyn PerformanceFunction`: something that maps a
//! [`ChannelSet`] to a finite score. What sits behind it (a closed-form
//! synthetic function, a replay table, a nearest-centroid classifier, or a
//! subprocess speaking JSON lines) is irrelevant to the search.

mod centroid;
mod external;
mod memo;
mod synthetic;
mod table;

pub use centroid::{train_centroid, CentroidClassifier};
pub use external::{external_evaluate, ExternalEvaluator, ExternalEvaluatorConfig};
pub use memo::Memoized;
pub use synthetic::SyntheticMonotoneFunction;
pub use table::TableOracle;

use std::sync::Arc;

use thiserror::Error;

use crate::ingest::IngestError;
use crate::model::{ChannelSet, Direction, ModelError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("evaluator covers {expected} channels, subset has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("evaluator failure: {0}")]
    EvaluatorFailure(String),
    #[error("protocol violation: {0:?}")]
    ProtocolViolation(String),
    #[error("evaluator process exited (code {0:?})")]
    SubprocessExit(Option<i32>),
    #[error("evaluator timed out after {0} s")]
    Timeout(f64),
    #[error("dataset has a single class")]
    SingleClassDataset,
    #[error("{0} split is empty")]
    EmptySplit(&'static str),
    #[error("class {0} absent from the training split")]
    MissingTrainClass(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

/// Maps a channel subset to a performance value.
///
/// Implementations must be deterministic per subset. `claims_monotone` is a
/// promise that removing channels never improves performance; branch and
/// bound is only exact when it holds.
pub trait PerformanceFunction: Send + Sync {
    /// Size of the channel universe.
    fn channel_count(&self) -> usize;

    fn evaluate(&self, subset: ChannelSet) -> Result<f64, EvalError>;

    fn direction(&self) -> Direction {
        Direction::Maximize
    }

    fn claims_monotone(&self) -> bool {
        false
    }
}

impl<T: PerformanceFunction + ?Sized> PerformanceFunction for &T {
    fn channel_count(&self) -> usize {
        (**self).channel_count()
    }
    fn evaluate(&self, subset: ChannelSet) -> Result<f64, EvalError> {
        (**self).evaluate(subset)
    }
    fn direction(&self) -> Direction {
        (**self).direction()
    }
    fn claims_monotone(&self) -> bool {
        (**self).claims_monotone()
    }
}

impl<T: PerformanceFunction + ?Sized> PerformanceFunction for Box<T> {
    fn channel_count(&self) -> usize {
        (**self).channel_count()
    }
    fn evaluate(&self, subset: ChannelSet) -> Result<f64, EvalError> {
        (**self).evaluate(subset)
    }
    fn direction(&self) -> Direction {
        (**self).direction()
    }
    fn claims_monotone(&self) -> bool {
        (**self).claims_monotone()
    }
}

impl<T: PerformanceFunction + ?Sized> PerformanceFunction for Arc<T> {
    fn channel_count(&self) -> usize {
        (**self).channel_count()
    }
    fn evaluate(&self, subset: ChannelSet) -> Result<f64, EvalError> {
        (**self).evaluate(subset)
    }
    fn direction(&self) -> Direction {
        (**self).direction()
    }
    fn claims_monotone(&self) -> bool {
        (**self).claims_monotone()
    }
}

/// Evaluate `subset`, checking that it belongs to the evaluator's universe
/// and that the returned value is finite.
pub fn evaluate(f: &dyn PerformanceFunction, subset: ChannelSet) -> Result<f64, EvalError> {
    check_universe(f.channel_count(), subset)?;
    let value = f.evaluate(subset)?;
    if !value.is_finite() {
        return Err(EvalError::EvaluatorFailure(format!(
            "non-finite performance {value} for {subset}"
        )));
    }
    Ok(value)
}

pub(crate) fn check_universe(expected: usize, subset: ChannelSet) -> Result<(), EvalError> {
    if subset.universe() != expected {
        return Err(EvalError::DimensionMismatch {
            expected,
            found: subset.universe(),
        });
    }
    Ok(())
}

/// Closure-backed evaluator.
pub struct FnEvaluator<F> {
    n: usize,
    direction: Direction,
    monotone: bool,
    func: F,
}

impl<F> FnEvaluator<F>
where
    F: Fn(ChannelSet) -> f64 + Send + Sync,
{
    pub fn new(n: usize, func: F) -> Self {
        Self {
            n,
            direction: Direction::Maximize,
            monotone: false,
            func,
        }
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn claiming_monotone(mut self, monotone: bool) -> Self {
        self.monotone = monotone;
        self
    }
}

impl<F> PerformanceFunction for FnEvaluator<F>
where
    F: Fn(ChannelSet) -> f64 + Send + Sync,
{
    fn channel_count(&self) -> usize {
        self.n
    }

    fn evaluate(&self, subset: ChannelSet) -> Result<f64, EvalError> {
        check_universe(self.n, subset)?;
        Ok((self.func)(subset))
    }

    fn direction(&self) -> Direction {
        self.direction
    }

    fn claims_monotone(&self) -> bool {
        self.monotone
    }
}

/// A superset/subset pair that breaks monotonicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonicityViolation {
    pub superset: ChannelSet,
    pub subset: ChannelSet,
    pub superset_value: f64,
    pub subset_value: f64,
}

/// Largest universe [`certify_monotone`] will enumerate.
pub const CERTIFY_MAX_CHANNELS: usize = 22;

/// Exhaustively check that no nonempty subset outperforms any superset.
///
/// Comparing every subset with its remove-one children is enough: the
/// relation is transitive along inclusion chains. The empty set is skipped
/// because searches never evaluate it.
pub fn certify_monotone(
    f: &dyn PerformanceFunction,
) -> Result<Option<MonotonicityViolation>, EvalError> {
    let n = f.channel_count();
    if n > CERTIFY_MAX_CHANNELS {
        return Err(EvalError::EvaluatorFailure(format!(
            "monotonicity certificate limited to {CERTIFY_MAX_CHANNELS} channels, got {n}"
        )));
    }
    let direction = f.direction();
    let mut values = vec![0.0f64; 1 << n];
    for bits in 1..(1u64 << n) {
        values[bits as usize] = evaluate(f, ChannelSet::from_bits(n, bits)?)?;
    }
    for bits in 1..(1u64 << n) {
        let parent = ChannelSet::from_bits(n, bits)?;
        for index in parent.iter() {
            let child = parent.without(index);
            if child.is_empty() {
                continue;
            }
            let (pv, cv) = (values[bits as usize], values[child.bits() as usize]);
            if direction.better(cv, pv) {
                return Ok(Some(MonotonicityViolation {
                    superset: parent,
                    subset: child,
                    superset_value: pv,
                    subset_value: cv,
                }));
            }
        }
    }
    Ok(None)
}
