//! Channel subsets, normalized cost models and the α-balanced score.
//!
//! Everything in here is a plain value type. A [`ChannelSet`] is a single
//! `u64` bitmask plus the size of the channel universe, so subsets are cheap
//! to copy, hash and compare. Ordering on [`ChannelSet`] is numeric bitmask
//! order, which is what every search uses for deterministic tie-breaking.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported channel universe; one subset fits in a machine word.
pub const MAX_CHANNELS: usize = 64;

/// Tolerance used when checking that normalized weights sum to one.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("channel count {0} is outside 1..={MAX_CHANNELS}")]
    ChannelCount(usize),
    #[error("channel index {index} out of range for {n} channels")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("bitmask {bits:#x} has bits set at or above channel count {n}")]
    BitsOutOfRange { bits: u64, n: usize },
    #[error("cost list is empty")]
    EmptyCostList,
    #[error("raw cost at index {0} is not strictly positive and finite")]
    NonPositiveCost(usize),
    #[error("dimension mismatch: expected {expected} channels, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("performance {0} outside [0, 1] for a maximized metric")]
    PerformanceOutOfRange(f64),
    #[error("cost {0} outside [0, 1]")]
    CostOutOfRange(f64),
    #[error("alpha {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("lambda {0} is not finite")]
    NonFiniteLambda(f64),
    #[error("unknown channel name {0:?}")]
    UnknownChannel(String),
    #[error("duplicate channel name {0:?}")]
    DuplicateChannel(String),
    #[error("cost file: {0}")]
    CostFile(String),
}

/// A subset of the channels `0..n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelSet {
    bits: u64,
    n: u8,
}

fn check_universe(n: usize) -> Result<(), ModelError> {
    if n == 0 || n > MAX_CHANNELS {
        return Err(ModelError::ChannelCount(n));
    }
    Ok(())
}

fn universe_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl ChannelSet {
    pub fn empty(n: usize) -> Result<Self, ModelError> {
        check_universe(n)?;
        Ok(Self { bits: 0, n: n as u8 })
    }

    pub fn full(n: usize) -> Result<Self, ModelError> {
        check_universe(n)?;
        Ok(Self {
            bits: universe_mask(n),
            n: n as u8,
        })
    }

    pub fn from_bits(n: usize, bits: u64) -> Result<Self, ModelError> {
        check_universe(n)?;
        if bits & !universe_mask(n) != 0 {
            return Err(ModelError::BitsOutOfRange { bits, n });
        }
        Ok(Self { bits, n: n as u8 })
    }

    pub fn from_indices<I>(n: usize, indices: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = usize>,
    {
        check_universe(n)?;
        let mut bits = 0u64;
        for index in indices {
            if index >= n {
                return Err(ModelError::IndexOutOfRange { index, n });
            }
            bits |= 1 << index;
        }
        Ok(Self { bits, n: n as u8 })
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    /// Size of the channel universe this subset lives in.
    #[inline]
    pub fn universe(self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn is_full(self) -> bool {
        self.bits == universe_mask(self.universe())
    }

    #[inline]
    pub fn contains(self, index: usize) -> bool {
        index < self.universe() && self.bits & (1 << index) != 0
    }

    /// The subset with `index` removed. Removing an absent channel is a no-op.
    #[inline]
    pub fn without(self, index: usize) -> Self {
        debug_assert!(index < self.universe());
        Self {
            bits: self.bits & !(1u64 << index),
            n: self.n,
        }
    }

    #[inline]
    pub fn with(self, index: usize) -> Self {
        debug_assert!(index < self.universe());
        Self {
            bits: self.bits | (1u64 << index),
            n: self.n,
        }
    }

    pub fn complement(self) -> Self {
        Self {
            bits: !self.bits & universe_mask(self.universe()),
            n: self.n,
        }
    }

    pub fn is_subset_of(self, other: ChannelSet) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn is_proper_subset_of(self, other: ChannelSet) -> bool {
        self.is_subset_of(other) && self.bits != other.bits
    }

    /// Member indices in ascending order.
    pub fn iter(self) -> Members {
        Members { bits: self.bits }
    }

    pub fn indices(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for ChannelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for ChannelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, index) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{index}")?;
        }
        write!(f, "}}")
    }
}

/// Iterator over member indices, lowest first.
#[derive(Clone, Debug)]
pub struct Members {
    bits: u64,
}

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.bits == 0 {
            return None;
        }
        let index = self.bits.trailing_zeros() as usize;
        self.bits &= self.bits - 1;
        Some(index)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let len = self.bits.count_ones() as usize;
        (len, Some(len))
    }
}

impl ExactSizeIterator for Members {}

/// Remove-one children of `set`, restricted to removing channels with index
/// `>= min_removable_index`, ordered by the removed index.
///
/// Passing `removed + 1` as the next minimum yields the canonical descent in
/// which every subset of the root is produced exactly once.
pub fn children(set: ChannelSet, min_removable_index: usize) -> Vec<ChannelSet> {
    set.iter()
        .filter(|&index| index >= min_removable_index)
        .map(|index| set.without(index))
        .collect()
}

/// Ordered, unique channel names. Position defines the channel index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct ChannelNames {
    names: Vec<String>,
}

impl ChannelNames {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, ModelError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        check_universe(names.len())?;
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(ModelError::DuplicateChannel(name.clone()));
            }
        }
        Ok(Self { names })
    }

    /// `prefix0`, `prefix1`, ...
    pub fn numbered(prefix: &str, n: usize) -> Result<Self, ModelError> {
        Self::new((0..n).map(|i| format!("{prefix}{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize, ModelError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ModelError::UnknownChannel(name.to_string()))
    }

    pub fn resolve<S: AsRef<str>>(&self, names: &[S]) -> Result<ChannelSet, ModelError> {
        let indices = names
            .iter()
            .map(|name| self.index_of(name.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        ChannelSet::from_indices(self.len(), indices)
    }

    /// Names of the members of `set`, in channel-index order.
    pub fn names_of(&self, set: ChannelSet) -> Vec<String> {
        set.iter().map(|i| self.names[i].clone()).collect()
    }

    pub fn full_set(&self) -> ChannelSet {
        ChannelSet::full(self.len()).expect("validated at construction")
    }
}

impl TryFrom<Vec<String>> for ChannelNames {
    type Error = ModelError;

    fn try_from(names: Vec<String>) -> Result<Self, Self::Error> {
        Self::new(names)
    }
}

impl From<ChannelNames> for Vec<String> {
    fn from(value: ChannelNames) -> Self {
        value.names
    }
}

/// Per-channel raw costs together with their normalized weights.
#[derive(Clone, Debug, PartialEq)]
pub struct CostModel {
    raw: Vec<f64>,
    weights: Vec<f64>,
}

/// Normalize raw channel costs so the weights sum to one.
pub fn normalize_costs(raw: &[f64]) -> Result<CostModel, ModelError> {
    if raw.is_empty() {
        return Err(ModelError::EmptyCostList);
    }
    check_universe(raw.len())?;
    if let Some(index) = raw.iter().position(|&c| !(c.is_finite() && c > 0.0)) {
        return Err(ModelError::NonPositiveCost(index));
    }
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|&c| c / total).collect();
    Ok(CostModel {
        raw: raw.to_vec(),
        weights,
    })
}

impl CostModel {
    /// Every channel costs the same.
    pub fn equal(n: usize) -> Result<Self, ModelError> {
        normalize_costs(&vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.weights[index]
    }

    fn check(&self, set: ChannelSet) -> Result<(), ModelError> {
        if set.universe() != self.len() {
            return Err(ModelError::DimensionMismatch {
                expected: self.len(),
                found: set.universe(),
            });
        }
        Ok(())
    }

    /// Sum of normalized weights over the members of `set`.
    pub fn subset_cost(&self, set: ChannelSet) -> Result<f64, ModelError> {
        self.check(set)?;
        Ok(set.iter().map(|i| self.weights[i]).sum())
    }

    /// Fraction of the total normalized cost saved by keeping only `set`.
    pub fn cost_savings(&self, set: ChannelSet) -> Result<f64, ModelError> {
        Ok(savings_from_cost(self.subset_cost(set)?))
    }
}

/// `1 - cost`, the fraction of total cost removed.
#[inline]
pub fn savings_from_cost(cost: f64) -> f64 {
    1.0 - cost
}

/// Read a `channel,raw_cost` CSV. Row order defines channel indices.
pub fn load_cost_csv(path: impl AsRef<Path>) -> Result<(ChannelNames, CostModel), ModelError> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| ModelError::CostFile(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| ModelError::CostFile(e.to_string()))?
        .clone();
    if headers.len() != 2 || &headers[0] != "channel" || &headers[1] != "raw_cost" {
        return Err(ModelError::CostFile(format!(
            "expected header `channel,raw_cost`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut names = Vec::new();
    let mut raw = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ModelError::CostFile(e.to_string()))?;
        names.push(record[0].to_string());
        let cost: f64 = record[1].parse().map_err(|_| {
            ModelError::CostFile(format!("row {}: cannot parse cost {:?}", row + 1, &record[1]))
        })?;
        raw.push(cost);
    }
    let model = normalize_costs(&raw)?;
    Ok((ChannelNames::new(names)?, model))
}

/// Whether the performance metric is to be maximized (accuracy) or
/// minimized (a loss).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Maximize,
    Minimize,
}

impl Direction {
    /// Strict "better than" on raw metric values.
    #[inline]
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Maximize => a > b,
            Direction::Minimize => a < b,
        }
    }
}

/// Balance term, performance bound and metric direction for one run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreParams {
    alpha: f64,
    lambda: f64,
    direction: Direction,
}

impl ScoreParams {
    pub fn new(alpha: f64, lambda: f64, direction: Direction) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(ModelError::AlphaOutOfRange(alpha));
        }
        if !lambda.is_finite() {
            return Err(ModelError::NonFiniteLambda(lambda));
        }
        Ok(Self {
            alpha,
            lambda,
            direction,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self, ModelError> {
        Self::new(alpha, self.lambda, self.direction)
    }

    /// The performance bound: `f >= lambda` when maximizing, `f <= lambda`
    /// when minimizing a loss.
    #[inline]
    pub fn is_feasible(&self, performance: f64) -> bool {
        match self.direction {
            Direction::Maximize => performance >= self.lambda,
            Direction::Minimize => performance <= self.lambda,
        }
    }

    pub fn score(&self, performance: f64, cost: f64) -> Result<f64, ModelError> {
        score(performance, cost, self)
    }
}

/// α-weighted blend of performance and cost; lower is better.
///
/// Maximized metrics enter as `1 - f` so that both terms are minimized.
pub fn score(performance: f64, cost: f64, params: &ScoreParams) -> Result<f64, ModelError> {
    if !(-WEIGHT_SUM_TOLERANCE..=1.0 + WEIGHT_SUM_TOLERANCE).contains(&cost) {
        return Err(ModelError::CostOutOfRange(cost));
    }
    let alpha = params.alpha;
    match params.direction {
        Direction::Maximize => {
            if !(0.0..=1.0).contains(&performance) {
                return Err(ModelError::PerformanceOutOfRange(performance));
            }
            Ok(alpha * (1.0 - performance) + (1.0 - alpha) * cost)
        }
        Direction::Minimize => Ok(alpha * performance + (1.0 - alpha) * cost),
    }
}

/// One evaluated subset: what was measured and what it costs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvaluatedSubset {
    pub subset: ChannelSet,
    pub performance: f64,
    pub cost: f64,
    pub score: f64,
}

impl EvaluatedSubset {
    pub fn new(
        subset: ChannelSet,
        performance: f64,
        model: &CostModel,
        params: &ScoreParams,
    ) -> Result<Self, ModelError> {
        let cost = model.subset_cost(subset)?;
        let score = score(performance, cost, params)?;
        Ok(Self {
            subset,
            performance,
            cost,
            score,
        })
    }
}
