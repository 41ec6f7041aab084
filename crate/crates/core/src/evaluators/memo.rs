use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use super::{EvalError, PerformanceFunction};
use crate::model::{ChannelSet, Direction};

/// Caches the inner evaluator per subset.
///
/// Safe to share across threads. Two threads racing on the same uncached
/// subset may both call the inner evaluator; results are deterministic so
/// whichever insert lands last is equivalent. Errors are never cached.
pub struct Memoized<F> {
    inner: F,
    cache: RwLock<HashMap<ChannelSet, f64>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl<F: PerformanceFunction> Memoized<F> {
    pub fn new(inner: F) -> Self {
        Self {
            inner,
            cache: RwLock::new(HashMap::new()),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    /// Number of calls forwarded to the inner evaluator.
    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn cached_len(&self) -> usize {
        self.cache.read().expect("memo cache poisoned").len()
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }

    pub fn into_inner(self) -> F {
        self.inner
    }
}

impl<F: PerformanceFunction> PerformanceFunction for Memoized<F> {
    fn channel_count(&self) -> usize {
        self.inner.channel_count()
    }

    fn evaluate(&self, subset: ChannelSet) -> Result<f64, EvalError> {
        if let Some(&v) = self.cache.read().expect("memo cache poisoned").get(&subset) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(v);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let v = self.inner.evaluate(subset)?;
        self.cache
            .write()
            .expect("memo cache poisoned")
            .insert(subset, v);
        Ok(v)
    }

    fn direction(&self) -> Direction {
        self.inner.direction()
    }

    fn claims_monotone(&self) -> bool {
        self.inner.claims_monotone()
    }
}
