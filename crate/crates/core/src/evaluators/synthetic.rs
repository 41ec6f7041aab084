use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_universe, EvalError, PerformanceFunction};
use crate::model::{ChannelSet, ModelError, MAX_CHANNELS};

/// `f(S) = 1 - prod_{i in S} (1 - u_i)` with every `u_i` in `(0, 1)`.
///
/// Each channel independently "detects" with probability `u_i`; `f` is the
/// probability that at least one kept channel does. Strictly monotone under
/// inclusion, `f(∅) = 0` and `f < 1` everywhere.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticMonotoneFunction {
    utilities: Vec<f64>,
}

impl SyntheticMonotoneFunction {
    pub fn new(utilities: Vec<f64>) -> Result<Self, EvalError> {
        if utilities.is_empty() || utilities.len() > MAX_CHANNELS {
            return Err(ModelError::ChannelCount(utilities.len()).into());
        }
        if let Some((i, u)) = utilities
            .iter()
            .enumerate()
            .find(|(_, &u)| !(u > 0.0 && u < 1.0))
        {
            return Err(EvalError::EvaluatorFailure(format!(
                "utility {u} at index {i} is outside (0, 1)"
            )));
        }
        Ok(Self { utilities })
    }

    /// Utilities drawn uniformly from `[low, high)` with a ChaCha8 stream.
    pub fn seeded(n: usize, seed: u64, low: f64, high: f64) -> Result<Self, EvalError> {
        if !(0.0 < low && low < high && high < 1.0) {
            return Err(EvalError::EvaluatorFailure(format!(
                "utility range [{low}, {high}) must lie inside (0, 1)"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new((0..n).map(|_| rng.random_range(low..high)).collect())
    }

    pub fn utilities(&self) -> &[f64] {
        &self.utilities
    }
}

impl PerformanceFunction for SyntheticMonotoneFunction {
    fn channel_count(&self) -> usize {
        self.utilities.len()
    }

    fn evaluate(&self, subset: ChannelSet) -> Result<f64, EvalError> {
        check_universe(self.utilities.len(), subset)?;
        let miss: f64 = subset.iter().map(|i| 1.0 - self.utilities[i]).product();
        Ok(1.0 - miss)
    }

    fn claims_monotone(&self) -> bool {
        true
    }
}
