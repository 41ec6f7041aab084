use std::sync::atomic::{AtomicU64, Ordering};

use super::{check_universe, EvalError, PerformanceFunction};
use crate::ingest::{SplitSpec, WindowedFeatureSet, FEATURES_PER_CHANNEL};
use crate::model::ChannelSet;

/// Nearest-centroid classifier over standardized window features.
///
/// Trained once on every feature column. Evaluating a subset drops the
/// columns of channels outside it, so the returned test accuracy reflects
/// only the kept channels.
#[derive(Debug)]
pub struct CentroidClassifier {
    n_channels: usize,
    classes: Vec<usize>,
    /// `centroids[k]` is the standardized mean row of `classes[k]`.
    centroids: Vec<Vec<f64>>,
    test: Vec<f64>,
    test_labels: Vec<usize>,
    train_rows: usize,
    reads: Vec<AtomicU64>,
}

/// Fit per-class centroids on the training split of `dataset`.
pub fn train_centroid(
    dataset: &WindowedFeatureSet,
    split: &SplitSpec,
) -> Result<CentroidClassifier, EvalError> {
    let mut present: Vec<usize> = dataset.labels().to_vec();
    present.sort_unstable();
    present.dedup();
    if present.len() < 2 {
        return Err(EvalError::SingleClassDataset);
    }
    let (train, test) = split.partition(dataset)?;
    if train.is_empty() {
        return Err(EvalError::EmptySplit("train"));
    }
    if test.is_empty() {
        return Err(EvalError::EmptySplit("test"));
    }
    let labels = dataset.labels();
    if let Some(&missing) = present
        .iter()
        .find(|&&c| !train.iter().any(|&i| labels[i] == c))
    {
        return Err(EvalError::MissingTrainClass(missing));
    }

    let width = dataset.n_columns();
    let m = train.len() as f64;
    let mut mean = vec![0.0; width];
    for &i in &train {
        for (acc, x) in mean.iter_mut().zip(dataset.row(i)) {
            *acc += x / m;
        }
    }
    let mut scale = vec![0.0; width];
    for &i in &train {
        for ((acc, x), mu) in scale.iter_mut().zip(dataset.row(i)).zip(&mean) {
            *acc += (x - mu) * (x - mu) / m;
        }
    }
    for s in &mut scale {
        *s = if *s > 0.0 { s.sqrt() } else { 1.0 };
    }
    let standardize = |row: &[f64]| -> Vec<f64> {
        row.iter()
            .zip(&mean)
            .zip(&scale)
            .map(|((x, mu), s)| (x - mu) / s)
            .collect()
    };

    let mut centroids = vec![vec![0.0; width]; present.len()];
    let mut counts = vec![0usize; present.len()];
    for &i in &train {
        let k = present.binary_search(&labels[i]).expect("class listed");
        counts[k] += 1;
        for (acc, z) in centroids[k].iter_mut().zip(standardize(dataset.row(i))) {
            *acc += z;
        }
    }
    for (centroid, &count) in centroids.iter_mut().zip(&counts) {
        for v in centroid.iter_mut() {
            *v /= count as f64;
        }
    }

    let test_features = test
        .iter()
        .flat_map(|&i| standardize(dataset.row(i)))
        .collect();
    Ok(CentroidClassifier {
        n_channels: dataset.n_channels(),
        classes: present,
        centroids,
        test: test_features,
        test_labels: test.iter().map(|&i| labels[i]).collect(),
        train_rows: train.len(),
        reads: (0..dataset.n_channels()).map(|_| AtomicU64::new(0)).collect(),
    })
}

impl CentroidClassifier {
    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn train_rows(&self) -> usize {
        self.train_rows
    }

    pub fn test_rows(&self) -> usize {
        self.test_labels.len()
    }

    /// Which split the reported performance is measured on.
    pub fn evaluation_split(&self) -> &'static str {
        "test"
    }

    fn test_block(&self, row: usize, channel: usize) -> &[f64] {
        self.reads[channel].fetch_add(1, Ordering::Relaxed);
        let width = self.n_channels * FEATURES_PER_CHANNEL;
        let start = row * width + channel * FEATURES_PER_CHANNEL;
        &self.test[start..start + FEATURES_PER_CHANNEL]
    }

    /// Test-feature blocks read per channel since the last reset.
    pub fn reads_per_channel(&self) -> Vec<u64> {
        self.reads.iter().map(|r| r.load(Ordering::Relaxed)).collect()
    }

    pub fn reset_read_counters(&self) {
        for r in &self.reads {
            r.store(0, Ordering::Relaxed);
        }
    }

    fn predict(&self, row: usize, subset: ChannelSet) -> usize {
        let mut dist = vec![0.0; self.centroids.len()];
        for c in subset.iter() {
            let block = self.test_block(row, c);
            let cols = c * FEATURES_PER_CHANNEL..(c + 1) * FEATURES_PER_CHANNEL;
            for (d, centroid) in dist.iter_mut().zip(&self.centroids) {
                *d += block
                    .iter()
                    .zip(&centroid[cols.clone()])
                    .map(|(x, mu)| (x - mu) * (x - mu))
                    .sum::<f64>();
            }
        }
        let mut best = 0;
        for k in 1..dist.len() {
            if dist[k] < dist[best] {
                best = k;
            }
        }
        self.classes[best]
    }
}

impl PerformanceFunction for CentroidClassifier {
    fn channel_count(&self) -> usize {
        self.n_channels
    }

    /// Test-split accuracy using only the channels in `subset`.
    fn evaluate(&self, subset: ChannelSet) -> Result<f64, EvalError> {
        check_universe(self.n_channels, subset)?;
        if subset.is_empty() {
            return Err(EvalError::EvaluatorFailure(
                "centroid classifier needs at least one channel".into(),
            ));
        }
        let correct = (0..self.test_rows())
            .filter(|&row| self.predict(row, subset) == self.test_labels[row])
            .count();
        Ok(correct as f64 / self.test_rows() as f64)
    }
}
