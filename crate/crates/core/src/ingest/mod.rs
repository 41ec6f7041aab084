//! Multichannel time series: loading, windowing, per-window features and
//! train/test splits.

mod load;
mod synth;
mod window;

pub use load::{load_csv, write_csv, DatasetDescriptor};
pub use synth::{synthetic_recordings, SyntheticRecordingSpec};
pub use window::{
    extract_features, window_signal, windowed_features, SignalWindows, WindowedFeatureSet,
    FEATURES_PER_CHANNEL, FEATURE_NAMES,
};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ChannelNames, ModelError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("non-numeric cell at row {row}, column {column:?}")]
    NonNumericCell { row: usize, column: String },
    #[error("unknown label {label:?} at row {row}")]
    UnknownLabel { row: usize, label: String },
    #[error("file has no data rows")]
    EmptyFile,
    #[error("window of {window_seconds} s does not fit a {recording_seconds} s recording")]
    WindowLargerThanRecording {
        window_seconds: f64,
        recording_seconds: f64,
    },
    #[error("window stride must be positive (window {window_seconds} s, overlap {overlap_seconds} s)")]
    NonPositiveStride {
        window_seconds: f64,
        overlap_seconds: f64,
    },
    #[error("{seconds} s at {rate} Hz is not a whole number of samples")]
    FractionalSamples { seconds: f64, rate: f64 },
    #[error("no windows to extract features from")]
    EmptyWindowSet,
    #[error("invalid recording: {0}")]
    InvalidRecording(String),
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A labelled, aligned multichannel recording.
#[derive(Clone, Debug, PartialEq)]
pub struct RawRecording {
    channel_names: ChannelNames,
    classes: Vec<String>,
    sampling_rate_hz: f64,
    samples: Vec<Vec<f64>>,
    labels: Vec<usize>,
    segment: usize,
}

impl RawRecording {
    /// `samples[c][t]` is channel `c` at time step `t`; `labels[t]` indexes
    /// into `classes`.
    pub fn new(
        channel_names: ChannelNames,
        classes: Vec<String>,
        sampling_rate_hz: f64,
        samples: Vec<Vec<f64>>,
        labels: Vec<usize>,
    ) -> Result<Self, IngestError> {
        let invalid = |msg: String| Err(IngestError::InvalidRecording(msg));
        if !(sampling_rate_hz.is_finite() && sampling_rate_hz > 0.0) {
            return invalid(format!("sampling rate {sampling_rate_hz} Hz"));
        }
        if samples.len() != channel_names.len() {
            return invalid(format!(
                "{} sample rows for {} channels",
                samples.len(),
                channel_names.len()
            ));
        }
        let t = labels.len();
        if let Some(c) = samples.iter().position(|row| row.len() != t) {
            return invalid(format!(
                "channel {c} has {} samples, expected {t}",
                samples[c].len()
            ));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes.len()) {
            return invalid(format!("label {bad} with {} classes", classes.len()));
        }
        Ok(Self {
            channel_names,
            classes,
            sampling_rate_hz,
            samples,
            labels,
            segment: 0,
        })
    }

    /// Tag the recording with a segment id, used by [`SplitSpec::BySegment`].
    pub fn with_segment(mut self, segment: usize) -> Self {
        self.segment = segment;
        self
    }

    pub fn channel_names(&self) -> &ChannelNames {
        &self.channel_names
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn sampling_rate_hz(&self) -> f64 {
        self.sampling_rate_hz
    }

    pub fn channel(&self, index: usize) -> &[f64] {
        &self.samples[index]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn segment(&self) -> usize {
        self.segment
    }

    pub fn n_channels(&self) -> usize {
        self.samples.len()
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.n_samples() as f64 / self.sampling_rate_hz
    }
}

/// How windows are divided into a training and a test split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitSpec {
    /// Seeded shuffle, then the first `train_fraction` of windows train.
    ByFraction { train_fraction: f64, seed: u64 },
    /// Windows from the listed segments form the test split; the rest train.
    BySegment { test_segments: Vec<usize> },
}

impl SplitSpec {
    /// Window indices of the (train, test) splits, each in ascending order.
    pub fn partition(&self, data: &WindowedFeatureSet) -> Result<(Vec<usize>, Vec<usize>), IngestError> {
        let rows = data.rows();
        let (mut train, mut test) = match self {
            SplitSpec::ByFraction {
                train_fraction,
                seed,
            } => {
                if !(*train_fraction > 0.0 && *train_fraction < 1.0) {
                    return Err(IngestError::InvalidSplit(format!(
                        "train fraction {train_fraction} outside (0, 1)"
                    )));
                }
                let mut order: Vec<usize> = (0..rows).collect();
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
                let cut = (train_fraction * rows as f64).round() as usize;
                let test = order.split_off(cut.min(rows));
                (order, test)
            }
            SplitSpec::BySegment { test_segments } => (0..rows)
                .partition(|&i| !test_segments.contains(&data.segments()[i])),
        };
        train.sort_unstable();
        test.sort_unstable();
        Ok((train, test))
    }
}
