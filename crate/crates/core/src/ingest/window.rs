use super::{IngestError, RawRecording};
use crate::model::{ChannelNames, ChannelSet};

/// Features computed per channel per window, in column order.
pub const FEATURE_NAMES: [&str; 4] = ["mean", "std", "min", "max"];
pub const FEATURES_PER_CHANNEL: usize = FEATURE_NAMES.len();

fn to_samples(seconds: f64, rate: f64) -> Result<usize, IngestError> {
    let exact = seconds * rate;
    let rounded = exact.round();
    if !exact.is_finite() || (exact - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return Err(IngestError::FractionalSamples { seconds, rate });
    }
    Ok(rounded as usize)
}

/// Fixed-length windows over one recording, before feature extraction.
#[derive(Clone, Debug)]
pub struct SignalWindows<'a> {
    recording: &'a RawRecording,
    window_seconds: f64,
    overlap_seconds: f64,
    window_len: usize,
    stride: usize,
    starts: Vec<usize>,
    labels: Vec<usize>,
}

impl<'a> SignalWindows<'a> {
    pub fn recording(&self) -> &'a RawRecording {
        self.recording
    }

    /// Samples per window.
    pub fn window_len(&self) -> usize {
        self.window_len
    }

    /// Samples between consecutive window starts.
    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    /// Samples of `channel` inside window `window`.
    pub fn window(&self, window: usize, channel: usize) -> &'a [f64] {
        let start = self.starts[window];
        &self.recording.channel(channel)[start..start + self.window_len]
    }
}

/// Cut `rec` into windows of `window_seconds` whose consecutive starts are
/// `window_seconds - overlap_seconds` apart. Trailing samples that do not
/// fill a window are dropped. Each window takes the majority label of its
/// samples, ties going to the lowest class id.
pub fn window_signal(
    rec: &RawRecording,
    window_seconds: f64,
    overlap_seconds: f64,
) -> Result<SignalWindows<'_>, IngestError> {
    if !(overlap_seconds >= 0.0 && overlap_seconds < window_seconds) {
        return Err(IngestError::NonPositiveStride {
            window_seconds,
            overlap_seconds,
        });
    }
    let rate = rec.sampling_rate_hz();
    let window_len = to_samples(window_seconds, rate)?;
    let stride = to_samples(window_seconds - overlap_seconds, rate)?;
    if window_len == 0 || stride == 0 {
        return Err(IngestError::NonPositiveStride {
            window_seconds,
            overlap_seconds,
        });
    }
    let total = rec.n_samples();
    if window_len > total {
        return Err(IngestError::WindowLargerThanRecording {
            window_seconds,
            recording_seconds: rec.duration_seconds(),
        });
    }
    let count = (total - window_len) / stride + 1;
    let starts: Vec<usize> = (0..count).map(|i| i * stride).collect();
    let n_classes = rec.classes().len();
    let labels = starts
        .iter()
        .map(|&s| majority_label(&rec.labels()[s..s + window_len], n_classes))
        .collect();
    Ok(SignalWindows {
        recording: rec,
        window_seconds,
        overlap_seconds,
        window_len,
        stride,
        starts,
        labels,
    })
}

fn majority_label(labels: &[usize], n_classes: usize) -> usize {
    let mut counts = vec![0usize; n_classes.max(1)];
    for &l in labels {
        counts[l] += 1;
    }
    // max_by_key keeps the last maximum; iterate in reverse so the lowest id wins ties.
    counts
        .iter()
        .enumerate()
        .rev()
        .max_by_key(|&(_, &c)| c)
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Per-window, per-channel feature matrix.
///
/// Row `w` holds `FEATURES_PER_CHANNEL` contiguous columns per channel, in
/// channel order, so channel `c` owns columns `c*F .. (c+1)*F`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowedFeatureSet {
    channel_names: ChannelNames,
    classes: Vec<String>,
    features: Vec<f64>,
    labels: Vec<usize>,
    segments: Vec<usize>,
    window_seconds: f64,
    overlap_seconds: f64,
}

/// Online mean/variance; one pass, numerically stable.
fn channel_features(samples: &[f64]) -> [f64; FEATURES_PER_CHANNEL] {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for (k, &x) in samples.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
        min = min.min(x);
        max = max.max(x);
    }
    let std = (m2 / samples.len() as f64).max(0.0).sqrt();
    [mean, std, min, max]
}

/// Mean, population standard deviation, min and max of every channel in
/// every window.
pub fn extract_features(windows: &SignalWindows<'_>) -> Result<WindowedFeatureSet, IngestError> {
    if windows.is_empty() {
        return Err(IngestError::EmptyWindowSet);
    }
    let rec = windows.recording();
    let n = rec.n_channels();
    let mut features = Vec::with_capacity(windows.len() * n * FEATURES_PER_CHANNEL);
    for w in 0..windows.len() {
        for c in 0..n {
            features.extend_from_slice(&channel_features(windows.window(w, c)));
        }
    }
    Ok(WindowedFeatureSet {
        channel_names: rec.channel_names().clone(),
        classes: rec.classes().to_vec(),
        features,
        labels: windows.labels().to_vec(),
        segments: vec![rec.segment(); windows.len()],
        window_seconds: windows.window_seconds,
        overlap_seconds: windows.overlap_seconds,
    })
}

/// [`window_signal`] followed by [`extract_features`].
pub fn windowed_features(
    rec: &RawRecording,
    window_seconds: f64,
    overlap_seconds: f64,
) -> Result<WindowedFeatureSet, IngestError> {
    extract_features(&window_signal(rec, window_seconds, overlap_seconds)?)
}

impl WindowedFeatureSet {
    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_channels(&self) -> usize {
        self.channel_names.len()
    }

    pub fn n_columns(&self) -> usize {
        self.n_channels() * FEATURES_PER_CHANNEL
    }

    pub fn channel_names(&self) -> &ChannelNames {
        &self.channel_names
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn segments(&self) -> &[usize] {
        &self.segments
    }

    pub fn window_seconds(&self) -> f64 {
        self.window_seconds
    }

    pub fn overlap_seconds(&self) -> f64 {
        self.overlap_seconds
    }

    pub fn row(&self, window: usize) -> &[f64] {
        let width = self.n_columns();
        &self.features[window * width..(window + 1) * width]
    }

    /// Column range owned by `channel`.
    pub fn channel_columns(channel: usize) -> std::ops::Range<usize> {
        channel * FEATURES_PER_CHANNEL..(channel + 1) * FEATURES_PER_CHANNEL
    }

    /// Feature block of one channel in one window.
    pub fn block(&self, window: usize, channel: usize) -> &[f64] {
        &self.row(window)[Self::channel_columns(channel)]
    }

    /// Copy of one row restricted to the channels in `subset`, in channel order.
    pub fn masked_row(&self, window: usize, subset: ChannelSet) -> Vec<f64> {
        subset
            .iter()
            .flat_map(|c| self.block(window, c).iter().copied())
            .collect()
    }

    /// Stack feature sets from several recordings of the same channel layout.
    pub fn concat(parts: Vec<WindowedFeatureSet>) -> Result<Self, IngestError> {
        let mut iter = parts.into_iter();
        let mut out = iter.next().ok_or(IngestError::EmptyWindowSet)?;
        for part in iter {
            if part.channel_names != out.channel_names
                || part.classes != out.classes
                || part.window_seconds != out.window_seconds
                || part.overlap_seconds != out.overlap_seconds
            {
                return Err(IngestError::InvalidRecording(
                    "cannot concatenate feature sets with different layouts".into(),
                ));
            }
            out.features.extend(part.features);
            out.labels.extend(part.labels);
            out.segments.extend(part.segments);
        }
        Ok(out)
    }
}
