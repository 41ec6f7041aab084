use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{IngestError, RawRecording};
use crate::model::ChannelNames;

/// Seeded two-class recordings in which only some channels carry signal.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticRecordingSpec {
    pub channels: usize,
    /// Channels whose mean shifts with the class.
    pub informative: Vec<usize>,
    /// Distance between the two class means on informative channels, in
    /// units of the noise standard deviation.
    pub separation: f64,
    pub seconds: f64,
    pub sampling_rate_hz: f64,
    /// Number of recordings; segment `i` has class `i % 2`.
    pub segments: usize,
    pub seed: u64,
}

/// One recording per segment, each tagged with its segment id.
pub fn synthetic_recordings(spec: &SyntheticRecordingSpec) -> Result<Vec<RawRecording>, IngestError> {
    let names = ChannelNames::numbered("ch", spec.channels)?;
    let samples = (spec.seconds * spec.sampling_rate_hz).round() as usize;
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.segments)
        .map(|segment| {
            let class = segment % 2;
            let shift = if class == 0 { -0.5 } else { 0.5 } * spec.separation;
            let data = (0..spec.channels)
                .map(|c| {
                    let offset = if spec.informative.contains(&c) { shift } else { 0.0 };
                    (0..samples).map(|_| offset + noise.sample(&mut rng)).collect()
                })
                .collect();
            RawRecording::new(
                names.clone(),
                vec!["class0".into(), "class1".into()],
                spec.sampling_rate_hz,
                data,
                vec![class; samples],
            )
            .map(|r| r.with_segment(segment))
        })
        .collect()
}
