//! Wrapper evaluation end to end: synthetic recordings, sliding windows,
//! per-channel features, a nearest-centroid classifier, then greedy
//! selection. Only channel 3 carries class information.
//!
//! cargo run --example centroid_wrapper

use channel_select::evaluators::{evaluate, train_centroid, Memoized};
use channel_select::ingest::{synthetic_recordings, windowed_features, SplitSpec, SyntheticRecordingSpec, WindowedFeatureSet};
use channel_select::model::{ChannelSet, CostModel, Direction, ScoreParams};
use channel_select::search::greedy_select;

fn main() -> anyhow::Result<()> {
    let spec = SyntheticRecordingSpec {
        channels: 8,
        informative: vec![3],
        separation: 1.0,
        seconds: 120.0,
        sampling_rate_hz: 50.0,
        segments: 6,
        seed: 1,
    };
    let parts = synthetic_recordings(&spec)?
        .iter()
        .map(|rec| windowed_features(rec, 2.0, 1.0))
        .collect::<Result<Vec<_>, _>>()?;
    let data = WindowedFeatureSet::concat(parts)?;
    let clf = train_centroid(&data, &SplitSpec::BySegment { test_segments: vec![4, 5] })?;
    println!("{} windows: {} train, {} test", data.rows(), clf.train_rows(), clf.test_rows());

    let n = spec.channels;
    for c in 0..n {
        let acc = evaluate(&clf, ChannelSet::from_indices(n, [c])?)?;
        println!("  ch{c} alone: accuracy {acc:.3}");
    }

    let memo = Memoized::new(&clf);
    let params = ScoreParams::new(0.5, 0.9, Direction::Maximize)?;
    let out = greedy_select(&CostModel::equal(n)?, &memo, &params)?;
    println!("greedy keeps {:?} (accuracy {:.3}, cost {:.3})", data.channel_names().names_of(out.best.subset), out.best.performance, out.best.cost);
    println!("{} evaluations, {} classifier calls", out.evaluations, memo.misses());
    Ok(())
}
