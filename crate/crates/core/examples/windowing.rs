//! Sliding windows and per-channel features over a short recording.
//!
//! cargo run --example windowing

use channel_select::ingest::{extract_features, window_signal, RawRecording, FEATURE_NAMES};
use channel_select::model::ChannelNames;

fn main() -> anyhow::Result<()> {
    let rate = 500.0;
    let t = 60 * 500;
    let names = ChannelNames::numbered("eeg", 3)?;
    let samples = (0..3)
        .map(|c| (0..t).map(|i| ((i as f64 / rate) * (c + 1) as f64).sin()).collect())
        .collect();
    let rec = RawRecording::new(names, vec!["rest".into()], rate, samples, vec![0; t])?;
    let windows = window_signal(&rec, 10.0, 5.0)?;
    println!("{} s at {rate} Hz -> {} windows of {} samples, stride {}", rec.duration_seconds(), windows.len(), windows.window_len(), windows.stride());
    let features = extract_features(&windows)?;
    println!("feature columns per channel: {FEATURE_NAMES:?}");
    for w in 0..3 {
        println!("window {w}: {:?}", features.block(w, 0).iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());
    }
    Ok(())
}
