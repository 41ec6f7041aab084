//! Greedy results across α, written as plot-ready CSV to stdout.
//!
//! cargo run --example alpha_sweep > sweep.csv

use channel_select::model::{normalize_costs, Direction, ScoreParams};
use channel_select::reference::{eeg_channel_names, eeg_replay_oracle, EEG_LAMBDA};
use channel_select::search::{alpha_sweep, write_sweep_csv};

fn main() -> anyhow::Result<()> {
    let names = eeg_channel_names();
    // Frontal electrodes are cheaper to place than the rest.
    let raw: Vec<f64> = names
        .as_slice()
        .iter()
        .map(|n| if n.starts_with('F') { 1.0 } else { 2.5 })
        .collect();
    let model = normalize_costs(&raw)?;
    let oracle = eeg_replay_oracle();
    let params = ScoreParams::new(0.5, EEG_LAMBDA, Direction::Maximize)?;
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let points = alpha_sweep(&model, &oracle, &params, &grid)?;
    write_sweep_csv(&points, &names, std::io::stdout().lock())?;
    Ok(())
}
