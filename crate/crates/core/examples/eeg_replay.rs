//! Replays the 19-electrode mental-arithmetic setup: branch and bound finds
//! the single electrode FP1, greedy descent ends at {C3, F3}.
//!
//! cargo run --example eeg_replay [-- out.json]
//!
//! With a path argument the full replay table is also written in the table
//! file format, ready for `chansel bnb --evaluator table:out.json --monotone`.

use channel_select::evaluators::certify_monotone;
use channel_select::model::{savings_from_cost, CostModel, Direction, ScoreParams};
use channel_select::reference::{eeg_channel_names, eeg_replay_oracle, EEG_LAMBDA};
use channel_select::search::{branch_and_bound, greedy_select, BnbOptions};

fn main() -> anyhow::Result<()> {
    let names = eeg_channel_names();
    let oracle = eeg_replay_oracle();
    anyhow::ensure!(certify_monotone(&oracle)?.is_none(), "replay table is not monotone");

    let model = CostModel::equal(names.len())?;
    let params = ScoreParams::new(0.5, EEG_LAMBDA, Direction::Maximize)?;
    let bnb = branch_and_bound(&model, &oracle, &params, BnbOptions::default())?;
    let greedy = greedy_select(&model, &oracle, &params)?;

    println!("{:<10} {:<12} {:>8} {:>7} {:>7} {:>8}", "method", "channels", "accuracy", "cost", "score", "savings");
    let full = oracle_row(&oracle, &model, &params, names.full_set())?;
    for (label, e) in [("all", full), ("bnb", bnb.best.expect("feasible")), ("greedy", greedy.best)] {
        let channels = if e.subset.is_full() { format!("all {}", names.len()) } else { names.names_of(e.subset).join(",") };
        println!(
            "{label:<10} {channels:<12} {:>8.4} {:>7.4} {:>7.4} {:>7.1}%",
            e.performance,
            e.cost,
            e.score,
            100.0 * savings_from_cost(e.cost)
        );
    }
    println!("bnb: {} evaluations of {} subsets", bnb.stats.evaluations, (1u64 << names.len()) - 1);

    if let Some(path) = std::env::args().nth(1) {
        let file = oracle.to_file_data(&names)?;
        std::fs::write(&path, serde_json::to_vec(&file)?)?;
        println!("wrote {path}");
    }
    Ok(())
}

fn oracle_row(
    oracle: &channel_select::evaluators::TableOracle,
    model: &CostModel,
    params: &ScoreParams,
    subset: channel_select::ChannelSet,
) -> anyhow::Result<channel_select::EvaluatedSubset> {
    let f = channel_select::evaluators::evaluate(oracle, subset)?;
    Ok(channel_select::EvaluatedSubset::new(subset, f, model, params)?)
}
