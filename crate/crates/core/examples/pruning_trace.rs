//! Record the branch-and-bound node log, check it for soundness and print
//! it as JSON lines.
//!
//! cargo run --example pruning_trace

use channel_select::evaluators::SyntheticMonotoneFunction;
use channel_select::model::{ChannelNames, CostModel, Direction, ScoreParams};
use channel_select::search::{branch_and_bound, verify_pruning_soundness, write_trace_jsonl, BnbOptions};

fn main() -> anyhow::Result<()> {
    let n = 5;
    let names = ChannelNames::numbered("s", n)?;
    let f = SyntheticMonotoneFunction::new(vec![0.5, 0.3, 0.2, 0.1, 0.05])?;
    let params = ScoreParams::new(0.5, 0.7, Direction::Maximize)?;
    let out = branch_and_bound(&CostModel::equal(n)?, &f, &params, BnbOptions { record_trace: true })?;
    let trace = out.trace.expect("trace requested");
    let sound = verify_pruning_soundness(&trace, params.lambda(), params.direction())?;
    eprintln!("{} nodes, sound: {sound}", trace.len());
    write_trace_jsonl(&trace, &names, std::io::stdout().lock())?;
    Ok(())
}
