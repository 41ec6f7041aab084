//! Greedy backward descent: one channel removed per stage, guided by the
//! α-balanced score.
//!
//! cargo run --example greedy_descent

use channel_select::evaluators::SyntheticMonotoneFunction;
use channel_select::model::{ChannelNames, CostModel, Direction, ScoreParams};
use channel_select::search::greedy_select;

fn main() -> anyhow::Result<()> {
    let n = 12;
    let names = ChannelNames::numbered("ch", n)?;
    let model = CostModel::equal(n)?;
    let f = SyntheticMonotoneFunction::seeded(n, 7, 0.02, 0.35)?;
    let params = ScoreParams::new(0.5, 0.8, Direction::Maximize)?;

    let out = greedy_select(&model, &f, &params)?;
    for (stage, node) in out.path.iter().enumerate() {
        let mark = if node.subset == out.best.subset { "  <- best" } else { "" };
        println!("stage {stage:2}: f {:.4} cost {:.3} score {:.4} {}{mark}", node.performance, node.cost, node.score, node.subset);
    }
    println!("best {:?} after {} evaluations (bound {})", names.names_of(out.best.subset), out.evaluations, n * (n + 1) / 2);
    Ok(())
}
