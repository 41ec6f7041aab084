//! Drive a subprocess evaluator over the JSON-lines protocol. The bundled
//! script answers |S| / n.
//!
//! cargo run --example external_evaluator

use std::time::Duration;

use channel_select::evaluators::{ExternalEvaluator, ExternalEvaluatorConfig};
use channel_select::model::{ChannelNames, CostModel, Direction, ScoreParams};
use channel_select::search::{branch_and_bound, BnbOptions};

fn main() -> anyhow::Result<()> {
    let names = ChannelNames::new(["hand", "chest", "ankle", "wrist", "hip"])?;
    let script = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/echo_evaluator.py");
    let mut config = ExternalEvaluatorConfig::new("python3", names.clone())
        .with_args([script])
        .with_task("demo")
        .with_timeout(Duration::from_secs(10));
    config.claims_monotone = true;

    let evaluator = ExternalEvaluator::spawn(config)?;
    let params = ScoreParams::new(0.5, 0.6, Direction::Maximize)?;
    let out = branch_and_bound(&CostModel::equal(names.len())?, &evaluator, &params, BnbOptions::default())?;
    let best = out.best.expect("feasible");
    println!("best {:?}: f {:.2}, cost {:.2}, {} requests", names.names_of(best.subset), best.performance, best.cost, out.stats.evaluations);
    println!("child exited with {:?}", evaluator.shutdown()?);
    Ok(())
}
