//! Minimum-cost feasible subset on a seeded monotone function, checked
//! against exhaustive enumeration.
//!
//! cargo run --example branch_and_bound

use channel_select::evaluators::SyntheticMonotoneFunction;
use channel_select::model::{normalize_costs, ChannelNames, Direction, ScoreParams};
use channel_select::search::{branch_and_bound, exhaustive_search, BnbOptions};

fn main() -> anyhow::Result<()> {
    let names = ChannelNames::new(["accel_x", "accel_y", "accel_z", "gyro_x", "gyro_y", "gyro_z", "mag", "baro"])?;
    // Per-channel sampling power, arbitrary units.
    let model = normalize_costs(&[2.0, 2.0, 2.0, 6.0, 6.0, 6.0, 3.0, 1.0])?;
    let f = SyntheticMonotoneFunction::seeded(names.len(), 42, 0.05, 0.45)?;
    let params = ScoreParams::new(0.5, 0.85, Direction::Maximize)?;

    let out = branch_and_bound(&model, &f, &params, BnbOptions::default())?;
    let best = out.best.expect("full set clears the bound");
    println!("best {:?}", names.names_of(best.subset));
    println!("  performance {:.4}  cost {:.4}  savings {:.1}%", best.performance, best.cost, 100.0 * (1.0 - best.cost));
    println!("  {} evaluations, {} pruned, {} dominated skips", out.stats.evaluations, out.stats.nodes_pruned_infeasible, out.stats.subsets_skipped_dominated);

    println!("fallback list (cheapest first):");
    for e in out.feasible.iter().take(5) {
        println!("  {:.4}  {:?}", e.cost, names.names_of(e.subset));
    }

    let ex = exhaustive_search(&model, &f, &params)?;
    assert_eq!(ex.best.map(|b| b.subset), Some(best.subset));
    println!("exhaustive agrees after {} evaluations", ex.evaluations);
    Ok(())
}
