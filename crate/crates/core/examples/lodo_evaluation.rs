//! Leave-one-domain-out evaluation of the built-in strategies against the
//! domain-pair baselines.
//!
//!     cargo run --release --example lodo_evaluation

use tilerank::dataset::{synth_dataset, SynthParams};
use tilerank::harness::{lodo_evaluate, EvalOptions};
use tilerank::strategy::{Strategy, StrategySpec};
use tilerank::tile::RealTile;

fn average(tile: &RealTile) -> f64 {
    let v: Vec<f64> = tile.cells().iter().flatten().copied().collect();
    v.iter().sum::<f64>() / v.len().max(1) as f64
}

fn main() -> tilerank::error::Result<()> {
    let ds = synth_dataset(SynthParams { domains: 8, entities: 12, categories: 3, labels: 4, drift: 0.6, seed: 3 })?;
    let specs = StrategySpec::parse_list("fixed,fixed*,mean-P,mean-P*,sem-P,sem-d,mean-V,med-V,mean-R,med-R,avg,all")?;
    let strategies: Vec<&dyn Strategy> = specs.iter().map(|s| s as &dyn Strategy).collect();
    let report = lodo_evaluate(&ds, &strategies, EvalOptions { resolution: 41, ..EvalOptions::default() })?;

    println!("{:<16} {:>9} {:>9}  note", "strategy", "mean tau", "min tau");
    println!("{:<16} {:>9.4} {:>9.4}", "domain pairs", average(&report.baseline.mean), average(&report.baseline.min));
    for s in &report.strategies {
        let note = if s.leave_one_out { "" } else { "sees every domain" };
        println!("{:<16} {:>9.4} {:>9.4}  {note}", s.id, average(&s.mean), average(&s.min));
    }
    Ok(())
}
