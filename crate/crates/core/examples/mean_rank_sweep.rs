//! Freezing the rank-inducing score with `@a,b`: sweeps `b` for mean-R* and
//! compares each frozen variant with the adaptive one.
//!
//!     cargo run --release --example mean_rank_sweep

use tilerank::dataset::{synth_dataset, SynthParams};
use tilerank::harness::{lodo_evaluate, EvalOptions};
use tilerank::strategy::{Strategy, StrategySpec};

fn main() -> tilerank::error::Result<()> {
    let ds = synth_dataset(SynthParams { domains: 8, entities: 10, categories: 2, labels: 3, drift: 0.5, seed: 5 })?;
    let mut list: Vec<String> = (0..=4).map(|k| format!("mean-R*@0.5,{}", k as f64 / 4.0)).collect();
    list.push("mean-R*".into());
    let specs = StrategySpec::parse_list(&list.join(","))?;
    let strategies: Vec<&dyn Strategy> = specs.iter().map(|s| s as &dyn Strategy).collect();
    let report = lodo_evaluate(&ds, &strategies, EvalOptions { resolution: 21, ..EvalOptions::default() })?;
    for s in &report.strategies {
        let cells: Vec<f64> = s.mean.cells().iter().flatten().copied().collect();
        let avg = cells.iter().sum::<f64>() / cells.len() as f64;
        let worst = cells.iter().copied().fold(f64::INFINITY, f64::min);
        println!("{:<18} mean {avg:.4}  worst cell {worst:.4}", s.id);
    }
    Ok(())
}
