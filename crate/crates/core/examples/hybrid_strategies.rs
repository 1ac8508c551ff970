//! Picks the best strategy per Tile cell and reports how much of the Tile
//! each one wins.
//!
//!     cargo run --release --example hybrid_strategies

use tilerank::dataset::{synth_dataset, SynthParams};
use tilerank::harness::{lodo_evaluate, EvalOptions};
use tilerank::strategy::{Strategy, StrategySpec};
use tilerank::tile::Reduction;

fn main() -> tilerank::error::Result<()> {
    let ds = synth_dataset(SynthParams { domains: 7, entities: 10, categories: 2, labels: 3, drift: 0.7, seed: 8 })?;
    let specs = StrategySpec::parse_list("mean-P,sem-P,sem-d,mean-V,mean-R")?;
    let strategies: Vec<&dyn Strategy> = specs.iter().map(|s| s as &dyn Strategy).collect();
    let report = lodo_evaluate(&ds, &strategies, EvalOptions { resolution: 31, ..EvalOptions::default() })?;

    for objective in Reduction::ALL {
        let h = report.hybrid(objective).expect("one hybrid per objective");
        println!("best {objective} tau per cell:");
        for (id, share) in &h.area_fractions {
            println!("  {id:<8} {:5.1}% of the Tile", 100.0 * share);
        }
        // coarse map of the winners, b upwards
        let res = h.selection.resolution();
        for j in (0..res).rev().step_by(5) {
            let row: String = (0..res)
                .step_by(3)
                .map(|i| {
                    let id = h.selection.get(i, j).as_deref().unwrap_or("?");
                    specs.iter().position(|s| s.id == id).map_or('?', |k| (b'A' + k as u8) as char)
                })
                .collect();
            println!("  {row}");
        }
    }
    let legend: Vec<String> = specs.iter().enumerate().map(|(k, s)| format!("{}={}", (b'A' + k as u8) as char, s.id)).collect();
    println!("{}", legend.join(" "));
    Ok(())
}
