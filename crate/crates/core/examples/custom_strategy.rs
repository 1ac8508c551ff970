//! Plugging a user-defined strategy into the harness: predict each domain's
//! ranking from the first reference in its category, or the first reference
//! overall when the category has no other domain.
//!
//!     cargo run --release --example custom_strategy

use tilerank::dataset::{synth_dataset, SynthParams};
use tilerank::error::Result;
use tilerank::harness::{lodo_evaluate, EvalOptions};
use tilerank::perf::TileCoord;
use tilerank::rank::ScoreVector;
use tilerank::strategy::{Predictor, Strategy, StrategyContext, StrategySpec};

/// Scores of the best-weighted reference sharing the test category.
struct SameCategoryFirst;

struct Bound<'a> {
    ctx: StrategyContext<'a>,
    pick: usize,
}

impl Predictor for Bound<'_> {
    fn predict_values(&self, coord: TileCoord) -> Result<ScoreVector> {
        Ok(self.ctx.reference_scores(self.ctx.references()[self.pick], coord))
    }
}

impl Strategy for SameCategoryFirst {
    fn id(&self) -> String {
        "same-category".into()
    }

    fn bind<'a>(&'a self, ctx: &StrategyContext<'a>) -> Result<Box<dyn Predictor + 'a>> {
        let pick = ctx
            .references()
            .iter()
            .position(|d| d.category == ctx.test_category())
            .unwrap_or(0);
        Ok(Box::new(Bound { ctx: ctx.clone(), pick }))
    }
}

fn main() -> Result<()> {
    let ds = synth_dataset(SynthParams { domains: 6, entities: 8, categories: 2, labels: 3, drift: 0.5, seed: 1 })?;
    let builtin = StrategySpec::parse_list("mean-V,sem-d")?;
    let custom = SameCategoryFirst;
    let mut strategies: Vec<&dyn Strategy> = builtin.iter().map(|s| s as &dyn Strategy).collect();
    strategies.push(&custom);
    let report = lodo_evaluate(&ds, &strategies, EvalOptions { resolution: 21, ..EvalOptions::default() })?;
    for s in &report.strategies {
        let v: Vec<f64> = s.mean.cells().iter().flatten().copied().collect();
        println!("{:<14} mean tau {:.4}", s.id, v.iter().sum::<f64>() / v.len() as f64);
    }
    Ok(())
}
