//! Evaluates two strategies and writes the full report directory with
//! rendered tiles.
//!
//!     cargo run --release --example render_tiles -- [out-dir]

use tilerank::dataset::{synth_dataset, SynthParams};
use tilerank::harness::{lodo_evaluate, write_report, EvalOptions, RenderOptions};
use tilerank::render::{render_tile, Colormap};
use tilerank::strategy::{Strategy, StrategySpec};

fn main() -> tilerank::error::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "tilerank-report".into());
    let ds = synth_dataset(SynthParams { seed: 17, ..SynthParams::default() })?;
    let specs = StrategySpec::parse_list("mean-V,sem-d")?;
    let strategies: Vec<&dyn Strategy> = specs.iter().map(|s| s as &dyn Strategy).collect();
    let report = lodo_evaluate(&ds, &strategies, EvalOptions::default())?;
    let files = write_report(&report, out.as_ref(), &RenderOptions::default())?;
    println!("wrote {} files under {out}/", files.len());

    // the same tile as a PNG with a custom colormap
    let cmap = Colormap::by_name("-1:3b4cc0,0:f7f7f7,1:b40426")?;
    let png = format!("{out}/mean-V-coolwarm.png");
    render_tile(&report.strategies[0].mean, &cmap, 4).save(png.as_ref())?;
    println!("wrote {png}");
    Ok(())
}
