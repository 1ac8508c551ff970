//! Per-entity rank layers of one domain, printed as coarse maps.
//!
//!     cargo run --example rank_layers -- [out-dir]

use tilerank::dataset::{synth_dataset, SynthParams};
use tilerank::render::{export_rank_layers, rank_layers, LayerSource};

fn main() -> tilerank::error::Result<()> {
    let ds = synth_dataset(SynthParams { domains: 3, entities: 4, seed: 7, ..SynthParams::default() })?;
    let layers = rank_layers(&ds, "d0", LayerSource::GroundTruth, 11, 0.0)?;
    for (entity, layer) in &layers {
        println!("{entity}: rank at each cell, b = 1 on top");
        for j in (0..layer.resolution()).rev() {
            let row: String = (0..layer.resolution())
                .map(|i| layer.get(i, j).map_or('?', |r| char::from_digit(r, 10).unwrap_or('+')))
                .collect();
            println!("  {row}");
        }
    }
    if let Some(dir) = std::env::args().nth(1) {
        let files = export_rank_layers(&ds, "d0", LayerSource::GroundTruth, 101, 0.0, dir.as_ref())?;
        println!("wrote {} layer CSVs to {dir}", files.len());
    }
    Ok(())
}
