//! Generates a reproducible synthetic dataset and writes it as JSON.
//!
//!     cargo run --example synth_dataset -- [out.json]

use tilerank::dataset::{bhattacharyya_distance, save_dataset, synth_dataset, SynthParams};

fn main() -> tilerank::error::Result<()> {
    let params = SynthParams { domains: 6, entities: 8, categories: 3, labels: 4, drift: 0.4, seed: 11 };
    let ds = synth_dataset(params)?;
    println!("{} entities over {} domains in {} categories", ds.entities().len(), ds.domains().len(), ds.categories().len());
    println!("content hash {}", ds.content_hash());

    let first = &ds.domains()[0];
    for d in &ds.domains()[1..] {
        println!(
            "semantic distance {} -> {} ({}): {:.4}",
            first.id,
            d.id,
            d.category,
            bhattacharyya_distance(&first.semantic, &d.semantic)
        );
    }
    if let Some(path) = std::env::args().nth(1) {
        save_dataset(&ds, path.as_ref())?;
        println!("wrote {path}");
    }
    Ok(())
}
