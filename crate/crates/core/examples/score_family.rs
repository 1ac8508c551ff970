//! Walks the Tile and shows which familiar score each corner and edge point
//! reduces to, then ranks three detectors under a few preferences.
//!
//!     cargo run --example score_family

use tilerank::perf::{canonical_importance, ranking_score, tile_coords, Importance, Performance, TileCoord};

fn main() -> tilerank::error::Result<()> {
    let detectors = [
        ("cautious", Performance::new(0.70, 0.02, 0.18, 0.10)?),
        ("balanced", Performance::new(0.62, 0.08, 0.08, 0.22)?),
        ("eager", Performance::new(0.50, 0.22, 0.02, 0.26)?),
    ];
    let points = [
        ("accuracy", 0.5, 0.5),
        ("true positive rate", 1.0, 1.0),
        ("true negative rate", 0.0, 0.0),
        ("F1 / Jaccard+", 1.0, 0.5),
        ("positive predictive value", 1.0, 0.0),
    ];
    for (label, a, b) in points {
        let imp = canonical_importance(TileCoord::new(a, b)?);
        let mut scored: Vec<(&str, f64)> =
            detectors.iter().map(|(n, p)| Ok((*n, ranking_score(p, &imp)?))).collect::<tilerank::error::Result<_>>()?;
        scored.sort_by(|x, y| y.1.total_cmp(&x.1));
        let line: Vec<String> = scored.iter().map(|(n, s)| format!("{n} {s:.3}")).collect();
        println!("({a:.1}, {b:.1}) {label:<26} {}", line.join("  >  "));
    }

    // any importance lands somewhere on the Tile
    let costly_misses = Importance::new(1.0, 1.0, 9.0, 3.0)?;
    println!("\nimportance (1, 1, 9, 3) sits at {}", tile_coords(&costly_misses));
    Ok(())
}
