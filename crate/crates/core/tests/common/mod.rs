#![allow(dead_code)]

use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use tilerank::dataset::{load_dataset, Dataset};
use tilerank::perf::TileCoord;
use tilerank::strategy::{Strategy, StrategySpec};

pub fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> Dataset {
    load_dataset(&fixture_path(name)).unwrap()
}

pub fn dataset(value: Value) -> Dataset {
    Dataset::from_json(&value.to_string()).unwrap()
}

/// Domain with one `[tn, fp, fn, tp]` per entity, single semantic label.
pub fn domain(id: &str, category: &str, perfs: &[(&str, [f64; 4])]) -> Value {
    let performances: serde_json::Map<String, Value> = perfs.iter().map(|(e, p)| (e.to_string(), json!(p))).collect();
    json!({"id": id, "category": category, "semantic": {"all": 1.0}, "performances": performances})
}

/// Symmetric performance whose accuracy is `acc`.
pub fn acc(acc: f64) -> [f64; 4] {
    [acc / 2.0, (1.0 - acc) / 2.0, (1.0 - acc) / 2.0, acc / 2.0]
}

pub fn spec(text: &str) -> StrategySpec {
    text.parse().unwrap()
}

pub fn refs(specs: &[StrategySpec]) -> Vec<&dyn Strategy> {
    specs.iter().map(|s| s as &dyn Strategy).collect()
}

pub fn c(a: f64, b: f64) -> TileCoord {
    TileCoord::new(a, b).unwrap()
}

/// A coarse grid of Tile points including the corners.
pub fn probe_coords() -> Vec<TileCoord> {
    let mut out = Vec::new();
    for i in 0..=4 {
        for j in 0..=4 {
            out.push(c(i as f64 / 4.0, j as f64 / 4.0));
        }
    }
    out
}
pub mod brute;
