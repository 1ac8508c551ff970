//! Predicting performance-based rankings of two-class classifiers on unseen
//! domains, for every application preference at once.
//!
//! A point `(a, b)` of the unit square (the Tile) selects a ranking score;
//! `a` trades true positives against true negatives and `b` false negatives
//! against false positives. Given per-domain performances of a set of
//! entities, strategies predict the ranking on a held-out domain, and the
//! harness measures Kendall's τ against the true ranking at every Tile
//! point.
//!
//! ```
//! use tilerank::dataset::{synth_dataset, SynthParams};
//! use tilerank::harness::{lodo_evaluate, EvalOptions};
//! use tilerank::strategy::{Strategy, StrategySpec};
//!
//! let ds = synth_dataset(SynthParams { drift: 0.0, ..SynthParams::default() }).unwrap();
//! let specs = StrategySpec::parse_list("mean-V,sem-d").unwrap();
//! let strategies: Vec<&dyn Strategy> = specs.iter().map(|s| s as &dyn Strategy).collect();
//! let report = lodo_evaluate(&ds, &strategies, EvalOptions { resolution: 11, ..EvalOptions::default() }).unwrap();
//! assert!(report.strategies[0].min.cells().iter().all(|t| *t == Some(1.0)));
//! ```
//!
//! Modules, bottom up: [`perf`] (performances, importances, scores),
//! [`rank`] (rankings, τ, aggregation), [`tile`] (lattices and tile CSV),
//! [`dataset`], [`strategy`], [`harness`], [`render`] and [`cli`].

pub mod cli;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod perf;
pub mod rank;
pub mod render;
pub mod strategy;
pub mod tile;

pub use error::{Error, Result};
