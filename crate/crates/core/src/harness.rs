//! Leave-one-domain-out evaluation of strategies over the whole Tile.
//!
//! For every strategy and every domain, the strategy predicts the domain's
//! ranking from the other domains at each lattice point, and Kendall's τ
//! against the ground-truth ranking fills one correlation tile. Per-domain
//! tiles are then reduced to mean and minimum tiles, compared with the
//! domain-pair baselines, and combined into per-cell best-strategy tiles.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{cdnet_weights, Dataset};
use crate::error::{Error, Result};
use crate::perf::{canonical_importance, TileCoord};
use crate::rank::{kendall_tau, rank_from_scores, Ranking};
use crate::render::{render_selection, render_tile, Colormap};
use crate::strategy::{file_stem, Strategy, StrategyContext};
use crate::tile::{
    argmax_tile, make_grid, reduce_tiles, reduce_tiles_weighted, save_csv, tile_area_fraction, RealTile, Reduction,
    SelectionTile, TileGrid, DEFAULT_RESOLUTION,
};

/// Ranking of `domain` induced by the canonical ranking score at `coord`.
pub fn ground_truth_ranking(dataset: &Dataset, domain: &str, coord: TileCoord, tie_tol: f64) -> Result<Ranking> {
    let d = dataset.domain(domain)?;
    rank_from_scores(&dataset.domain_scores(d, &canonical_importance(coord)), tie_tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub resolution: usize,
    pub tie_tol: f64,
    /// Average per-domain tiles with leaderboard-style category weights
    /// instead of uniformly.
    pub category_balanced_mean: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            resolution: DEFAULT_RESOLUTION,
            tie_tol: 0.0,
            category_balanced_mean: false,
        }
    }
}

/// Why (part of) a strategy's tile for one domain could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainFailure {
    pub domain: String,
    /// Number of cells left as errors.
    pub cells: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyReport {
    pub id: String,
    /// `false` flags results that may be optimistic because the strategy
    /// uses information from the test domain.
    pub leave_one_out: bool,
    /// Correlation tile per domain, in dataset order.
    pub per_domain: Vec<(String, RealTile)>,
    pub mean: RealTile,
    pub min: RealTile,
    pub failures: Vec<DomainFailure>,
}

impl StrategyReport {
    pub fn objective(&self, objective: Reduction) -> &RealTile {
        match objective {
            Reduction::Mean => &self.mean,
            Reduction::Min => &self.min,
        }
    }

    pub fn domain(&self, id: &str) -> Option<&RealTile> {
        self.per_domain.iter().find(|(d, _)| d == id).map(|(_, t)| t)
    }
}

/// Mean and minimum of τ over all unordered pairs of domains.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    pub mean: RealTile,
    pub min: RealTile,
}

/// Best strategy per cell for one objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Hybrid {
    pub objective: Reduction,
    pub selection: SelectionTile,
    pub achieved: RealTile,
    /// Share of the Tile won by each strategy, in report order.
    pub area_fractions: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub options: EvalOptions,
    pub dataset_hash: String,
    pub domains: Vec<String>,
    pub strategies: Vec<StrategyReport>,
    pub baseline: Baseline,
    /// One entry per objective, mean first.
    pub hybrid: Vec<Hybrid>,
}

impl EvaluationReport {
    pub fn strategy(&self, id: &str) -> Option<&StrategyReport> {
        self.strategies.iter().find(|s| s.id == id)
    }

    pub fn hybrid(&self, objective: Reduction) -> Option<&Hybrid> {
        self.hybrid.iter().find(|h| h.objective == objective)
    }
}

/// Ground-truth rankings, indexed `[domain][cell]`.
fn ground_truth_tiles(dataset: &Dataset, coords: &[TileCoord], tie_tol: f64) -> Result<Vec<Vec<Ranking>>> {
    dataset
        .domains()
        .par_iter()
        .map(|d| {
            coords
                .iter()
                .map(|&c| rank_from_scores(&dataset.domain_scores(d, &canonical_importance(c)), tie_tol))
                .collect()
        })
        .collect()
}

fn pairwise(truth: &[Vec<Ranking>], resolution: usize) -> Result<Baseline> {
    if truth.len() < 2 {
        return Err(Error::InvalidParams("baselines need at least 2 domains".into()));
    }
    let cells = resolution * resolution;
    let per_cell: Vec<(Option<f64>, Option<f64>)> = (0..cells)
        .into_par_iter()
        .map(|k| {
            let mut sum = 0.0;
            let mut count = 0usize;
            let mut min = f64::INFINITY;
            for i in 0..truth.len() {
                for j in i + 1..truth.len() {
                    if let Ok(t) = kendall_tau(&truth[i][k], &truth[j][k]) {
                        sum += t;
                        count += 1;
                        min = min.min(t);
                    }
                }
            }
            if count == 0 {
                (None, None)
            } else {
                (Some(sum / count as f64), Some(min))
            }
        })
        .collect();
    let (mean, min): (Vec<_>, Vec<_>) = per_cell.into_iter().unzip();
    Ok(Baseline {
        mean: TileGrid::from_cells(resolution, mean)?,
        min: TileGrid::from_cells(resolution, min)?,
    })
}

/// Domain-pair baselines: expected and worst-case τ between the
/// ground-truth rankings of two distinct domains.
pub fn baseline_pairwise(dataset: &Dataset, resolution: usize, tie_tol: f64) -> Result<Baseline> {
    let coords = make_grid(resolution)?;
    pairwise(&ground_truth_tiles(dataset, &coords, tie_tol)?, resolution)
}

fn hybrid(strategies: &[StrategyReport], objective: Reduction, resolution: usize) -> Result<Hybrid> {
    if strategies.is_empty() {
        return Err(Error::EmptyReport);
    }
    let named: Vec<(&str, &RealTile)> = strategies
        .iter()
        .map(|s| (s.id.as_str(), s.objective(objective)))
        .collect();
    let selection = argmax_tile(&named)?;
    let achieved = selection
        .cells()
        .iter()
        .enumerate()
        .map(|(k, id)| {
            id.as_deref().and_then(|id| {
                named
                    .iter()
                    .find(|(n, _)| *n == id)
                    .and_then(|(_, t)| t.cells()[k])
            })
        })
        .collect();
    let area_fractions = strategies
        .iter()
        .map(|s| (s.id.clone(), tile_area_fraction(&selection, &s.id)))
        .collect();
    Ok(Hybrid {
        objective,
        selection,
        achieved: TileGrid::from_cells(resolution, achieved)?,
        area_fractions,
    })
}

/// Best-strategy selection and the τ it achieves, per cell.
pub fn hybrid_select(report: &EvaluationReport, objective: Reduction) -> Result<(SelectionTile, RealTile)> {
    let h = hybrid(&report.strategies, objective, report.options.resolution)?;
    Ok((h.selection, h.achieved))
}

fn evaluate_strategy(
    dataset: &Dataset,
    strategy: &dyn Strategy,
    truth: &[Vec<Ranking>],
    coords: &[TileCoord],
    options: &EvalOptions,
    domain_weights: &[f64],
) -> Result<StrategyReport> {
    let resolution = options.resolution;
    let outcomes: Vec<(RealTile, Option<DomainFailure>)> = dataset
        .domains()
        .par_iter()
        .enumerate()
        .map(|(k, d)| {
            let bound = StrategyContext::leave_one_out(dataset, &d.id)
                .map(|ctx| ctx.with_tie_tol(options.tie_tol))
                .and_then(|ctx| {
                    let predictor = strategy.bind(&ctx)?;
                    let cells: Vec<std::result::Result<f64, Error>> = coords
                        .par_iter()
                        .zip(&truth[k])
                        .map(|(&c, gt)| predictor.predict_ranking(c).and_then(|r| kendall_tau(&r, gt)))
                        .collect();
                    Ok(cells)
                });
            let cells = match bound {
                Ok(cells) => cells,
                Err(e) => vec![Err(e); coords.len()],
            };
            let failed = cells.iter().filter(|c| c.is_err()).count();
            let failure = cells.iter().find_map(|c| c.as_ref().err()).map(|e| DomainFailure {
                domain: d.id.clone(),
                cells: failed,
                message: e.to_string(),
            });
            let tile = TileGrid::from_cells(resolution, cells.into_iter().map(|c| c.ok()).collect())?;
            Ok((tile, failure))
        })
        .collect::<Result<_>>()?;

    let mut per_domain = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for (d, (tile, failure)) in dataset.domains().iter().zip(outcomes) {
        per_domain.push((d.id.clone(), tile));
        failures.extend(failure);
    }
    let tiles: Vec<&RealTile> = per_domain.iter().map(|(_, t)| t).collect();
    let mean = if options.category_balanced_mean {
        let weighted: Vec<(&RealTile, f64)> = tiles.iter().copied().zip(domain_weights.iter().copied()).collect();
        reduce_tiles_weighted(&weighted)?
    } else {
        reduce_tiles(&tiles, Reduction::Mean)?
    };
    let min = reduce_tiles(&tiles, Reduction::Min)?;
    Ok(StrategyReport {
        id: strategy.id(),
        leave_one_out: strategy.is_leave_one_out(),
        per_domain,
        mean,
        min,
        failures,
    })
}

/// Runs the full leave-one-domain-out protocol.
///
/// Strategy failures never abort the report: they leave error cells in the
/// affected tiles and are listed in [`StrategyReport::failures`].
pub fn lodo_evaluate(dataset: &Dataset, strategies: &[&dyn Strategy], options: EvalOptions) -> Result<EvaluationReport> {
    if dataset.domains().len() < 2 {
        return Err(Error::InvalidParams("leave-one-domain-out needs at least 2 domains".into()));
    }
    if dataset.entities().len() < 2 {
        return Err(Error::TooFewEntities(dataset.entities().len()));
    }
    if strategies.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut ids: Vec<String> = strategies.iter().map(|s| s.id()).collect();
    ids.sort();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidParams(format!("strategy `{}` listed twice", w[0])));
    }
    let coords = make_grid(options.resolution)?;
    let truth = ground_truth_tiles(dataset, &coords, options.tie_tol)?;
    let domain_weights = cdnet_weights(dataset, None, None)?.values();

    let reports = strategies
        .iter()
        .map(|s| evaluate_strategy(dataset, *s, &truth, &coords, &options, &domain_weights))
        .collect::<Result<Vec<_>>>()?;
    let baseline = pairwise(&truth, options.resolution)?;
    let hybrid = Reduction::ALL
        .iter()
        .map(|&o| hybrid(&reports, o, options.resolution))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvaluationReport {
        options,
        dataset_hash: dataset.content_hash(),
        domains: dataset.domains().iter().map(|d| d.id.clone()).collect(),
        strategies: reports,
        baseline,
        hybrid,
    })
}

/// Image settings used when writing a report.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub colormap: Colormap,
    pub scale: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            colormap: Colormap::tau(),
            scale: 4,
        }
    }
}

#[derive(Serialize)]
struct ManifestStrategy<'a> {
    id: &'a str,
    dir: String,
    leave_one_out: bool,
    failures: &'a [DomainFailure],
}

#[derive(Serialize)]
struct ManifestHybrid<'a> {
    objective: &'a str,
    area_fractions: indexmap::IndexMap<&'a str, f64>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    resolution: usize,
    tie_tol: f64,
    category_balanced_mean: bool,
    dataset_hash: &'a str,
    colormap: &'a str,
    scale: usize,
    domains: &'a [String],
    strategies: Vec<ManifestStrategy<'a>>,
    hybrid: Vec<ManifestHybrid<'a>>,
    files: Vec<String>,
}

/// Fails unless `dir` is absent or empty, then creates it.
pub fn fresh_directory(dir: &Path) -> Result<()> {
    if dir.exists() {
        let mut entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        if entries.next().is_some() {
            return Err(Error::io(dir, "output directory is not empty"));
        }
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes the report as a directory of tile CSVs and PPM images plus
/// `manifest.json`:
///
/// ```text
/// <strategy>/<domain>.csv   <strategy>/mean.csv   <strategy>/min.csv
/// baseline/mean.csv         baseline/min.csv
/// hybrid/<objective>-selection.csv               hybrid/<objective>-achieved.csv
/// ```
///
/// Every aggregate tile also gets a `.ppm` rendering next to its CSV.
/// Returns the written paths, relative to `dir`.
pub fn write_report(report: &EvaluationReport, dir: &Path, render: &RenderOptions) -> Result<Vec<PathBuf>> {
    fresh_directory(dir)?;
    let mut written: Vec<PathBuf> = Vec::new();
    let mut put = |rel: PathBuf, bytes: Vec<u8>| -> Result<()> {
        let path = dir.join(&rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        written.push(rel);
        Ok(())
    };
    let csv = |t: &RealTile| crate::tile::to_csv_string(t).into_bytes();
    let ppm = |t: &RealTile| render_tile(t, &render.colormap, render.scale).to_ppm();

    let mut dirs: Vec<String> = Vec::new();
    for s in &report.strategies {
        let mut stem = file_stem(&s.id);
        if stem == "baseline" || stem == "hybrid" || dirs.contains(&stem) {
            stem = format!("{stem}_{}", dirs.len());
        }
        let root = PathBuf::from(&stem);
        for (domain, tile) in &s.per_domain {
            put(root.join(format!("{}.csv", file_stem(domain))), csv(tile))?;
        }
        for (name, tile) in [("mean", &s.mean), ("min", &s.min)] {
            put(root.join(format!("{name}.csv")), csv(tile))?;
            put(root.join(format!("{name}.ppm")), ppm(tile))?;
        }
        dirs.push(stem);
    }
    for (name, tile) in [("mean", &report.baseline.mean), ("min", &report.baseline.min)] {
        put(PathBuf::from("baseline").join(format!("{name}.csv")), csv(tile))?;
        put(PathBuf::from("baseline").join(format!("{name}.ppm")), ppm(tile))?;
    }
    let ids: Vec<String> = report.strategies.iter().map(|s| s.id.clone()).collect();
    for h in &report.hybrid {
        let o = h.objective.name();
        put(
            PathBuf::from("hybrid").join(format!("{o}-selection.csv")),
            crate::tile::to_csv_string(&h.selection).into_bytes(),
        )?;
        put(
            PathBuf::from("hybrid").join(format!("{o}-selection.ppm")),
            render_selection(&h.selection, &ids, render.scale).to_ppm(),
        )?;
        put(PathBuf::from("hybrid").join(format!("{o}-achieved.csv")), csv(&h.achieved))?;
        put(PathBuf::from("hybrid").join(format!("{o}-achieved.ppm")), ppm(&h.achieved))?;
    }

    let mut files: Vec<String> = written.iter().map(|p| p.to_string_lossy().replace('\\', "/")).collect();
    files.sort();
    let manifest = Manifest {
        resolution: report.options.resolution,
        tie_tol: report.options.tie_tol,
        category_balanced_mean: report.options.category_balanced_mean,
        dataset_hash: &report.dataset_hash,
        colormap: render.colormap.name(),
        scale: render.scale,
        domains: &report.domains,
        strategies: report
            .strategies
            .iter()
            .zip(&dirs)
            .map(|(s, d)| ManifestStrategy {
                id: &s.id,
                dir: d.clone(),
                leave_one_out: s.leave_one_out,
                failures: &s.failures,
            })
            .collect(),
        hybrid: report
            .hybrid
            .iter()
            .map(|h| ManifestHybrid {
                objective: h.objective.name(),
                area_fractions: h.area_fractions.iter().map(|(id, f)| (id.as_str(), *f)).collect(),
            })
            .collect(),
        files,
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    let path = dir.join("manifest.json");
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    written.push(PathBuf::from("manifest.json"));
    Ok(written)
}

/// Writes the baseline tiles (`mean.csv`, `min.csv` and their renderings).
pub fn write_baseline(baseline: &Baseline, dir: &Path, render: &RenderOptions) -> Result<()> {
    fresh_directory(dir)?;
    for (name, tile) in [("mean", &baseline.mean), ("min", &baseline.min)] {
        save_csv(tile, &dir.join(format!("{name}.csv")))?;
        render_tile(tile, &render.colormap, render.scale).save(&dir.join(format!("{name}.ppm")))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{synth_dataset, SynthParams};
    use crate::strategy::StrategySpec;

    #[test]
    fn ground_truth_examples() {
        let ds = Dataset::from_json(
            r#"{"entities": ["good", "bad", "twin"], "domains": [
                {"id": "d", "category": "c", "semantic": {"s": 1},
                 "performances": {"good": [0.45, 0.05, 0.05, 0.45], "bad": [0.25, 0.25, 0.25, 0.25], "twin": [0.25, 0.25, 0.25, 0.25]}}
            ]}"#,
        )
        .unwrap();
        let r = ground_truth_ranking(&ds, "d", TileCoord { a: 0.5, b: 0.5 }, 0.0).unwrap();
        assert_eq!(r.ranks(), &[1, 2, 2]);
        assert!(ground_truth_ranking(&ds, "nope", TileCoord { a: 0.5, b: 0.5 }, 0.0).is_err());
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let ds = synth_dataset(SynthParams { domains: 1, categories: 1, ..SynthParams::default() }).unwrap();
        let s = StrategySpec::parse_list("mean-V").unwrap();
        let refs: Vec<&dyn Strategy> = s.iter().map(|s| s as &dyn Strategy).collect();
        assert!(lodo_evaluate(&ds, &refs, EvalOptions::default()).is_err());
        let ds = synth_dataset(SynthParams::default()).unwrap();
        let dup = StrategySpec::parse_list("mean-V,mean-V").unwrap();
        let refs: Vec<&dyn Strategy> = dup.iter().map(|s| s as &dyn Strategy).collect();
        assert!(lodo_evaluate(&ds, &refs, EvalOptions { resolution: 3, ..EvalOptions::default() }).is_err());
        assert_eq!(lodo_evaluate(&ds, &[], EvalOptions::default()), Err(Error::EmptyReport));
    }

    #[test]
    fn unavailable_strategy_leaves_error_tiles() {
        let mut ds = synth_dataset(SynthParams { seed: 9, ..SynthParams::default() }).unwrap();
        ds = Dataset::new(
            ds.entities().clone(),
            ds.domains().iter().cloned().map(|mut d| {
                d.conditionals = None;
                d
            }).collect(),
            None,
            Default::default(),
        )
        .unwrap();
        let specs = StrategySpec::parse_list("sem-P,mean-V,fixed").unwrap();
        let refs: Vec<&dyn Strategy> = specs.iter().map(|s| s as &dyn Strategy).collect();
        let report = lodo_evaluate(&ds, &refs, EvalOptions { resolution: 3, ..EvalOptions::default() }).unwrap();
        let sem = report.strategy("sem-P").unwrap();
        assert!(sem.mean.cells().iter().all(Option::is_none));
        assert_eq!(sem.failures.len(), ds.domains().len());
        assert_eq!(report.strategy("fixed").unwrap().failures.len(), ds.domains().len());
        let mean = report.hybrid(Reduction::Mean).unwrap();
        assert!(mean.selection.cells().iter().all(|c| c.as_deref() == Some("mean-V")));
    }
}
