//! The `tilerank` command line.
//!
//! Exit status: 0 on success, 1 on data or I/O errors, 2 on usage errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::dataset::{load_dataset, save_dataset, synth_dataset, SynthParams};
use crate::error::{Error, Result};
use crate::harness::{baseline_pairwise, lodo_evaluate, write_baseline, write_report, EvalOptions, RenderOptions};
use crate::perf::TileCoord;
use crate::render::{export_rank_layers, render_selection, render_tile, Colormap, LayerSource};
use crate::strategy::{Strategy, StrategyContext, StrategySpec};
use crate::tile::{format_real, read_csv, Reduction, RealTile, SelectionTile, DEFAULT_RESOLUTION};

#[derive(Debug, Parser)]
#[command(name = "tilerank", version, about = "Predict and evaluate performance-based rankings across the Tile")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Leave-one-domain-out evaluation written as a report directory.
    Evaluate(EvaluateArgs),
    /// Domain-pair baseline tiles.
    Baselines(BaselinesArgs),
    /// Predicted ranking of one domain at one Tile point.
    Predict(PredictArgs),
    /// Render a tile CSV to a PPM or PNG image.
    Render(RenderArgs),
    /// Per-entity rank layers of one domain.
    Layers(LayersArgs),
    /// Generate a synthetic dataset.
    Synth(SynthArgs),
    /// Load and validate a dataset.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct ImageArgs {
    /// `tau`, `gray` or `value:RRGGBB,...`.
    #[arg(long, default_value = "tau")]
    colormap: String,
    /// Pixels per cell side.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    scale: u32,
}

impl ImageArgs {
    fn options(&self) -> Result<RenderOptions> {
        Ok(RenderOptions {
            colormap: Colormap::by_name(&self.colormap)?,
            scale: self.scale as usize,
        })
    }
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Comma-separated strategy specifications.
    #[arg(long)]
    strategies: String,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    tie_tol: f64,
    /// Average domains with equal weight per category.
    #[arg(long)]
    category_balanced_mean: bool,
    /// Only summarize this hybrid objective.
    #[arg(long)]
    objective: Option<Reduction>,
    #[command(flatten)]
    image: ImageArgs,
}

#[derive(Debug, Args)]
struct BaselinesArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    tie_tol: f64,
    #[command(flatten)]
    image: ImageArgs,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    domain: String,
    #[arg(long, alias = "strategies")]
    strategy: String,
    /// Tile point `a,b`.
    #[arg(long)]
    coord: TileCoord,
    #[arg(long, default_value_t = 0.0)]
    tie_tol: f64,
}

#[derive(Debug, Args)]
struct RenderArgs {
    /// Tile CSV, real-valued or a strategy selection.
    #[arg(long)]
    input: PathBuf,
    /// Image path; `.png` selects PNG, anything else PPM.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    image: ImageArgs,
}

#[derive(Debug, Args)]
struct LayersArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    domain: String,
    /// Predict with this strategy instead of using the ground truth.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    tie_tol: f64,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 5)]
    domains: usize,
    #[arg(long, default_value_t = 10)]
    entities: usize,
    #[arg(long, default_value_t = 2)]
    categories: usize,
    #[arg(long, default_value_t = 3)]
    labels: usize,
    #[arg(long, default_value_t = 0.5)]
    drift: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    dataset: PathBuf,
}

fn single_strategy(text: &str) -> Result<StrategySpec> {
    let mut list = StrategySpec::parse_list(text)?;
    if list.len() != 1 {
        return Err(Error::StrategySpec {
            spec: text.into(),
            reason: "expected exactly one strategy".into(),
        });
    }
    Ok(list.remove(0))
}

fn evaluate(args: EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let ds = load_dataset(&args.dataset)?;
    let specs = StrategySpec::parse_list(&args.strategies)?;
    let render = args.image.options()?;
    let refs: Vec<&dyn Strategy> = specs.iter().map(|s| s as &dyn Strategy).collect();
    let options = EvalOptions {
        resolution: args.resolution,
        tie_tol: args.tie_tol,
        category_balanced_mean: args.category_balanced_mean,
    };
    let report = lodo_evaluate(&ds, &refs, options)?;
    write_report(&report, &args.out, &render)?;
    let _ = writeln!(out, "strategy,mean_tau,min_tau,failures");
    for s in &report.strategies {
        let avg = |t: &RealTile| {
            let v: Vec<f64> = t.cells().iter().flatten().copied().collect();
            if v.is_empty() {
                "error".to_string()
            } else {
                format!("{:.4}", v.iter().sum::<f64>() / v.len() as f64)
            }
        };
        let _ = writeln!(out, "{},{},{},{}", s.id, avg(&s.mean), avg(&s.min), s.failures.len());
    }
    for h in &report.hybrid {
        if args.objective.is_some_and(|o| o != h.objective) {
            continue;
        }
        let parts: Vec<String> = h
            .area_fractions
            .iter()
            .filter(|(_, f)| *f > 0.0)
            .map(|(id, f)| format!("{id}={:.1}%", 100.0 * f))
            .collect();
        let _ = writeln!(out, "hybrid-{}: {}", h.objective, parts.join(" "));
    }
    Ok(())
}

fn predict(args: PredictArgs, out: &mut dyn Write) -> Result<()> {
    let ds = load_dataset(&args.dataset)?;
    let spec = single_strategy(&args.strategy)?;
    let ctx = StrategyContext::leave_one_out(&ds, &args.domain)?.with_tie_tol(args.tie_tol);
    let predictor = spec.bind(&ctx)?;
    let ranking = predictor.predict_ranking(args.coord)?;
    let values = predictor.predict_values(args.coord).ok();
    let _ = writeln!(out, "rank,entity,value");
    for k in ranking.order() {
        let value = values
            .as_ref()
            .and_then(|v| v.values()[k])
            .map_or_else(|| "error".to_string(), format_real);
        let _ = writeln!(out, "{},{},{}", ranking.ranks()[k], ds.entities()[k], value);
    }
    Ok(())
}

fn render(args: RenderArgs) -> Result<()> {
    let options = args.image.options()?;
    let text = std::fs::read_to_string(&args.input).map_err(|e| Error::io(&args.input, e))?;
    let raster = match read_csv::<Option<f64>, _>(text.as_bytes()) {
        Ok(tile) => render_tile(&tile, &options.colormap, options.scale),
        Err(real_err) => {
            let tile: SelectionTile = read_csv(text.as_bytes()).map_err(|_| real_err)?;
            let mut ids: Vec<String> = tile.cells().iter().flatten().cloned().collect();
            ids.sort();
            ids.dedup();
            render_selection(&tile, &ids, options.scale)
        }
    };
    raster.save(&args.out)
}

fn layers(args: LayersArgs) -> Result<()> {
    let ds = load_dataset(&args.dataset)?;
    let spec = args.strategy.as_deref().map(single_strategy).transpose()?;
    let source = match &spec {
        Some(s) => LayerSource::Strategy(s),
        None => LayerSource::GroundTruth,
    };
    export_rank_layers(&ds, &args.domain, source, args.resolution, args.tie_tol, &args.out)?;
    Ok(())
}

fn synth(args: SynthArgs, out: &mut dyn Write) -> Result<()> {
    let ds = synth_dataset(SynthParams {
        domains: args.domains,
        entities: args.entities,
        categories: args.categories,
        labels: args.labels,
        drift: args.drift,
        seed: args.seed,
    })?;
    match args.out {
        Some(path) => save_dataset(&ds, &path),
        None => {
            let _ = out.write_all(ds.to_json().as_bytes());
            Ok(())
        }
    }
}

fn validate(args: ValidateArgs, out: &mut dyn Write) -> Result<()> {
    let ds = load_dataset(&args.dataset)?;
    let _ = writeln!(
        out,
        "ok: {} entities, {} domains, {} categories, global ranking {}, conditionals {}",
        ds.entities().len(),
        ds.domains().len(),
        ds.categories().len(),
        if ds.global_ranking().is_some() { "yes" } else { "no" },
        if ds.has_conditionals() { "yes" } else { "no" },
    );
    let _ = writeln!(out, "sha256: {}", ds.content_hash());
    Ok(())
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render();
            if e.use_stderr() {
                let _ = write!(err, "{}", text.ansi());
            } else {
                let _ = write!(out, "{text}");
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    let result = match cli.command {
        Command::Evaluate(a) => evaluate(a, out),
        Command::Baselines(a) => (|| {
            let ds = load_dataset(&a.dataset)?;
            let baseline = baseline_pairwise(&ds, a.resolution, a.tie_tol)?;
            write_baseline(&baseline, &a.out, &a.image.options()?)
        })(),
        Command::Predict(a) => predict(a, out),
        Command::Render(a) => render(a),
        Command::Layers(a) => layers(a),
        Command::Synth(a) => synth(a, out),
        Command::Validate(a) => validate(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

/// Entry point used by the binary.
pub fn main_with_env_args() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("tilerank").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&[]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["predict", "--coord", "2,0"]).0, 2);
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("evaluate"));
    }

    #[test]
    fn data_errors_exit_one() {
        let (code, _, err) = call(&["validate", "--dataset", "/nonexistent/x.json"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn synth_to_stdout_round_trips() {
        let (code, out, _) = call(&["synth", "--domains", "3", "--entities", "4", "--seed", "3"]);
        assert_eq!(code, 0);
        let ds = crate::dataset::Dataset::from_json(&out).unwrap();
        assert_eq!(ds.domains().len(), 3);
    }
}
