use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use proxeval_cli::batch::{run_batch, run_overlays, summarize_results, RunConfig};
use proxeval_cli::fixtures::{read_specs, synthetic_suite, write_suite};
use proxeval_core::geometry::SolarDiskGeometry;
use proxeval_core::metrics::Aggregation;
use proxeval_core::regions::{MaskStage, PipelineParams, WestDirection};

#[derive(Parser)]
#[command(
    name = "proxeval",
    version,
    about = "Score attribution maps against active-region positions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every manifest row and write results, summary and region dumps.
    Evaluate(EvaluateArgs),
    /// Render overlay PNGs only.
    Overlay(RunArgs),
    /// Generate synthetic inputs with known outcome bounds.
    Fixtures(FixturesArgs),
    /// Recompute summary.csv and boxplot.csv from results.jsonl.
    Summarize(SummarizeArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    catalog: PathBuf,
    #[arg(long, env = "PROXEVAL_OUT", default_value = "proxeval-out")]
    out: PathBuf,
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Geometry JSON for rows without their own.
    #[arg(long)]
    default_geometry: Option<PathBuf>,
    /// Catalog records within this many hours of an image are used.
    #[arg(long, default_value_t = 2.0)]
    match_tolerance_hours: f64,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_enum, default_value_t = AggregationArg::Macro)]
    aggregation: AggregationArg,
    /// Also write overlays/<image_id>.png.
    #[arg(long)]
    overlays: bool,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, alias = "lower_threshold", default_value_t = 30.0)]
    lower_threshold: f64,
    #[arg(long, alias = "upper_threshold", default_value_t = 50.0)]
    upper_threshold: f64,
    #[arg(long, alias = "min_samples", default_value_t = 2)]
    min_samples: usize,
    #[arg(long, alias = "max_dist", default_value_t = 10.0)]
    max_dist: f64,
    #[arg(long, alias = "eastward_buffer", default_value_t = 5.0)]
    eastward_buffer: f64,
    #[arg(long, alias = "westward_buffer", default_value_t = 40.0)]
    westward_buffer: f64,
    #[arg(long, alias = "target_size", default_value_t = 512)]
    target_size: usize,
    #[arg(long, alias = "scale_to", default_value_t = 255)]
    scale_to: u8,
    #[arg(long, value_enum, default_value_t = MaskStageArg::Edges)]
    mask_stage: MaskStageArg,
    #[arg(long, value_enum, default_value_t = WestArg::ImageRight)]
    west_direction: WestArg,
}

#[derive(Args)]
struct FixturesArgs {
    /// JSON array of fixture specs.
    #[arg(long, conflicts_with = "suite", required_unless_present = "suite")]
    spec: Option<PathBuf>,
    /// Generate a mixed suite of this many images instead.
    #[arg(long)]
    suite: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "PROXEVAL_OUT", default_value = "proxeval-out")]
    out: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct SummarizeArgs {
    #[arg(long)]
    results: PathBuf,
    #[arg(long, env = "PROXEVAL_OUT", default_value = "proxeval-out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = AggregationArg::Macro)]
    aggregation: AggregationArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum AggregationArg {
    Macro,
    Pooled,
}

#[derive(Clone, Copy, ValueEnum)]
enum MaskStageArg {
    Edges,
    Regions,
}

#[derive(Clone, Copy, ValueEnum)]
enum WestArg {
    ImageRight,
    ImageLeft,
}

impl From<AggregationArg> for Aggregation {
    fn from(a: AggregationArg) -> Self {
        match a {
            AggregationArg::Macro => Aggregation::Macro,
            AggregationArg::Pooled => Aggregation::Pooled,
        }
    }
}

impl ParamArgs {
    fn to_params(&self) -> PipelineParams {
        PipelineParams {
            lower_threshold: self.lower_threshold,
            upper_threshold: self.upper_threshold,
            min_samples: self.min_samples,
            max_dist: self.max_dist,
            eastward_buffer: self.eastward_buffer,
            westward_buffer: self.westward_buffer,
            target_size: self.target_size,
            scale_to: self.scale_to,
            mask_stage: match self.mask_stage {
                MaskStageArg::Edges => MaskStage::Edges,
                MaskStageArg::Regions => MaskStage::Regions,
            },
            west_direction: match self.west_direction {
                WestArg::ImageRight => WestDirection::ImageRight,
                WestArg::ImageLeft => WestDirection::ImageLeft,
            },
        }
    }
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::new(&self.manifest, &self.catalog, &self.out);
        cfg.params = self.params.to_params();
        cfg.workers = self.workers;
        if !(self.match_tolerance_hours.is_finite() && self.match_tolerance_hours >= 0.0) {
            anyhow::bail!("--match-tolerance-hours must be a non-negative number");
        }
        cfg.match_tolerance = chrono::Duration::milliseconds(
            (self.match_tolerance_hours * 3_600_000.0).round() as i64,
        );
        if let Some(p) = &self.default_geometry {
            cfg.default_geometry = proxeval_core::ingest::load_geometry(p)?;
        } else {
            cfg.default_geometry = SolarDiskGeometry::default();
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evaluate(a) => {
            let mut cfg = a.run.config()?;
            cfg.aggregation = a.aggregation.into();
            cfg.overlays = a.overlays;
            let report = run_batch(&cfg)?;
            let flagged = report
                .outcomes
                .iter()
                .filter(|o| o.evaluation.is_flagged())
                .count();
            eprintln!(
                "evaluated {} images ({} flagged) into {}",
                report.outcomes.len(),
                flagged,
                cfg.out_dir.display()
            );
        }
        Command::Overlay(a) => {
            let cfg = a.config()?;
            let n = run_overlays(&cfg)?;
            eprintln!(
                "wrote {n} overlays into {}",
                cfg.out_dir.join("overlays").display()
            );
        }
        Command::Fixtures(a) => {
            let params = a.params.to_params();
            params.validate()?;
            let specs = match (&a.spec, a.suite) {
                (Some(p), _) => read_specs(p)?,
                (None, Some(n)) => synthetic_suite(n, a.seed),
                (None, None) => unreachable!("clap requires one of --spec/--suite"),
            };
            let paths = write_suite(&specs, &params, &a.out).context("writing fixtures")?;
            println!("{}", paths.manifest.display());
            println!("{}", paths.catalog.display());
            println!("{}", paths.expectations.display());
        }
        Command::Summarize(a) => {
            summarize_results(&a.results, &a.out, a.aggregation.into())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
