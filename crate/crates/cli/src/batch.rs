//! Batch evaluation over a manifest.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::Duration;
use rayon::prelude::*;

use proxeval_core::geometry::SolarDiskGeometry;
use proxeval_core::imageproc::{normalize_scale, resize, GrayscaleImage};
use proxeval_core::ingest::{
    load_attribution, load_catalog, load_geometry, load_manifest, match_catalog, Catalog,
    CatalogMatch, ManifestEntry,
};
use proxeval_core::metrics::{
    categorize, evaluate_image, summarize, Aggregation, CategorySummary, ImageEvaluation,
};
use proxeval_core::regions::{extract_regions, PipelineParams, RegionExtraction};

use crate::overlay::render_overlay;
use crate::report::{self, file_stem_for};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub manifest: PathBuf,
    pub catalog: PathBuf,
    pub out_dir: PathBuf,
    pub params: PipelineParams,
    /// Used for manifest rows without a geometry sidecar.
    pub default_geometry: SolarDiskGeometry,
    pub workers: usize,
    pub overlays: bool,
    pub match_tolerance: Duration,
    pub aggregation: Aggregation,
}

impl RunConfig {
    pub fn new(
        manifest: impl Into<PathBuf>,
        catalog: impl Into<PathBuf>,
        out_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            manifest: manifest.into(),
            catalog: catalog.into(),
            out_dir: out_dir.into(),
            params: PipelineParams::default(),
            default_geometry: SolarDiskGeometry::default(),
            workers: 1,
            overlays: false,
            match_tolerance: Duration::hours(2),
            aggregation: Aggregation::Macro,
        }
    }
}

/// Everything computed for one manifest row.
#[derive(Debug, Clone)]
pub struct ImageOutcome {
    pub evaluation: ImageEvaluation,
    pub extraction: RegionExtraction,
    pub matched: CatalogMatch,
    pub geometry: SolarDiskGeometry,
}

#[derive(Debug, Clone)]
pub struct BatchReport {
    pub outcomes: Vec<ImageOutcome>,
    pub summary: Vec<CategorySummary>,
}

impl BatchReport {
    pub fn evaluations(&self) -> Vec<ImageEvaluation> {
        self.outcomes.iter().map(|o| o.evaluation.clone()).collect()
    }
}

fn entry_geometry(entry: &ManifestEntry, default: &SolarDiskGeometry) -> Result<SolarDiskGeometry> {
    match &entry.geometry_path {
        Some(p) => Ok(load_geometry(p)?),
        None => Ok(*default),
    }
}

/// Runs the per-image pipeline for one manifest row. Pure apart from reading
/// the row's input files.
pub fn evaluate_entry(
    entry: &ManifestEntry,
    catalog: &Catalog,
    cfg: &RunConfig,
) -> Result<ImageOutcome> {
    let am = load_attribution(&entry.attribution_path, None)?;
    let geometry =
        entry_geometry(entry, &cfg.default_geometry)?.rescaled(cfg.params.target_size as u32);
    let extraction = extract_regions(&am, &cfg.params, &geometry);
    let matched = match_catalog(catalog, entry.timestamp, cfg.match_tolerance, &geometry);
    let mut evaluation = evaluate_image(
        entry.image_id.clone(),
        categorize(entry.predicted_flare, entry.observed_flare),
        &matched.on_disk_ars(),
        &extraction.regions,
    );
    evaluation.off_disk_ars = matched.off_disk_ars();
    Ok(ImageOutcome {
        evaluation,
        extraction,
        matched,
        geometry,
    })
}

fn load_magnetogram(path: &Path, size: usize) -> Result<GrayscaleImage> {
    let raw =
        load_attribution(path, None).with_context(|| format!("magnetogram {}", path.display()))?;
    Ok(resize(&normalize_scale(&raw, 255), size))
}

/// Renders the overlay PNG for one row.
pub fn write_overlay(
    entry: &ManifestEntry,
    outcome: &ImageOutcome,
    cfg: &RunConfig,
    path: &Path,
) -> Result<()> {
    let am = load_attribution(&entry.attribution_path, None)?;
    let gray = resize(
        &normalize_scale(&am, cfg.params.scale_to),
        cfg.params.target_size,
    );
    let mag = entry
        .magnetogram_path
        .as_deref()
        .map(|p| load_magnetogram(p, cfg.params.target_size))
        .transpose()?;
    let ars: Vec<_> = outcome
        .matched
        .on_disk_ars()
        .iter()
        .map(|a| a.pixel)
        .collect();
    let flares: Vec<_> = outcome
        .matched
        .flares
        .iter()
        .filter(|f| !f.off_disk)
        .map(|f| f.pixel)
        .collect();
    let img = render_overlay(
        mag.as_ref(),
        &gray,
        &outcome.extraction.regions,
        &ars,
        &flares,
    )?;
    img.save(path)
        .with_context(|| format!("writing {}", path.display()))
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .context("building worker pool")
}

/// Evaluates every manifest row and writes `results.jsonl`, `summary.csv`,
/// `boxplot.csv` and `regions/<image_id>.json` (plus `overlays/` when
/// enabled) under `cfg.out_dir`.
///
/// Images that end up flagged are ordinary results. Only unreadable inputs,
/// invalid configuration or unwritable outputs are errors.
pub fn run_batch(cfg: &RunConfig) -> Result<BatchReport> {
    cfg.params.validate()?;
    cfg.default_geometry.validate()?;
    let manifest = load_manifest(&cfg.manifest)?;
    let catalog = load_catalog(&cfg.catalog)?;

    let regions_dir = cfg.out_dir.join("regions");
    fs::create_dir_all(&regions_dir)
        .with_context(|| format!("creating {}", regions_dir.display()))?;
    let overlay_dir = cfg.out_dir.join("overlays");
    if cfg.overlays {
        fs::create_dir_all(&overlay_dir)
            .with_context(|| format!("creating {}", overlay_dir.display()))?;
    }

    let pool = thread_pool(cfg.workers)?;
    let results: Vec<Result<(usize, ImageOutcome)>> = pool.install(|| {
        manifest
            .entries
            .par_iter()
            .enumerate()
            .map(|(i, entry)| {
                let outcome = evaluate_entry(entry, &catalog, cfg)
                    .with_context(|| format!("image {}", entry.image_id))?;
                if cfg.overlays {
                    let path = overlay_dir.join(format!("{}.png", file_stem_for(&entry.image_id)));
                    write_overlay(entry, &outcome, cfg, &path)?;
                }
                Ok((i, outcome))
            })
            .collect()
    });
    let mut outcomes = Vec::with_capacity(results.len());
    for r in results {
        outcomes.push(r?);
    }
    outcomes.sort_by(|a, b| a.1.evaluation.image_id.cmp(&b.1.evaluation.image_id));
    let outcomes: Vec<ImageOutcome> = outcomes.into_iter().map(|(_, o)| o).collect();

    for o in &outcomes {
        let path = regions_dir.join(format!("{}.json", file_stem_for(&o.evaluation.image_id)));
        report::write_regions(&path, &o.extraction.regions)?;
    }
    let evals: Vec<ImageEvaluation> = outcomes.iter().map(|o| o.evaluation.clone()).collect();
    let summary = summarize(&evals, cfg.aggregation);
    report::write_results(&cfg.out_dir.join(report::RESULTS_FILE), &evals)?;
    report::write_summary(&cfg.out_dir.join(report::SUMMARY_FILE), &summary)?;
    report::write_boxplot(&cfg.out_dir.join(report::BOXPLOT_FILE), &evals)?;
    Ok(BatchReport { outcomes, summary })
}

/// Recomputes `summary.csv` and `boxplot.csv` from an existing
/// `results.jsonl`.
pub fn summarize_results(
    results: &Path,
    out_dir: &Path,
    aggregation: Aggregation,
) -> Result<Vec<CategorySummary>> {
    let evals = report::read_results(results)?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let summary = summarize(&evals, aggregation);
    report::write_summary(&out_dir.join(report::SUMMARY_FILE), &summary)?;
    report::write_boxplot(&out_dir.join(report::BOXPLOT_FILE), &evals)?;
    Ok(summary)
}

/// Writes overlays only.
pub fn run_overlays(cfg: &RunConfig) -> Result<usize> {
    cfg.params.validate()?;
    let manifest = load_manifest(&cfg.manifest)?;
    let catalog = load_catalog(&cfg.catalog)?;
    let dir = cfg.out_dir.join("overlays");
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let pool = thread_pool(cfg.workers)?;
    pool.install(|| {
        manifest.entries.par_iter().try_for_each(|entry| {
            let outcome = evaluate_entry(entry, &catalog, cfg)?;
            write_overlay(
                entry,
                &outcome,
                cfg,
                &dir.join(format!("{}.png", file_stem_for(&entry.image_id))),
            )
        })
    })?;
    Ok(manifest.len())
}
