//! Synthetic evaluation fixtures with analytically bounded outcomes.
//!
//! A fixture is a sum of Gaussian blobs on a full-disk frame plus a list of
//! active regions given in pixels. Each blob produces a ring of edges near
//! one sigma from its centre, so its final region always contains the centre
//! and never reaches further than two sigma (plus the rotation buffers and a
//! small allowance for smoothing) from it. Those two facts bound PS and ACR
//! without running the pipeline.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use proxeval_core::geometry::{pixel_to_hpc, PixelPoint, SolarDiskGeometry};
use proxeval_core::imageproc::AttributionMap;
use proxeval_core::ingest::save_raw_f32;
use proxeval_core::metrics::EvalFlag;
use proxeval_core::regions::{BoundingBox, PipelineParams, WestDirection};

use crate::report::file_stem_for;

/// Extra reach allowed beyond two sigma for smoothing and discretisation.
pub const EDGE_SLACK_PX: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Blob {
    pub x: f64,
    pub y: f64,
    pub sigma: f64,
    #[serde(default = "unit_peak")]
    pub peak: f64,
}

fn unit_peak() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixtureAr {
    pub noaa_ar: u32,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub image_id: String,
    #[serde(default)]
    pub geometry: SolarDiskGeometry,
    pub blobs: Vec<Blob>,
    pub ars: Vec<FixtureAr>,
    pub timestamp: DateTime<Utc>,
    #[serde(default)]
    pub predicted_flare: bool,
    #[serde(default)]
    pub observed_flare: bool,
}

/// What the pipeline must report for a fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub image_id: String,
    pub flags: Vec<EvalFlag>,
    pub ps_min: Option<f64>,
    pub ps_max: Option<f64>,
    pub acr_min: Option<f64>,
    pub acr_max: Option<f64>,
}

impl Expectation {
    /// Checks a result against the bounds, with `tol` slack on PS.
    pub fn admits(&self, flags: &[EvalFlag], ps: Option<f64>, acr: Option<f64>, tol: f64) -> bool {
        if !self.flags.is_empty() || !flags.is_empty() {
            let mut a = self.flags.clone();
            let mut b = flags.to_vec();
            a.sort();
            b.sort();
            return a == b && ps.is_none() && acr.is_none();
        }
        let within = |v: Option<f64>, lo: Option<f64>, hi: Option<f64>, t: f64| match (v, lo, hi) {
            (Some(v), Some(lo), Some(hi)) => v >= lo - t && v <= hi + t,
            _ => false,
        };
        within(ps, self.ps_min, self.ps_max, tol) && within(acr, self.acr_min, self.acr_max, 1e-12)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogRow {
    pub kind: String,
    pub timestamp: String,
    pub hpcx_arcsec: f64,
    pub hpcy_arcsec: f64,
    pub noaa_ar: Option<u32>,
    pub flare_class: Option<String>,
}

#[derive(Debug, Clone)]
pub struct FixtureOutput {
    pub attribution_path: PathBuf,
    pub geometry_path: PathBuf,
    pub catalog_rows: Vec<CatalogRow>,
    pub expectation: Expectation,
}

pub fn render_blobs(size: usize, blobs: &[Blob]) -> AttributionMap {
    AttributionMap::from_fn(size, size, |x, y| {
        blobs
            .iter()
            .map(|b| {
                let d2 = (x as f64 - b.x).powi(2) + (y as f64 - b.y).powi(2);
                b.peak * (-d2 / (2.0 * b.sigma * b.sigma)).exp()
            })
            .sum()
    })
    .expect("finite blob sum")
}

fn outer_box(b: &Blob, params: &PipelineParams) -> BoundingBox {
    let reach = 2.0 * b.sigma + EDGE_SLACK_PX;
    let (left, right) = match params.west_direction {
        WestDirection::ImageRight => (params.eastward_buffer, params.westward_buffer),
        WestDirection::ImageLeft => (params.westward_buffer, params.eastward_buffer),
    };
    BoundingBox::new(
        b.x - reach - left,
        b.y - reach,
        b.x + reach + right,
        b.y + reach,
    )
}

fn box_gap(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let dx = (a.min_x - b.max_x).max(b.min_x - a.max_x).max(0.0);
    let dy = (a.min_y - b.max_y).max(b.min_y - a.max_y).max(0.0);
    dx.hypot(dy)
}

/// Largest boxes any region could occupy: per-blob outer boxes, unioned while
/// any two are within the merge distance.
fn outer_envelopes(blobs: &[Blob], params: &PipelineParams) -> Vec<BoundingBox> {
    let mut boxes: Vec<BoundingBox> = blobs.iter().map(|b| outer_box(b, params)).collect();
    'again: loop {
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if box_gap(&boxes[i], &boxes[j]) <= params.max_dist {
                    let b = boxes.remove(j);
                    let a = &mut boxes[i];
                    *a = BoundingBox::new(
                        a.min_x.min(b.min_x),
                        a.min_y.min(b.min_y),
                        a.max_x.max(b.max_x),
                        a.max_y.max(b.max_y),
                    );
                    continue 'again;
                }
            }
        }
        return boxes;
    }
}

/// Bounds on PS and ACR implied by blob and AR placement.
pub fn expected_outcome(spec: &FixtureSpec, params: &PipelineParams) -> Expectation {
    let g = spec.geometry.rescaled(params.target_size as u32);
    let scale = f64::from(g.image_size) / f64::from(spec.geometry.image_size);
    let blobs: Vec<Blob> = spec
        .blobs
        .iter()
        .map(|b| Blob {
            x: b.x * scale,
            y: b.y * scale,
            sigma: b.sigma * scale,
            peak: b.peak,
        })
        .collect();
    let ars: Vec<PixelPoint> = spec
        .ars
        .iter()
        .map(|a| PixelPoint::new(a.x * scale, a.y * scale))
        .filter(|p| g.contains(*p))
        .collect();

    let mut flags = Vec::new();
    if blobs.is_empty() {
        flags.push(EvalFlag::NoRegions);
    }
    if ars.is_empty() {
        flags.push(EvalFlag::NoArs);
    }
    if !flags.is_empty() {
        return Expectation {
            image_id: spec.image_id.clone(),
            flags,
            ps_min: None,
            ps_max: None,
            acr_min: None,
            acr_max: None,
        };
    }

    let envelopes = outer_envelopes(&blobs, params);
    let n = ars.len() as f64;
    let upper: Vec<f64> = ars
        .iter()
        .map(|a| {
            blobs
                .iter()
                .map(|b| a.distance(PixelPoint::new(b.x, b.y)))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let lower: Vec<f64> = ars
        .iter()
        .map(|a| {
            envelopes
                .iter()
                .map(|e| e.distance(*a))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Expectation {
        image_id: spec.image_id.clone(),
        flags,
        ps_min: Some(lower.iter().sum::<f64>() / n),
        ps_max: Some(upper.iter().sum::<f64>() / n),
        acr_min: Some(upper.iter().filter(|&&d| d == 0.0).count() as f64 / n),
        acr_max: Some(lower.iter().filter(|&&d| d == 0.0).count() as f64 / n),
    }
}

fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

/// Writes `attributions/<id>.f32` (+ sidecar) and `geometry/<id>.json` under
/// `dir` and returns the catalog rows and expectation for the fixture.
pub fn generate_fixture(
    spec: &FixtureSpec,
    params: &PipelineParams,
    dir: &Path,
) -> Result<FixtureOutput> {
    let g = spec.geometry;
    g.validate()?;
    for b in &spec.blobs {
        if !(b.sigma > 0.0 && b.peak > 0.0 && b.sigma.is_finite() && b.peak.is_finite()) {
            bail!(
                "{}: blob at ({}, {}) needs positive sigma and peak",
                spec.image_id,
                b.x,
                b.y
            );
        }
        if !g.contains(PixelPoint::new(b.x, b.y)) {
            bail!(
                "{}: blob centre ({}, {}) is off the disk",
                spec.image_id,
                b.x,
                b.y
            );
        }
    }
    let stem = file_stem_for(&spec.image_id);
    let attr_dir = dir.join("attributions");
    let geom_dir = dir.join("geometry");
    for d in [&attr_dir, &geom_dir] {
        fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    let attribution_path = attr_dir.join(format!("{stem}.f32"));
    save_raw_f32(
        &attribution_path,
        &render_blobs(g.image_size as usize, &spec.blobs),
    )?;
    let geometry_path = geom_dir.join(format!("{stem}.json"));
    fs::write(&geometry_path, serde_json::to_string_pretty(&g)?)
        .with_context(|| format!("writing {}", geometry_path.display()))?;

    let catalog_rows = spec
        .ars
        .iter()
        .map(|a| {
            let hpc = pixel_to_hpc(PixelPoint::new(a.x, a.y), &g);
            CatalogRow {
                kind: "AR".into(),
                timestamp: format_timestamp(&spec.timestamp),
                hpcx_arcsec: hpc.hpcx,
                hpcy_arcsec: hpc.hpcy,
                noaa_ar: Some(a.noaa_ar),
                flare_class: None,
            }
        })
        .collect();
    Ok(FixtureOutput {
        attribution_path,
        geometry_path,
        catalog_rows,
        expectation: expected_outcome(spec, params),
    })
}

/// Generated suite: manifest, catalog and expectations alongside the data.
#[derive(Debug, Clone)]
pub struct SuitePaths {
    pub manifest: PathBuf,
    pub catalog: PathBuf,
    pub expectations: PathBuf,
}

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const CATALOG_FILE: &str = "catalog.csv";
pub const EXPECTATIONS_FILE: &str = "expectations.jsonl";

/// Writes every fixture plus `manifest.csv`, `catalog.csv` and
/// `expectations.jsonl` into `dir`.
pub fn write_suite(
    specs: &[FixtureSpec],
    params: &PipelineParams,
    dir: &Path,
) -> Result<SuitePaths> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let manifest = dir.join(MANIFEST_FILE);
    let catalog = dir.join(CATALOG_FILE);
    let expectations = dir.join(EXPECTATIONS_FILE);

    let mut m = csv::Writer::from_path(&manifest)?;
    m.write_record([
        "image_id",
        "attribution_path",
        "geometry_path",
        "timestamp",
        "predicted_flare",
        "observed_flare",
    ])?;
    let mut c = csv::Writer::from_path(&catalog)?;
    c.write_record([
        "kind",
        "timestamp",
        "hpcx_arcsec",
        "hpcy_arcsec",
        "noaa_ar",
        "flare_class",
    ])?;
    let mut e = fs::File::create(&expectations)?;

    for spec in specs {
        let out = generate_fixture(spec, params, dir)?;
        let rel = |p: &Path| {
            p.strip_prefix(dir)
                .unwrap_or(p)
                .to_string_lossy()
                .into_owned()
        };
        m.write_record([
            spec.image_id.clone(),
            rel(&out.attribution_path),
            rel(&out.geometry_path),
            format_timestamp(&spec.timestamp),
            spec.predicted_flare.to_string(),
            spec.observed_flare.to_string(),
        ])?;
        for r in &out.catalog_rows {
            c.write_record([
                r.kind.clone(),
                r.timestamp.clone(),
                r.hpcx_arcsec.to_string(),
                r.hpcy_arcsec.to_string(),
                r.noaa_ar.map(|v| v.to_string()).unwrap_or_default(),
                r.flare_class.clone().unwrap_or_default(),
            ])?;
        }
        serde_json::to_writer(&mut e, &out.expectation)?;
        e.write_all(b"\n")?;
    }
    m.flush()?;
    c.flush()?;
    Ok(SuitePaths {
        manifest,
        catalog,
        expectations,
    })
}

pub fn read_expectations(path: &Path) -> Result<Vec<Expectation>> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

/// Reads fixture specs from a JSON array.
pub fn read_specs(path: &Path) -> Result<Vec<FixtureSpec>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn suite_epoch() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2022, 1, 1, 0, 0, 0).unwrap()
}

/// A reproducible mixed suite of `n` images on the default 512 px disk,
/// spaced four hours apart. The first two images are degenerate on purpose:
/// one has no attribution signal, the other no active regions.
pub fn synthetic_suite(n: usize, seed: u64) -> Vec<FixtureSpec> {
    let g = SolarDiskGeometry::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let on_disk = |rng: &mut ChaCha8Rng, max_r: f64| {
        let r = max_r * rng.gen::<f64>().sqrt();
        let t = rng.gen_range(0.0..std::f64::consts::TAU);
        (g.hpc_center_x + r * t.cos(), g.hpc_center_y + r * t.sin())
    };
    (0..n)
        .map(|i| {
            let mut blobs: Vec<Blob> = (0..rng.gen_range(1..=3))
                .map(|_| {
                    let (x, y) = on_disk(&mut rng, 180.0);
                    Blob {
                        x: x.round(),
                        y: y.round(),
                        sigma: rng.gen_range(4.0..12.0f64).round(),
                        peak: 1.0,
                    }
                })
                .collect();
            let mut ars: Vec<FixtureAr> = (0..rng.gen_range(1..=4))
                .map(|j| {
                    let noaa_ar = 12000 + (i * 10 + j) as u32;
                    if rng.gen_bool(0.5) {
                        let b = blobs[rng.gen_range(0..blobs.len())];
                        FixtureAr {
                            noaa_ar,
                            x: b.x,
                            y: b.y,
                        }
                    } else {
                        let (x, y) = on_disk(&mut rng, 220.0);
                        FixtureAr { noaa_ar, x, y }
                    }
                })
                .collect();
            match i {
                0 => blobs.clear(),
                1 => ars.clear(),
                _ => {}
            }
            FixtureSpec {
                image_id: format!("synthetic_{i:03}"),
                geometry: g,
                blobs,
                ars,
                timestamp: suite_epoch() + Duration::hours(4 * i as i64),
                predicted_flare: rng.gen_bool(0.5),
                observed_flare: rng.gen_bool(0.4),
            }
        })
        .collect()
}
