//! Proximity Score, Attribution Colocation Ratio and per-category summaries.
//!
//! PS is the mean over active regions of the distance to the nearest
//! explanation box (zero when inside one). ACR is the fraction of active
//! regions that fall inside any box, kept in `[0, 1]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::PixelPoint;
use crate::regions::BoundingRegion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ContingencyCategory {
    TP,
    FP,
    TN,
    FN,
}

impl ContingencyCategory {
    /// Table order: TP, FP, TN, FN.
    pub const ALL: [ContingencyCategory; 4] = [Self::TP, Self::FP, Self::TN, Self::FN];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::TP => "TP",
            Self::FP => "FP",
            Self::TN => "TN",
            Self::FN => "FN",
        }
    }
}

impl fmt::Display for ContingencyCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ContingencyCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "TP" => Ok(Self::TP),
            "FP" => Ok(Self::FP),
            "TN" => Ok(Self::TN),
            "FN" => Ok(Self::FN),
            other => Err(Error::invalid(
                "category",
                format!("unknown category {other:?}"),
            )),
        }
    }
}

pub fn categorize(predicted_flare: bool, observed_flare: bool) -> ContingencyCategory {
    match (predicted_flare, observed_flare) {
        (true, true) => ContingencyCategory::TP,
        (true, false) => ContingencyCategory::FP,
        (false, true) => ContingencyCategory::FN,
        (false, false) => ContingencyCategory::TN,
    }
}

/// Why an image has no PS/ACR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalFlag {
    NoRegions,
    NoArs,
}

/// Distance from `ar` to the nearest region box; `None` when there are no
/// regions.
pub fn per_ar_distance(ar: PixelPoint, regions: &[BoundingRegion]) -> Option<f64> {
    regions.iter().map(|r| r.bbox.distance(ar)).reduce(f64::min)
}

pub fn proximity_score(ars: &[PixelPoint], regions: &[BoundingRegion]) -> Result<f64, EvalFlag> {
    if ars.is_empty() {
        return Err(EvalFlag::NoArs);
    }
    if regions.is_empty() {
        return Err(EvalFlag::NoRegions);
    }
    let total: f64 = ars
        .iter()
        .map(|&a| per_ar_distance(a, regions).expect("regions nonempty"))
        .sum();
    Ok(total / ars.len() as f64)
}

pub fn attribution_colocation_ratio(
    ars: &[PixelPoint],
    regions: &[BoundingRegion],
) -> Result<f64, EvalFlag> {
    if ars.is_empty() {
        return Err(EvalFlag::NoArs);
    }
    let inside = ars
        .iter()
        .filter(|&&a| regions.iter().any(|r| r.bbox.contains(a)))
        .count();
    Ok(inside as f64 / ars.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArDistance {
    pub noaa_ar: u32,
    pub d_min: f64,
}

/// An active region already converted to pixels and known to be on the disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocatedAr {
    pub noaa_ar: u32,
    pub pixel: PixelPoint,
}

/// Per-image result; one JSON line in `results.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageEvaluation {
    pub image_id: String,
    pub category: ContingencyCategory,
    pub ps: Option<f64>,
    pub acr: Option<f64>,
    pub flags: Vec<EvalFlag>,
    pub per_ar_distances: Vec<ArDistance>,
    pub region_count: usize,
    #[serde(default)]
    pub ars_inside: usize,
    #[serde(default)]
    pub off_disk_ars: Vec<u32>,
}

impl ImageEvaluation {
    pub fn is_flagged(&self) -> bool {
        !self.flags.is_empty()
    }
}

/// Scores one image. Flagged images (no regions, or no on-disk ARs) carry no
/// PS/ACR so they never leak into averages.
pub fn evaluate_image(
    image_id: impl Into<String>,
    category: ContingencyCategory,
    ars: &[LocatedAr],
    regions: &[BoundingRegion],
) -> ImageEvaluation {
    let mut flags = Vec::new();
    if regions.is_empty() {
        flags.push(EvalFlag::NoRegions);
    }
    if ars.is_empty() {
        flags.push(EvalFlag::NoArs);
    }
    let pixels: Vec<PixelPoint> = ars.iter().map(|a| a.pixel).collect();
    let (ps, acr, per_ar_distances, ars_inside) = if flags.is_empty() {
        let dists: Vec<ArDistance> = ars
            .iter()
            .map(|a| ArDistance {
                noaa_ar: a.noaa_ar,
                d_min: per_ar_distance(a.pixel, regions).expect("regions nonempty"),
            })
            .collect();
        let inside = pixels
            .iter()
            .filter(|&&p| regions.iter().any(|r| r.bbox.contains(p)))
            .count();
        (
            proximity_score(&pixels, regions).ok(),
            attribution_colocation_ratio(&pixels, regions).ok(),
            dists,
            inside,
        )
    } else {
        (None, None, Vec::new(), 0)
    };
    ImageEvaluation {
        image_id: image_id.into(),
        category,
        ps,
        acr,
        flags,
        per_ar_distances,
        region_count: regions.len(),
        ars_inside,
        off_disk_ars: Vec::new(),
    }
}

/// Mean and population standard deviation, two-pass.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

/// Row label for a summary line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SummaryGroup {
    Category(ContingencyCategory),
    Overall,
}

impl fmt::Display for SummaryGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Category(c) => c.fmt(f),
            Self::Overall => f.write_str("overall"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategorySummary {
    pub group: SummaryGroup,
    pub mean_ps: Option<f64>,
    pub std_ps: Option<f64>,
    pub mean_acr: Option<f64>,
    pub std_acr: Option<f64>,
    /// Images with defined PS and ACR.
    pub n: usize,
    pub n_no_regions: usize,
    pub n_no_ars: usize,
}

/// How per-image results are combined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Average the per-image PS and ACR values.
    #[default]
    Macro,
    /// Pool every per-AR distance and inside/outside outcome across images.
    Pooled,
}

fn summarize_group<'a>(
    group: SummaryGroup,
    evals: impl Iterator<Item = &'a ImageEvaluation> + Clone,
    aggregation: Aggregation,
) -> CategorySummary {
    let defined = evals.clone().filter(|e| !e.is_flagged());
    let (ps, acr): (Vec<f64>, Vec<f64>) = match aggregation {
        Aggregation::Macro => defined.filter_map(|e| Some((e.ps?, e.acr?))).unzip(),
        Aggregation::Pooled => {
            let mut ps = Vec::new();
            let mut acr = Vec::new();
            for e in defined {
                ps.extend(e.per_ar_distances.iter().map(|d| d.d_min));
                let n = e.per_ar_distances.len();
                acr.extend((0..n).map(|i| if i < e.ars_inside { 1.0 } else { 0.0 }));
            }
            (ps, acr)
        }
    };
    let n = evals.clone().filter(|e| !e.is_flagged()).count();
    let ps_stats = mean_std(&ps);
    let acr_stats = mean_std(&acr);
    CategorySummary {
        group,
        mean_ps: ps_stats.map(|s| s.0),
        std_ps: ps_stats.map(|s| s.1),
        mean_acr: acr_stats.map(|s| s.0),
        std_acr: acr_stats.map(|s| s.1),
        n,
        n_no_regions: evals
            .clone()
            .filter(|e| e.flags.contains(&EvalFlag::NoRegions))
            .count(),
        n_no_ars: evals.filter(|e| e.flags.contains(&EvalFlag::NoArs)).count(),
    }
}

/// One row per category in TP, FP, TN, FN order, then an overall row.
pub fn summarize(evals: &[ImageEvaluation], aggregation: Aggregation) -> Vec<CategorySummary> {
    let mut rows: Vec<CategorySummary> = ContingencyCategory::ALL
        .iter()
        .map(|&c| {
            summarize_group(
                SummaryGroup::Category(c),
                evals.iter().filter(move |e| e.category == c),
                aggregation,
            )
        })
        .collect();
    rows.push(summarize_group(
        SummaryGroup::Overall,
        evals.iter(),
        aggregation,
    ));
    rows
}
