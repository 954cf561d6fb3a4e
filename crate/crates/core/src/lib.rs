//! Proximity-based evaluation of attribution maps for full-disk solar flare
//! forecasts.
//!
//! An attribution map is reduced to a handful of explanation regions (edge
//! detection, density clustering, convex hulls with rotation buffers, merging,
//! bounding boxes). Known active-region positions are then scored against
//! those regions with two metrics:
//!
//! * **Proximity Score (PS)**: mean pixel distance from each active region to
//!   its nearest region, zero when inside. Lower is better.
//! * **Attribution Colocation Ratio (ACR)**: fraction of active regions that
//!   fall inside some region. Higher is better.

pub mod error;
pub mod geometry;
pub mod imageproc;
pub mod ingest;
pub mod metrics;
pub mod regions;

pub use error::{Error, Result};
pub use geometry::{
    hpc_to_pixel, mask_points_to_disk, min_distance_to_polygon, pixel_to_hpc, point_in_polygon,
    HpcPoint, PixelPoint, Polygon, SolarDiskGeometry,
};
pub use imageproc::{
    canny, normalize_scale, resize, AttributionMap, CannyParams, EdgePixelSet, GrayscaleImage,
};
pub use ingest::{
    load_attribution, load_catalog, load_geometry, load_manifest, match_catalog, Catalog,
    CatalogMatch, EvaluationManifest, ManifestEntry,
};
pub use metrics::{
    attribution_colocation_ratio, categorize, evaluate_image, proximity_score, summarize,
    Aggregation, CategorySummary, ContingencyCategory, EvalFlag, ImageEvaluation, LocatedAr,
};
pub use regions::{
    add_buffer, bounding_regions, convex_hull, dbscan, extract_regions, merge_regions, BoundingBox,
    BoundingRegion, PipelineParams, RegionExtraction,
};
