//! From edge pixels to explanation regions.
//!
//! The chain is: density clustering of edge pixels, one convex hull per
//! cluster, a horizontal east/west dilation of each hull to allow for solar
//! rotation over the forecast window, merging of nearby buffered hulls, and
//! finally axis-aligned bounding boxes that touch the solar disk.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    mask_points_to_disk, polygon_distance, PixelPoint, Polygon, SolarDiskGeometry,
};
use crate::imageproc::{canny, normalize_scale, resize, AttributionMap, CannyParams, EdgePixelSet};

/// Where the circular disk mask is applied.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskStage {
    /// Drop off-disk edge pixels before clustering (and off-disk boxes at the end).
    #[default]
    Edges,
    /// Only drop final boxes that miss the disk.
    Regions,
}

/// Which image direction is solar west.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WestDirection {
    #[default]
    ImageRight,
    ImageLeft,
}

/// Parameters of the region-extraction pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineParams {
    pub lower_threshold: f64,
    pub upper_threshold: f64,
    pub min_samples: usize,
    /// DBSCAN neighbourhood radius, also used as the region-merge distance.
    pub max_dist: f64,
    pub eastward_buffer: f64,
    pub westward_buffer: f64,
    pub target_size: usize,
    pub scale_to: u8,
    pub mask_stage: MaskStage,
    pub west_direction: WestDirection,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            lower_threshold: 30.0,
            upper_threshold: 50.0,
            min_samples: 2,
            max_dist: 10.0,
            eastward_buffer: 5.0,
            westward_buffer: 40.0,
            target_size: 512,
            scale_to: 255,
            mask_stage: MaskStage::Edges,
            west_direction: WestDirection::ImageRight,
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid("pipeline parameters", m));
        let finite = [
            self.lower_threshold,
            self.upper_threshold,
            self.max_dist,
            self.eastward_buffer,
            self.westward_buffer,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("all parameters must be finite".into());
        }
        if self.lower_threshold < 0.0
            || self.lower_threshold > self.upper_threshold
            || self.upper_threshold > 255.0 * 8.0
        {
            return bad(format!(
                "thresholds must satisfy 0 <= lower <= upper, got {} / {}",
                self.lower_threshold, self.upper_threshold
            ));
        }
        if self.min_samples == 0 {
            return bad("min_samples must be at least 1".into());
        }
        if self.max_dist <= 0.0 {
            return bad(format!("max_dist must be positive, got {}", self.max_dist));
        }
        if self.eastward_buffer < 0.0 || self.westward_buffer < 0.0 {
            return bad("buffers must be non-negative".into());
        }
        if self.target_size == 0 || self.scale_to == 0 {
            return bad("target_size and scale_to must be positive".into());
        }
        Ok(())
    }

    fn canny(&self) -> CannyParams {
        CannyParams::new(self.lower_threshold, self.upper_threshold)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: usize,
    pub points: Vec<PixelPoint>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DbscanResult {
    pub clusters: Vec<Cluster>,
    pub noise: Vec<PixelPoint>,
}

fn lexicographic(a: &PixelPoint, b: &PixelPoint) -> std::cmp::Ordering {
    a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y))
}

/// Uniform grid with cell side `eps` for fixed-radius neighbour queries.
struct NeighborGrid<'a> {
    points: &'a [PixelPoint],
    eps: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl<'a> NeighborGrid<'a> {
    fn new(points: &'a [PixelPoint], eps: f64) -> Self {
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::cell(p, eps)).or_default().push(i);
        }
        Self { points, eps, cells }
    }

    fn cell(p: &PixelPoint, eps: f64) -> (i64, i64) {
        ((p.x / eps).floor() as i64, (p.y / eps).floor() as i64)
    }

    /// Indices within `eps` of point `i` (itself included), ascending.
    fn neighbors(&self, i: usize) -> Vec<usize> {
        let p = self.points[i];
        let (cx, cy) = Self::cell(&p, self.eps);
        let mut out = Vec::new();
        for gx in cx - 1..=cx + 1 {
            for gy in cy - 1..=cy + 1 {
                if let Some(bucket) = self.cells.get(&(gx, gy)) {
                    out.extend(
                        bucket
                            .iter()
                            .copied()
                            .filter(|&j| p.distance(self.points[j]) <= self.eps),
                    );
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// DBSCAN labels for `points`, in input order (`None` = noise).
///
/// Points are scanned in lexicographic `(x, y)` order; `min_samples` counts the
/// point itself, and a border point reachable from several clusters joins the
/// one discovered first. With those conventions the result is a pure function
/// of the point set.
pub fn dbscan_labels(points: &[PixelPoint], eps: f64, min_samples: usize) -> Vec<Option<usize>> {
    assert!(
        eps > 0.0 && min_samples >= 1,
        "dbscan requires eps > 0 and min_samples >= 1"
    );
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| lexicographic(&points[a], &points[b]));
    let sorted: Vec<PixelPoint> = order.iter().map(|&i| points[i]).collect();
    let grid = NeighborGrid::new(&sorted, eps);

    let mut labels: Vec<Option<usize>> = vec![None; sorted.len()];
    let mut expanded = vec![false; sorted.len()];
    let mut next_id = 0;
    for start in 0..sorted.len() {
        if expanded[start] {
            continue;
        }
        expanded[start] = true;
        let seeds = grid.neighbors(start);
        if seeds.len() < min_samples {
            continue;
        }
        let id = next_id;
        next_id += 1;
        labels[start] = Some(id);
        let mut frontier = seeds;
        while let Some(q) = frontier.pop() {
            if labels[q].is_none() {
                labels[q] = Some(id);
            }
            if expanded[q] {
                continue;
            }
            expanded[q] = true;
            let nb = grid.neighbors(q);
            if nb.len() >= min_samples {
                frontier.extend(
                    nb.into_iter()
                        .filter(|&j| !expanded[j] || labels[j].is_none()),
                );
            }
        }
    }

    let mut out = vec![None; points.len()];
    for (sorted_idx, &orig) in order.iter().enumerate() {
        out[orig] = labels[sorted_idx];
    }
    out
}

/// Clusters and noise for a point set. Cluster ids follow discovery order and
/// each cluster's points are in lexicographic order.
pub fn dbscan(points: &[PixelPoint], eps: f64, min_samples: usize) -> DbscanResult {
    let labels = dbscan_labels(points, eps, min_samples);
    let count = labels.iter().flatten().max().map_or(0, |m| m + 1);
    let mut clusters: Vec<Cluster> = (0..count)
        .map(|id| Cluster {
            id,
            points: Vec::new(),
        })
        .collect();
    let mut noise = Vec::new();
    for (p, l) in points.iter().zip(&labels) {
        match l {
            Some(id) => clusters[*id].points.push(*p),
            None => noise.push(*p),
        }
    }
    for c in &mut clusters {
        c.points.sort_by(lexicographic);
    }
    noise.sort_by(lexicographic);
    DbscanResult { clusters, noise }
}

fn cross(o: PixelPoint, a: PixelPoint, b: PixelPoint) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Convex hull by Andrew's monotone chain. Collinear points are dropped, so a
/// single distinct point gives a 1-vertex polygon and a collinear set gives
/// its two extreme points.
pub fn convex_hull(points: &[PixelPoint]) -> Result<Polygon> {
    if points.is_empty() {
        return Err(Error::invalid("convex hull", "empty point set"));
    }
    let mut pts = points.to_vec();
    pts.sort_by(lexicographic);
    pts.dedup();
    if pts.len() < 3 {
        return Polygon::new(pts);
    }

    let mut hull: Vec<PixelPoint> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Polygon::new(hull)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BufferedRegion {
    pub polygon: Polygon,
    pub source_cluster: usize,
}

/// Dilates a hull horizontally: `west` pixels toward solar west and `east`
/// pixels toward solar east, then re-hulls. The vertical extent is unchanged.
pub fn add_buffer(hull: &Polygon, east: f64, west: f64, direction: WestDirection) -> Polygon {
    let sign = match direction {
        WestDirection::ImageRight => 1.0,
        WestDirection::ImageLeft => -1.0,
    };
    let pts: Vec<PixelPoint> = hull
        .vertices()
        .iter()
        .flat_map(|v| {
            [
                *v,
                PixelPoint::new(v.x + sign * west, v.y),
                PixelPoint::new(v.x - sign * east, v.y),
            ]
        })
        .collect();
    convex_hull(&pts).expect("hull has at least one vertex")
}

/// A buffered hull after merging, with the clusters it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedRegion {
    pub polygon: Polygon,
    pub member_clusters: Vec<usize>,
}

fn region_order(a: &MergedRegion, b: &MergedRegion) -> std::cmp::Ordering {
    let (ax0, ay0, ax1, ay1) = a.polygon.bounds();
    let (bx0, by0, bx1, by1) = b.polygon.bounds();
    ax0.total_cmp(&bx0)
        .then(ay0.total_cmp(&by0))
        .then(ax1.total_cmp(&bx1))
        .then(ay1.total_cmp(&by1))
        .then_with(|| a.member_clusters.cmp(&b.member_clusters))
}

/// Repeatedly replaces any two regions within `eps` of each other (touching
/// or overlapping counts as 0) by the hull of their combined vertices, until
/// no such pair remains. Output is sorted by `min_x`, then `min_y`.
pub fn merge_regions(regions: &[BufferedRegion], eps: f64) -> Vec<MergedRegion> {
    let mut current: Vec<MergedRegion> = regions
        .iter()
        .map(|r| MergedRegion {
            polygon: r.polygon.clone(),
            member_clusters: vec![r.source_cluster],
        })
        .collect();
    merge_to_fixed_point(&mut current, eps);
    current
}

/// Same fixed-point merge applied to already merged regions.
pub fn remerge(regions: &[MergedRegion], eps: f64) -> Vec<MergedRegion> {
    let mut current = regions.to_vec();
    merge_to_fixed_point(&mut current, eps);
    current
}

fn merge_to_fixed_point(current: &mut Vec<MergedRegion>, eps: f64) {
    current.sort_by(region_order);
    'outer: loop {
        for i in 0..current.len() {
            for j in i + 1..current.len() {
                if polygon_distance(&current[i].polygon, &current[j].polygon) <= eps {
                    let b = current.remove(j);
                    let a = &mut current[i];
                    let mut pts = a.polygon.vertices().to_vec();
                    pts.extend_from_slice(b.polygon.vertices());
                    a.polygon = convex_hull(&pts).expect("nonempty");
                    a.member_clusters.extend(b.member_clusters);
                    a.member_clusters.sort_unstable();
                    current.sort_by(region_order);
                    continue 'outer;
                }
            }
        }
        break;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct BoundingBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl From<[f64; 4]> for BoundingBox {
    fn from([min_x, min_y, max_x, max_y]: [f64; 4]) -> Self {
        Self {
            min_x,
            min_y,
            max_x,
            max_y,
        }
    }
}

impl From<BoundingBox> for [f64; 4] {
    fn from(b: BoundingBox) -> Self {
        [b.min_x, b.min_y, b.max_x, b.max_y]
    }
}

impl BoundingBox {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        Self {
            min_x,
            min_y,
            max_x,
            max_y,
        }
    }

    /// Boundary-inclusive containment.
    pub fn contains(&self, p: PixelPoint) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }

    /// Euclidean distance from `p` to the box; zero inside or on the edge.
    pub fn distance(&self, p: PixelPoint) -> f64 {
        let dx = (self.min_x - p.x).max(0.0).max(p.x - self.max_x);
        let dy = (self.min_y - p.y).max(0.0).max(p.y - self.max_y);
        dx.hypot(dy)
    }

    pub fn intersects_disk(&self, g: &SolarDiskGeometry) -> bool {
        self.distance(g.center()) <= g.disk_radius_px
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self::new(
            self.min_x + dx,
            self.min_y + dy,
            self.max_x + dx,
            self.max_y + dy,
        )
    }

    pub fn to_polygon(&self) -> Polygon {
        Polygon::rectangle(self.min_x, self.min_y, self.max_x, self.max_y)
    }
}

/// Final explanation region: a tight axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingRegion {
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub member_clusters: Vec<usize>,
}

impl BoundingRegion {
    pub fn new(bbox: BoundingBox) -> Self {
        Self {
            bbox,
            member_clusters: Vec::new(),
        }
    }
}

pub fn bounding_regions(merged: &[MergedRegion]) -> Vec<BoundingRegion> {
    merged
        .iter()
        .map(|m| {
            let (min_x, min_y, max_x, max_y) = m.polygon.bounds();
            BoundingRegion {
                bbox: BoundingBox::new(min_x, min_y, max_x, max_y),
                member_clusters: m.member_clusters.clone(),
            }
        })
        .collect()
}

/// Everything [`extract_regions`] produced for one attribution map.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RegionExtraction {
    pub regions: Vec<BoundingRegion>,
    pub edge_pixels: usize,
    pub clusters: usize,
    pub noise_points: usize,
}

impl RegionExtraction {
    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }
}

/// Scales the map to 8-bit and to the working size, then runs Canny.
pub fn detect_edges(am: &AttributionMap, params: &PipelineParams) -> EdgePixelSet {
    let gray = resize(&normalize_scale(am, params.scale_to), params.target_size);
    canny(&gray, &params.canny())
}

/// Full region pipeline for one attribution map.
///
/// `g` may describe the disk at any image size; it is rescaled to the working
/// size first. An empty result is a normal outcome (no edges, or every edge
/// pixel was noise).
pub fn extract_regions(
    am: &AttributionMap,
    params: &PipelineParams,
    g: &SolarDiskGeometry,
) -> RegionExtraction {
    let g = g.rescaled(params.target_size as u32);
    let edges = detect_edges(am, params);
    let points: Vec<PixelPoint> = match params.mask_stage {
        MaskStage::Edges => mask_points_to_disk(edges.pixel_points(), &g),
        MaskStage::Regions => edges.pixel_points().collect(),
    };
    let clustering = dbscan(&points, params.max_dist, params.min_samples);

    let buffered: Vec<BufferedRegion> = clustering
        .clusters
        .iter()
        .map(|c| {
            let hull = convex_hull(&c.points).expect("clusters are nonempty");
            BufferedRegion {
                polygon: add_buffer(
                    &hull,
                    params.eastward_buffer,
                    params.westward_buffer,
                    params.west_direction,
                ),
                source_cluster: c.id,
            }
        })
        .collect();
    let merged = merge_regions(&buffered, params.max_dist);
    let regions = bounding_regions(&merged)
        .into_iter()
        .filter(|r| r.bbox.intersects_disk(&g))
        .collect();

    RegionExtraction {
        regions,
        edge_pixels: points.len(),
        clusters: clustering.clusters.len(),
        noise_points: clustering.noise.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<PixelPoint> {
        v.iter().map(|&p| p.into()).collect()
    }

    #[test]
    fn table_defaults() {
        let p = PipelineParams::default();
        assert_eq!(
            (
                p.lower_threshold,
                p.upper_threshold,
                p.min_samples,
                p.max_dist
            ),
            (30.0, 50.0, 2, 10.0)
        );
        assert_eq!(
            (
                p.eastward_buffer,
                p.westward_buffer,
                p.target_size,
                p.scale_to
            ),
            (5.0, 40.0, 512, 255)
        );
        assert!(p.validate().is_ok());
    }

    #[test]
    fn params_validation() {
        let d = PipelineParams::default();
        for p in [
            PipelineParams {
                lower_threshold: 60.0,
                ..d
            },
            PipelineParams {
                min_samples: 0,
                ..d
            },
            PipelineParams { max_dist: 0.0, ..d },
        ] {
            assert!(p.validate().is_err(), "{p:?}");
        }
    }

    #[test]
    fn dbscan_examples() {
        let r = dbscan(&pts(&[(0.0, 0.0), (6.0, 0.0)]), 10.0, 2);
        assert_eq!(r.clusters.len(), 1);
        assert_eq!(r.clusters[0].points.len(), 2);
        let r = dbscan(&pts(&[(0.0, 0.0), (100.0, 100.0)]), 10.0, 2);
        assert!(r.clusters.is_empty());
        assert_eq!(r.noise.len(), 2);
        let r = dbscan(&[], 10.0, 2);
        assert!(r.clusters.is_empty() && r.noise.is_empty());
    }

    #[test]
    fn dbscan_border_point_goes_to_first_cluster() {
        // (5,0) is a border point for both the left and right dense groups
        let p = pts(&[
            (0.0, 0.0),
            (0.0, 1.0),
            (0.0, 2.0),
            (5.0, 0.0),
            (10.0, 0.0),
            (10.0, 1.0),
            (10.0, 2.0),
        ]);
        let labels = dbscan_labels(&p, 5.0, 4);
        assert_eq!(labels[3], labels[0]);
        assert_ne!(labels[4], labels[0]);
    }

    #[test]
    fn hull_examples() {
        let h = convex_hull(&pts(&[
            (0.0, 0.0),
            (10.0, 0.0),
            (10.0, 10.0),
            (0.0, 10.0),
            (5.0, 5.0),
        ]))
        .unwrap();
        assert_eq!(h.len(), 4);
        assert!(!h.vertices().contains(&PixelPoint::new(5.0, 5.0)));
        let seg = convex_hull(&pts(&[(0.0, 0.0), (5.0, 0.0), (10.0, 0.0)])).unwrap();
        assert_eq!(seg.vertices(), &pts(&[(0.0, 0.0), (10.0, 0.0)])[..]);
        let one = convex_hull(&pts(&[(3.0, 3.0), (3.0, 3.0)])).unwrap();
        assert_eq!(one.vertices(), &pts(&[(3.0, 3.0)])[..]);
        assert!(convex_hull(&[]).is_err());
    }

    #[test]
    fn buffer_examples() {
        let sq = Polygon::rectangle(100.0, 100.0, 110.0, 110.0);
        let b = add_buffer(&sq, 5.0, 40.0, WestDirection::ImageRight);
        assert_eq!(b.bounds(), (95.0, 100.0, 150.0, 110.0));
        assert_eq!(b.len(), 4);
        let same = add_buffer(&sq, 0.0, 0.0, WestDirection::ImageRight);
        assert_eq!(same.bounds(), sq.bounds());
        assert_eq!(same.area(), sq.area());
        let flipped = add_buffer(&sq, 5.0, 40.0, WestDirection::ImageLeft);
        assert_eq!(flipped.bounds(), (60.0, 100.0, 115.0, 110.0));
        let point = Polygon::new(pts(&[(7.0, 7.0)])).unwrap();
        assert_eq!(
            add_buffer(&point, 5.0, 40.0, WestDirection::ImageRight).bounds(),
            (2.0, 7.0, 47.0, 7.0)
        );
    }

    #[test]
    fn merge_examples() {
        let r = |x0, y0, x1, y1, id| BufferedRegion {
            polygon: Polygon::rectangle(x0, y0, x1, y1),
            source_cluster: id,
        };
        let apart = merge_regions(
            &[r(0.0, 0.0, 10.0, 10.0, 0), r(210.0, 0.0, 220.0, 10.0, 1)],
            10.0,
        );
        assert_eq!(apart.len(), 2);
        let overlap = merge_regions(
            &[r(0.0, 0.0, 10.0, 10.0, 0), r(5.0, 5.0, 20.0, 20.0, 1)],
            10.0,
        );
        assert_eq!(overlap.len(), 1);
        assert_eq!(overlap[0].member_clusters, vec![0, 1]);
        assert_eq!(overlap[0].polygon.bounds(), (0.0, 0.0, 20.0, 20.0));
        assert_eq!(overlap[0].polygon.len(), 6);
        // exactly eps apart merges
        assert_eq!(
            merge_regions(
                &[r(0.0, 0.0, 10.0, 10.0, 0), r(20.0, 0.0, 30.0, 10.0, 1)],
                10.0
            )
            .len(),
            1
        );
        assert!(merge_regions(&[], 10.0).is_empty());
    }

    #[test]
    fn merge_cascades() {
        // a-b and b-c close, a-c far: all three end up together
        let r = |x0: f64, id| BufferedRegion {
            polygon: Polygon::rectangle(x0, 0.0, x0 + 10.0, 10.0),
            source_cluster: id,
        };
        let m = merge_regions(&[r(0.0, 0), r(36.0, 2), r(18.0, 1)], 10.0);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].member_clusters, vec![0, 1, 2]);
    }

    #[test]
    fn bounding_examples() {
        let tri = MergedRegion {
            polygon: Polygon::new(pts(&[(0.0, 0.0), (10.0, 0.0), (5.0, 8.0)])).unwrap(),
            member_clusters: vec![3],
        };
        let pt = MergedRegion {
            polygon: Polygon::new(pts(&[(3.0, 3.0)])).unwrap(),
            member_clusters: vec![4],
        };
        let b = bounding_regions(&[tri, pt]);
        assert_eq!(b[0].bbox, BoundingBox::new(0.0, 0.0, 10.0, 8.0));
        assert_eq!(b[1].bbox, BoundingBox::new(3.0, 3.0, 3.0, 3.0));
        assert_eq!(b[0].member_clusters, vec![3]);
    }

    #[test]
    fn region_json_layout() {
        let r = BoundingRegion {
            bbox: BoundingBox::new(1.0, 2.0, 3.5, 4.0),
            member_clusters: vec![0, 2],
        };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"box":[1.0,2.0,3.5,4.0],"member_clusters":[0,2]}"#);
        assert_eq!(serde_json::from_str::<BoundingRegion>(&s).unwrap(), r);
    }

    #[test]
    fn box_distance_and_disk() {
        let b = BoundingBox::new(0.0, 0.0, 50.0, 100.0);
        assert_eq!(b.distance(PixelPoint::new(60.0, 50.0)), 10.0);
        assert_eq!(b.distance(PixelPoint::new(25.0, 50.0)), 0.0);
        let g = SolarDiskGeometry::default();
        assert!(!BoundingBox::new(0.0, 0.0, 20.0, 20.0).intersects_disk(&g));
        assert!(BoundingBox::new(0.0, 250.0, 20.0, 260.0).intersects_disk(&g));
    }

    #[test]
    fn zero_map_yields_nothing() {
        let am = AttributionMap::new(512, 512, vec![0.0; 512 * 512]).unwrap();
        let r = extract_regions(
            &am,
            &PipelineParams::default(),
            &SolarDiskGeometry::default(),
        );
        assert!(r.is_empty());
        assert_eq!(r.edge_pixels, 0);
    }
}
