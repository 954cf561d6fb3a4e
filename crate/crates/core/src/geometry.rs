//! Helioprojective/pixel conversion, polygon distances and disk masking.
//!
//! Pixel frame: `x` grows to the right, `y` grows downward. Solar north is up,
//! so a positive helioprojective `y` maps to a smaller pixel `y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Helioprojective-Cartesian position in arcseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HpcPoint {
    pub hpcx: f64,
    pub hpcy: f64,
}

impl HpcPoint {
    pub fn new(hpcx: f64, hpcy: f64) -> Self {
        Self { hpcx, hpcy }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelPoint {
    pub x: f64,
    pub y: f64,
}

impl PixelPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: PixelPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for PixelPoint {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Placement and scale of the solar disk within a square image.
///
/// Loaded from a per-image JSON sidecar with exactly these field names.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolarDiskGeometry {
    /// Pixel x of the disk centre.
    pub hpc_center_x: f64,
    /// Pixel y of the disk centre.
    pub hpc_center_y: f64,
    /// Plate scale in arcseconds per pixel.
    pub cdelt: f64,
    pub disk_radius_px: f64,
    /// Side length of the square image this geometry describes.
    pub image_size: u32,
}

impl Default for SolarDiskGeometry {
    /// Convenience values for a 512×512 full-disk image.
    fn default() -> Self {
        Self {
            hpc_center_x: 256.0,
            hpc_center_y: 256.0,
            cdelt: 4.0,
            disk_radius_px: 240.0,
            image_size: 512,
        }
    }
}

impl SolarDiskGeometry {
    pub fn validate(&self) -> Result<()> {
        let size = f64::from(self.image_size);
        let fields = [
            self.hpc_center_x,
            self.hpc_center_y,
            self.cdelt,
            self.disk_radius_px,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("geometry", "all fields must be finite"));
        }
        if self.image_size == 0 {
            return Err(Error::invalid("geometry", "image_size must be positive"));
        }
        if self.cdelt <= 0.0 {
            return Err(Error::invalid(
                "geometry",
                format!("cdelt must be > 0, got {}", self.cdelt),
            ));
        }
        if self.disk_radius_px <= 0.0 || self.disk_radius_px > size / 2.0 {
            return Err(Error::invalid(
                "geometry",
                format!(
                    "disk_radius_px must be in (0, {}], got {}",
                    size / 2.0,
                    self.disk_radius_px
                ),
            ));
        }
        for (name, c) in [
            ("hpc_center_x", self.hpc_center_x),
            ("hpc_center_y", self.hpc_center_y),
        ] {
            if !(0.0..size).contains(&c) {
                return Err(Error::invalid(
                    "geometry",
                    format!("{name} must be in [0, {size}), got {c}"),
                ));
            }
        }
        Ok(())
    }

    /// The same disk described in a square frame of side `size`.
    pub fn rescaled(&self, size: u32) -> Self {
        if size == self.image_size {
            return *self;
        }
        let f = f64::from(size) / f64::from(self.image_size);
        Self {
            hpc_center_x: self.hpc_center_x * f,
            hpc_center_y: self.hpc_center_y * f,
            cdelt: self.cdelt / f,
            disk_radius_px: self.disk_radius_px * f,
            image_size: size,
        }
    }

    pub fn center(&self) -> PixelPoint {
        PixelPoint::new(self.hpc_center_x, self.hpc_center_y)
    }

    /// Closed-disk membership.
    pub fn contains(&self, p: PixelPoint) -> bool {
        let dx = p.x - self.hpc_center_x;
        let dy = p.y - self.hpc_center_y;
        dx * dx + dy * dy <= self.disk_radius_px * self.disk_radius_px
    }
}

pub fn hpc_to_pixel(p: HpcPoint, g: &SolarDiskGeometry) -> PixelPoint {
    PixelPoint {
        x: g.hpc_center_x + p.hpcx / g.cdelt,
        y: g.hpc_center_y - p.hpcy / g.cdelt,
    }
}

pub fn pixel_to_hpc(p: PixelPoint, g: &SolarDiskGeometry) -> HpcPoint {
    HpcPoint {
        hpcx: (p.x - g.hpc_center_x) * g.cdelt,
        hpcy: (g.hpc_center_y - p.y) * g.cdelt,
    }
}

/// Keeps the points lying on the closed solar disk, preserving order.
pub fn mask_points_to_disk<I>(points: I, g: &SolarDiskGeometry) -> Vec<PixelPoint>
where
    I: IntoIterator<Item = PixelPoint>,
{
    points.into_iter().filter(|p| g.contains(*p)).collect()
}

/// A polygon with its vertices in positive (shoelace) orientation.
///
/// One vertex is a point and two vertices a segment; both occur for tiny or
/// collinear clusters and are handled by every operation here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<PixelPoint>,
}

impl Polygon {
    /// Builds a polygon, dropping consecutive duplicate vertices (including the
    /// implicit closing edge).
    pub fn new(vertices: Vec<PixelPoint>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::invalid("polygon", "at least one vertex required"));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("polygon", "non-finite vertex"));
        }
        let mut out: Vec<PixelPoint> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if out.last() != Some(&v) {
                out.push(v);
            }
        }
        while out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        Ok(Self { vertices: out })
    }

    pub fn rectangle(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        Self::new(vec![
            PixelPoint::new(min_x, min_y),
            PixelPoint::new(max_x, min_y),
            PixelPoint::new(max_x, max_y),
            PixelPoint::new(min_x, max_y),
        ])
        .expect("finite rectangle")
    }

    pub fn vertices(&self) -> &[PixelPoint] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (PixelPoint, PixelPoint)> + '_ {
        let n = self.vertices.len();
        let count = if n < 2 {
            0
        } else if n == 2 {
            1
        } else {
            n
        };
        (0..count).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Unsigned area (zero for points and segments).
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let twice: f64 = (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                a.x * b.y - b.x * a.y
            })
            .sum();
        twice.abs() / 2.0
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|v| PixelPoint::new(v.x + dx, v.y + dy))
                .collect(),
        }
    }

    /// Axis-aligned bounds as `(min_x, min_y, max_x, max_y)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.vertices.iter().fold(
            (
                f64::INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::NEG_INFINITY,
            ),
            |(a, b, c, d), v| (a.min(v.x), b.min(v.y), c.max(v.x), d.max(v.y)),
        )
    }
}

/// Distance from `p` to the closed segment `a`–`b`.
pub fn point_segment_distance(p: PixelPoint, a: PixelPoint, b: PixelPoint) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(PixelPoint::new(a.x + t * dx, a.y + t * dy))
}

fn on_segment(p: PixelPoint, a: PixelPoint, b: PixelPoint) -> bool {
    let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if cross != 0.0 {
        // exact test first; fall back to a scale-aware tolerance for
        // points that are on the line up to rounding
        let len = (b.x - a.x).hypot(b.y - a.y);
        if cross.abs() > 1e-12 * len.max(1.0) * (1.0 + p.x.abs().max(p.y.abs())) {
            return false;
        }
    }
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Boundary-inclusive membership test (crossing number plus an explicit
/// on-edge check). Works for any simple polygon.
pub fn point_in_polygon(p: PixelPoint, poly: &Polygon) -> bool {
    let v = poly.vertices();
    match v.len() {
        1 => return p == v[0],
        2 => return on_segment(p, v[0], v[1]),
        _ => {}
    }
    if poly.edges().any(|(a, b)| on_segment(p, a, b)) {
        return true;
    }
    let mut inside = false;
    let n = v.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (v[i], v[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Zero inside or on the boundary; otherwise the distance to the nearest
/// boundary point.
pub fn min_distance_to_polygon(p: PixelPoint, poly: &Polygon) -> f64 {
    if point_in_polygon(p, poly) {
        return 0.0;
    }
    boundary_distance(p, poly)
}

fn boundary_distance(p: PixelPoint, poly: &Polygon) -> f64 {
    let v = poly.vertices();
    if v.len() == 1 {
        return p.distance(v[0]);
    }
    poly.edges()
        .map(|(a, b)| point_segment_distance(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

fn orient(a: PixelPoint, b: PixelPoint, c: PixelPoint) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn segments_intersect(a: PixelPoint, b: PixelPoint, c: PixelPoint, d: PixelPoint) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(a, c, d))
        || (d2 == 0.0 && on_segment(b, c, d))
        || (d3 == 0.0 && on_segment(c, a, b))
        || (d4 == 0.0 && on_segment(d, a, b))
}

/// Minimum distance between two polygons; zero when they touch or overlap.
pub fn polygon_distance(a: &Polygon, b: &Polygon) -> f64 {
    if point_in_polygon(a.vertices()[0], b) || point_in_polygon(b.vertices()[0], a) {
        return 0.0;
    }
    for (p, q) in a.edges() {
        for (r, s) in b.edges() {
            if segments_intersect(p, q, r, s) {
                return 0.0;
            }
        }
    }
    let ab = a
        .vertices()
        .iter()
        .map(|&v| boundary_distance(v, b))
        .fold(f64::INFINITY, f64::min);
    let ba = b
        .vertices()
        .iter()
        .map(|&v| boundary_distance(v, a))
        .fold(f64::INFINITY, f64::min);
    ab.min(ba)
}
