//! Attribution-map scaling, bilinear resizing and Canny edge detection.
//!
//! All intensity quantization rounds half up. Convolutions clamp at the
//! image border.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PixelPoint;

/// Raw per-pixel attribution magnitudes, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributionMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl AttributionMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(
                "attribution map",
                "width and height must be at least 1",
            ));
        }
        if values.len() != width * height {
            return Err(Error::invalid(
                "attribution map",
                format!(
                    "{}x{} needs {} values, got {}",
                    width,
                    height,
                    width * height,
                    values.len()
                ),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "attribution map",
                format!("non-finite value at index {i}"),
            ));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let values = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }
}

/// 8-bit single-channel image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayscaleImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayscaleImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::invalid(
                "grayscale image",
                format!("{}x{} with {} pixels", width, height, pixels.len()),
            ));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self::new(width, height, vec![value; width * height]).expect("nonzero dimensions")
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> u8) -> Self {
        let pixels = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(width, height, pixels).expect("nonzero dimensions")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

/// Retained Canny edge pixels, in row-major scan order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgePixelSet {
    points: Vec<(u32, u32)>,
}

impl EdgePixelSet {
    pub fn from_points(mut points: Vec<(u32, u32)>) -> Self {
        points.sort_unstable_by_key(|&(x, y)| (y, x));
        points.dedup();
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        self.points
            .binary_search_by_key(&(y, x), |&(px, py)| (py, px))
            .is_ok()
    }

    /// `(x, y)` integer coordinates.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.points.iter().copied()
    }

    pub fn pixel_points(&self) -> impl Iterator<Item = PixelPoint> + '_ {
        self.iter()
            .map(|(x, y)| PixelPoint::new(f64::from(x), f64::from(y)))
    }

    pub fn is_subset_of(&self, other: &EdgePixelSet) -> bool {
        self.iter().all(|(x, y)| other.contains(x, y))
    }
}

#[inline]
fn round_half_up(v: f64) -> f64 {
    (v + 0.5).floor()
}

/// Min-max normalization to `[0, scale_to]`; a constant map becomes all zeros.
pub fn normalize_scale(am: &AttributionMap, scale_to: u8) -> GrayscaleImage {
    let (min, max) = am
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = max - min;
    let scale = f64::from(scale_to);
    let pixels = if range > 0.0 {
        am.values()
            .iter()
            .map(|&v| round_half_up(scale * ((v - min) / range)).clamp(0.0, scale) as u8)
            .collect()
    } else {
        vec![0; am.values().len()]
    };
    GrayscaleImage::new(am.width(), am.height(), pixels).expect("dimensions carried over")
}

/// Source sample positions and weights along one axis, pixel-centre aligned.
fn axis_taps(src: usize, dst: usize) -> Vec<(usize, usize, f64)> {
    let scale = src as f64 / dst as f64;
    let last = (src - 1) as f64;
    (0..dst)
        .map(|i| {
            let f = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, last);
            let lo = f.floor() as usize;
            let hi = (lo + 1).min(src - 1);
            (lo, hi, f - lo as f64)
        })
        .collect()
}

/// Bilinear resize to `target`×`target` with edge clamping.
pub fn resize(img: &GrayscaleImage, target: usize) -> GrayscaleImage {
    assert!(target >= 1, "target size must be positive");
    if img.width() == target && img.height() == target {
        return img.clone();
    }
    let xs = axis_taps(img.width(), target);
    let ys = axis_taps(img.height(), target);
    let mut out = Vec::with_capacity(target * target);
    for &(y0, y1, wy) in &ys {
        let row0 = &img.pixels()[y0 * img.width()..(y0 + 1) * img.width()];
        let row1 = &img.pixels()[y1 * img.width()..(y1 + 1) * img.width()];
        for &(x0, x1, wx) in &xs {
            let top = f64::from(row0[x0]) + (f64::from(row0[x1]) - f64::from(row0[x0])) * wx;
            let bottom = f64::from(row1[x0]) + (f64::from(row1[x1]) - f64::from(row1[x0])) * wx;
            let v = top + (bottom - top) * wy;
            out.push(round_half_up(v).clamp(0.0, 255.0) as u8);
        }
    }
    GrayscaleImage::new(target, target, out).expect("target dimensions")
}

/// Canny edge-detector settings. Thresholds apply to the Sobel gradient
/// magnitude of the smoothed image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CannyParams {
    pub low: f64,
    pub high: f64,
    pub sigma: f64,
    pub kernel_radius: usize,
}

impl CannyParams {
    pub fn new(low: f64, high: f64) -> Self {
        Self {
            low,
            high,
            sigma: 1.4,
            kernel_radius: 2,
        }
    }
}

impl Default for CannyParams {
    fn default() -> Self {
        Self::new(30.0, 50.0)
    }
}

/// Per-pixel gradient of a Gaussian-smoothed image.
#[derive(Debug, Clone)]
pub struct Gradient {
    pub width: usize,
    pub height: usize,
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
    pub magnitude: Vec<f64>,
}

fn gaussian_kernel(sigma: f64, radius: usize) -> Vec<f64> {
    let r = radius as isize;
    let k: Vec<f64> = (-r..=r)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.into_iter().map(|v| v / sum).collect()
}

#[inline]
fn clamp_index(i: isize, n: usize) -> usize {
    i.clamp(0, n as isize - 1) as usize
}

fn gaussian_blur(img: &GrayscaleImage, sigma: f64, radius: usize) -> Vec<f64> {
    let (w, h) = (img.width(), img.height());
    let k = gaussian_kernel(sigma, radius);
    let r = radius as isize;
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            tmp[y * w + x] = k
                .iter()
                .enumerate()
                .map(|(i, kv)| {
                    kv * f64::from(img.get(clamp_index(x as isize + i as isize - r, w), y))
                })
                .sum();
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = k
                .iter()
                .enumerate()
                .map(|(i, kv)| kv * tmp[clamp_index(y as isize + i as isize - r, h) * w + x])
                .sum();
        }
    }
    out
}

/// Gaussian smoothing followed by 3×3 Sobel derivatives.
pub fn smoothed_gradient(img: &GrayscaleImage, params: &CannyParams) -> Gradient {
    let (w, h) = (img.width(), img.height());
    let s = gaussian_blur(img, params.sigma, params.kernel_radius);
    let at = |x: isize, y: isize| s[clamp_index(y, h) * w + clamp_index(x, w)];
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    let mut magnitude = vec![0.0; w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let dx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            let dy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
            let i = y as usize * w + x as usize;
            gx[i] = dx;
            gy[i] = dy;
            magnitude[i] = dx.hypot(dy);
        }
    }
    Gradient {
        width: w,
        height: h,
        gx,
        gy,
        magnitude,
    }
}

/// Offset of the neighbour along the quantized gradient direction.
fn direction_offset(gx: f64, gy: f64) -> (isize, isize) {
    let mut angle = gy.atan2(gx).to_degrees();
    if angle < 0.0 {
        angle += 180.0;
    }
    if !(22.5..157.5).contains(&angle) {
        (1, 0)
    } else if angle < 67.5 {
        (1, 1)
    } else if angle < 112.5 {
        (0, 1)
    } else {
        (-1, 1)
    }
}

/// Canny edge detection: Gaussian smoothing, Sobel gradients, non-maximum
/// suppression over four direction bins, then double-threshold hysteresis
/// with 8-connectivity.
pub fn canny(img: &GrayscaleImage, params: &CannyParams) -> EdgePixelSet {
    assert!(
        params.low >= 0.0 && params.low <= params.high,
        "canny thresholds must satisfy 0 <= low <= high"
    );
    let g = smoothed_gradient(img, params);
    let (w, h) = (g.width, g.height);
    let mag_at = |x: isize, y: isize| {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0.0
        } else {
            g.magnitude[y as usize * w + x as usize]
        }
    };

    // 0 = suppressed, 1 = weak candidate, 2 = strong
    let mut state = vec![0u8; w * h];
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let m = g.magnitude[i];
            if m <= 0.0 || m < params.low {
                continue;
            }
            let (ox, oy) = direction_offset(g.gx[i], g.gy[i]);
            let ahead = mag_at(x as isize + ox, y as isize + oy);
            let behind = mag_at(x as isize - ox, y as isize - oy);
            if m > ahead && m >= behind {
                if m >= params.high {
                    state[i] = 2;
                    stack.push((x, y));
                } else {
                    state[i] = 1;
                }
            }
        }
    }

    while let Some((x, y)) = stack.pop() {
        for dy in -1isize..=1 {
            for dx in -1isize..=1 {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if state[j] == 1 {
                    state[j] = 2;
                    stack.push((nx as usize, ny as usize));
                }
            }
        }
    }

    let points = state
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == 2)
        .map(|(i, _)| ((i % w) as u32, (i / w) as u32))
        .collect();
    EdgePixelSet { points }
}
