//! Alpha-blended overlay of attribution map, regions and catalog positions.

use anyhow::{bail, Result};
use image::{Rgb, RgbImage};
use proxeval_core::geometry::PixelPoint;
use proxeval_core::imageproc::GrayscaleImage;
use proxeval_core::regions::BoundingRegion;

pub const BOX_COLOR: Rgb<u8> = Rgb([255, 255, 0]);
pub const AR_INSIDE_COLOR: Rgb<u8> = Rgb([0, 255, 0]);
pub const AR_OUTSIDE_COLOR: Rgb<u8> = Rgb([255, 0, 0]);
pub const FLARE_COLOR: Rgb<u8> = Rgb([0, 160, 255]);

/// Gray used in place of a missing magnetogram.
pub const NEUTRAL_BACKGROUND: u8 = 128;

/// Arm length of the AR (`+`) and flare (`x`) markers.
pub const MARKER_ARM: i64 = 3;

/// Base layer `round(0.5·mag + 0.5·am)`, then region boxes, flare markers
/// and AR markers (green inside a region, red outside).
pub fn render_overlay(
    magnetogram: Option<&GrayscaleImage>,
    am: &GrayscaleImage,
    regions: &[BoundingRegion],
    ars: &[PixelPoint],
    flares: &[PixelPoint],
) -> Result<RgbImage> {
    let (w, h) = (am.width(), am.height());
    if let Some(m) = magnetogram {
        if (m.width(), m.height()) != (w, h) {
            bail!(
                "magnetogram is {}x{} but attribution map is {}x{}",
                m.width(),
                m.height(),
                w,
                h
            );
        }
    }
    let mut img = RgbImage::from_fn(w as u32, h as u32, |x, y| {
        let a = u16::from(am.get(x as usize, y as usize));
        let m = magnetogram.map_or(u16::from(NEUTRAL_BACKGROUND), |m| {
            u16::from(m.get(x as usize, y as usize))
        });
        // (a + m) / 2 rounded half up
        let v = (a + m).div_ceil(2) as u8;
        Rgb([v, v, v])
    });

    for r in regions {
        let b = r.bbox;
        let (x0, y0) = (b.min_x.round() as i64, b.min_y.round() as i64);
        let (x1, y1) = (b.max_x.round() as i64, b.max_y.round() as i64);
        for x in x0..=x1 {
            put(&mut img, x, y0, BOX_COLOR);
            put(&mut img, x, y1, BOX_COLOR);
        }
        for y in y0..=y1 {
            put(&mut img, x0, y, BOX_COLOR);
            put(&mut img, x1, y, BOX_COLOR);
        }
    }
    for f in flares {
        let (cx, cy) = (f.x.round() as i64, f.y.round() as i64);
        for k in -MARKER_ARM..=MARKER_ARM {
            put(&mut img, cx + k, cy + k, FLARE_COLOR);
            put(&mut img, cx + k, cy - k, FLARE_COLOR);
        }
    }
    for a in ars {
        let inside = regions.iter().any(|r| r.bbox.contains(*a));
        let color = if inside {
            AR_INSIDE_COLOR
        } else {
            AR_OUTSIDE_COLOR
        };
        let (cx, cy) = (a.x.round() as i64, a.y.round() as i64);
        for k in -MARKER_ARM..=MARKER_ARM {
            put(&mut img, cx + k, cy, color);
            put(&mut img, cx, cy + k, color);
        }
    }
    Ok(img)
}

fn put(img: &mut RgbImage, x: i64, y: i64, c: Rgb<u8>) {
    if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.put_pixel(x as u32, y as u32, c);
    }
}
