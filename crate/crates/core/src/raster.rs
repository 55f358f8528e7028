//! Pixel-level conversions between the input frames and the working grid.

use alloc::vec::Vec;

use crate::image::{ColorImage, GrayImage, Rect};
use crate::separation::WORKING_SIZE;

/// ITU-R BT.601 luma weights.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

pub const BOX_COLOR: [u8; 3] = [0, 255, 0];
pub const BOX_THICKNESS: u32 = 2;

pub fn luminance([r, g, b]: [u8; 3]) -> f64 {
    LUMA_WEIGHTS[0] * f64::from(r) + LUMA_WEIGHTS[1] * f64::from(g) + LUMA_WEIGHTS[2] * f64::from(b)
}

pub fn to_grayscale(img: &ColorImage) -> GrayImage {
    let values = img
        .pixels()
        .iter()
        .map(|&p| {
            // exact for gray pixels; the weighted sum can be off by an ulp
            if p[0] == p[1] && p[1] == p[2] {
                f64::from(p[0])
            } else {
                luminance(p)
            }
        })
        .collect();
    GrayImage::new(img.width(), img.height(), values).expect("dimensions come from a valid image")
}

/// Bilinear resampling with pixel-centre alignment and edge clamping.
pub fn resize_bilinear(img: &GrayImage, width: usize, height: usize) -> GrayImage {
    if img.dims() == (width, height) {
        return img.clone();
    }
    let xs: Vec<(usize, usize, f64)> = sample_positions(img.width(), width);
    let ys: Vec<(usize, usize, f64)> = sample_positions(img.height(), height);
    let mut out = Vec::with_capacity(width * height);
    for &(y0, y1, ty) in &ys {
        for &(x0, x1, tx) in &xs {
            let top = img.get(x0, y0) * (1.0 - tx) + img.get(x1, y0) * tx;
            let bottom = img.get(x0, y1) * (1.0 - tx) + img.get(x1, y1) * tx;
            out.push(top * (1.0 - ty) + bottom * ty);
        }
    }
    GrayImage::new(width, height, out).expect("convex combination of finite values")
}

/// Source neighbours and interpolation weight for each output coordinate.
fn sample_positions(src: usize, dst: usize) -> Vec<(usize, usize, f64)> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|d| {
            let s = ((d as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
            let i0 = s as usize;
            let i1 = (i0 + 1).min(src - 1);
            (i0, i1, s - i0 as f64)
        })
        .collect()
}

/// Resamples to the 256x256 working grid.
pub fn resize_to_working(img: &GrayImage) -> GrayImage {
    resize_bilinear(img, WORKING_SIZE, WORKING_SIZE)
}

/// Maps a rectangle on a `from` grid onto a `to` grid, rounding outward.
pub fn rescale_rect(r: &Rect, from: (u32, u32), to: (u32, u32)) -> Rect {
    let map = |v: u32, f: u32, t: u32, ceil: bool| -> u32 {
        let num = u64::from(v) * u64::from(t);
        let q = if ceil {
            num.div_ceil(u64::from(f))
        } else {
            num / u64::from(f)
        };
        q.min(u64::from(t)) as u32
    };
    let x0 = map(r.x, from.0, to.0, false);
    let y0 = map(r.y, from.1, to.1, false);
    let x1 = map(r.right(), from.0, to.0, true).max(x0 + 1).min(to.0);
    let y1 = map(r.bottom(), from.1, to.1, true).max(y0 + 1).min(to.1);
    Rect::new(x0, y0, x1 - x0, y1 - y0)
}

/// Quantization bin (0..=255) of each value under min-max scaling.
pub fn quantize_bins(values: &GrayImage) -> Vec<u8> {
    let (lo, hi) = values.min_max();
    let range = hi - lo;
    values
        .values()
        .iter()
        .map(|&v| {
            if range <= 0.0 {
                0
            } else {
                libm::floor((v - lo) / range * 256.0).clamp(0.0, 255.0) as u8
            }
        })
        .collect()
}

/// Blue (lowest bin) to red (highest bin) rendering of a coefficient plane.
/// A constant plane renders uniformly blue.
pub fn pseudo_color(coeffs: &GrayImage) -> ColorImage {
    let pixels = quantize_bins(coeffs)
        .into_iter()
        .map(|b| [b, 0, 255 - b])
        .collect();
    ColorImage::new(coeffs.width(), coeffs.height(), pixels).expect("dimensions come from a valid image")
}

/// Draws `thickness`-pixel outlines inside each box, in list order.
pub fn draw_boxes(img: &ColorImage, boxes: &[Rect], color: [u8; 3], thickness: u32) -> ColorImage {
    let mut out = img.clone();
    let (w, h) = (img.width() as u32, img.height() as u32);
    for b in boxes {
        let x1 = b.right().min(w);
        let y1 = b.bottom().min(h);
        for y in b.y..y1 {
            for x in b.x..x1 {
                let on_edge = x < b.x + thickness
                    || y < b.y + thickness
                    || x + thickness >= b.right()
                    || y + thickness >= b.bottom();
                if on_edge {
                    out.set(x as usize, y as usize, color);
                }
            }
        }
    }
    out
}

/// Renders a mask with text black on a white background.
pub fn render_mask(width: usize, height: usize, labels: &[bool]) -> ColorImage {
    let pixels = labels
        .iter()
        .map(|&t| if t { [0, 0, 0] } else { [255, 255, 255] })
        .collect();
    ColorImage::new(width, height, pixels).expect("mask matches its dimensions")
}
