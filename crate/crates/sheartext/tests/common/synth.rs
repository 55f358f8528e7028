//! Generated caption frames with known text boxes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sheartext_core::{ColorImage, Rect};

use super::font::{alphabet, ink, GLYPH_H, GLYPH_W};

pub struct SyntheticFrame {
    pub image: ColorImage,
    pub truth: Vec<Rect>,
}

#[derive(Clone, Copy)]
enum Background {
    Gradient,
    Photo,
}

const MID: f64 = 95.0;
const SPREAD: f64 = 45.0;

fn background(rng: &mut ChaCha8Rng, kind: Background, w: usize, h: usize) -> Vec<f64> {
    match kind {
        Background::Gradient => {
            let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let (c, s) = (angle.cos(), angle.sin());
            let lo: f64 = rng.gen_range(45.0..80.0);
            let span: f64 = rng.gen_range(30.0..60.0);
            let diag = ((w * w + h * h) as f64).sqrt();
            (0..w * h)
                .map(|i| {
                    let (x, y) = ((i % w) as f64, (i / w) as f64);
                    let t = ((x - w as f64 / 2.0) * c + (y - h as f64 / 2.0) * s) / diag + 0.5;
                    lo + span * t
                })
                .collect()
        }
        Background::Photo => {
            // smooth blobs plus mild sensor noise
            let blobs: Vec<(f64, f64, f64, f64)> = (0..6)
                .map(|_| {
                    (
                        rng.gen_range(0.0..w as f64),
                        rng.gen_range(0.0..h as f64),
                        rng.gen_range(20.0..70.0),
                        rng.gen_range(-45.0..45.0),
                    )
                })
                .collect();
            let base: f64 = rng.gen_range(70.0..110.0);
            (0..w * h)
                .map(|i| {
                    let (x, y) = ((i % w) as f64, (i / w) as f64);
                    let v: f64 = blobs
                        .iter()
                        .map(|&(bx, by, r, a)| {
                            a * (-((x - bx).powi(2) + (y - by).powi(2)) / (2.0 * r * r)).exp()
                        })
                        .sum();
                    // squashed into a mid-gray band
                    MID + SPREAD * ((base + v - MID) / SPREAD).tanh() + rng.gen_range(-3.0..3.0)
                })
                .collect()
        }
    }
}

/// A `w x h` frame with one to three horizontal caption lines.
pub fn caption_frame(seed: u64, w: usize, h: usize) -> SyntheticFrame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = if seed.is_multiple_of(2) {
        Background::Gradient
    } else {
        Background::Photo
    };
    let mut gray = background(&mut rng, kind, w, h);
    let letters = alphabet();
    let lines = rng.gen_range(1..=3usize);
    let band = h / lines;
    let mut truth = Vec::new();
    for line in 0..lines {
        let scale = rng.gen_range(2..=3usize);
        let advance = (GLYPH_W + 1) * scale;
        let text_h = GLYPH_H * scale;
        let max_chars = (w - 40) / advance;
        let chars = rng.gen_range(5..=max_chars.min(16));
        let x0 = rng.gen_range(10..w - chars * advance - 10);
        let y0 = line * band + rng.gen_range(8..band - text_h - 8);
        // polarity opposite to the local background keeps every line high-contrast
        let under: f64 = (y0..y0 + text_h)
            .flat_map(|y| (x0..x0 + chars * advance).map(move |x| y * w + x))
            .map(|i| gray[i])
            .sum::<f64>()
            / (text_h * chars * advance) as f64;
        let fg = if under < 128.0 { 235.0 } else { 15.0 };
        let (mut min_x, mut max_x) = (usize::MAX, 0);
        for i in 0..chars {
            let c = letters[rng.gen_range(0..letters.len())];
            for gy in 0..GLYPH_H * scale {
                // one extra pixel to the right emboldens the strokes
                for gx in 0..=GLYPH_W * scale {
                    let inked = (gx < GLYPH_W * scale && ink(c, gx / scale, gy / scale))
                        || (gx > 0 && ink(c, (gx - 1) / scale, gy / scale));
                    if inked {
                        let x = x0 + i * advance + gx;
                        gray[(y0 + gy) * w + x] = fg;
                        min_x = min_x.min(x);
                        max_x = max_x.max(x);
                    }
                }
            }
        }
        truth.push(Rect::new(min_x as u32, y0 as u32, (max_x - min_x + 1) as u32, text_h as u32));
    }
    let pixels = gray
        .iter()
        .map(|&v| {
            let v = v.round().clamp(0.0, 255.0) as u8;
            [v, v, v]
        })
        .collect();
    SyntheticFrame {
        image: ColorImage::new(w, h, pixels).unwrap(),
        truth,
    }
}

pub fn corpus(n: usize) -> Vec<SyntheticFrame> {
    (0..n as u64).map(|s| caption_frame(1000 + s, 256, 256)).collect()
}
