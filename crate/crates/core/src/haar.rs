//! Orthonormal separable 2D Haar wavelet transform.
//!
//! One analysis level maps every 2x2 block `[[a, b], [c, d]]` to
//!
//! ```text
//! approx     = (a + b + c + d) / 2
//! horizontal = (a - b + c - d) / 2
//! vertical   = (a + b - c - d) / 2
//! diagonal   = (a - b - c + d) / 2
//! ```
//!
//! which is the tensor product of the filters `(1, 1)/sqrt(2)` and
//! `(1, -1)/sqrt(2)` followed by decimation by two on each axis.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::GrayImage;

pub const MAX_LEVELS: usize = 8;

/// The three detail sub-bands of one decomposition level.
#[derive(Clone, Debug, PartialEq)]
pub struct DetailBands {
    pub horizontal: GrayImage,
    pub vertical: GrayImage,
    pub diagonal: GrayImage,
}

impl DetailBands {
    pub fn bands(&self) -> [&GrayImage; 3] {
        [&self.horizontal, &self.vertical, &self.diagonal]
    }

    pub fn bands_mut(&mut self) -> [&mut GrayImage; 3] {
        [&mut self.horizontal, &mut self.vertical, &mut self.diagonal]
    }

    fn side(&self) -> usize {
        self.horizontal.width()
    }
}

/// Critically sampled Haar decomposition.
///
/// `details[0]` is the finest level (half the input size); the last entry
/// is the coarsest and shares its size with `approx`.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletPyramid {
    pub approx: GrayImage,
    pub details: Vec<DetailBands>,
}

impl WaveletPyramid {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Side length of the image this pyramid reconstructs to.
    pub fn size(&self) -> usize {
        self.approx.width() << self.details.len()
    }

    pub fn coefficient_count(&self) -> usize {
        self.approx.len()
            + self
                .details
                .iter()
                .map(|d| d.bands().iter().map(|b| b.len()).sum::<usize>())
                .sum::<usize>()
    }

    pub fn energy(&self) -> f64 {
        self.approx.energy()
            + self
                .details
                .iter()
                .flat_map(|d| d.bands())
                .map(GrayImage::energy)
                .sum::<f64>()
    }

    /// Applies `f` to every detail coefficient, leaving `approx` untouched.
    pub fn map_details(&mut self, f: impl Fn(f64) -> f64) {
        for level in &mut self.details {
            for band in level.bands_mut() {
                for v in band.values_mut() {
                    *v = f(*v);
                }
            }
        }
    }

    /// Largest detail coefficient magnitude.
    pub fn max_abs_detail(&self) -> f64 {
        self.details
            .iter()
            .flat_map(|d| d.bands())
            .flat_map(|b| b.values().iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    fn validate(&self) -> Result<()> {
        let mut side = self.approx.width();
        if self.approx.height() != side || self.details.is_empty() {
            return Err(Error::ShapeMismatch);
        }
        for level in self.details.iter().rev() {
            if level
                .bands()
                .iter()
                .any(|b| b.width() != side || b.height() != side)
            {
                return Err(Error::ShapeMismatch);
            }
            side *= 2;
        }
        debug_assert_eq!(side, self.size());
        Ok(())
    }
}

pub(crate) fn check_square_pow2(img: &GrayImage) -> Result<usize> {
    let (w, h) = img.dims();
    if w != h || !w.is_power_of_two() {
        return Err(Error::NotPowerOfTwoSquare {
            width: w,
            height: h,
        });
    }
    Ok(w)
}

/// Decomposes a square power-of-two image into `levels` Haar levels.
pub fn dwt2_haar(img: &GrayImage, levels: usize) -> Result<WaveletPyramid> {
    let size = check_square_pow2(img)?;
    if levels == 0 || levels > MAX_LEVELS || size >> levels == 0 {
        return Err(Error::TooManyLevels { levels, size });
    }
    let mut approx = img.clone();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (next, bands) = analyze_level(&approx);
        details.push(bands);
        approx = next;
    }
    Ok(WaveletPyramid { approx, details })
}

/// Inverts [`dwt2_haar`] exactly (up to rounding).
pub fn idwt2_haar(pyr: &WaveletPyramid) -> Result<GrayImage> {
    pyr.validate()?;
    let mut approx = pyr.approx.clone();
    for level in pyr.details.iter().rev() {
        approx = synthesize_level(&approx, level);
    }
    Ok(approx)
}

fn analyze_level(img: &GrayImage) -> (GrayImage, DetailBands) {
    let half = img.width() / 2;
    let mut approx = GrayImage::zeros(half, half);
    let mut horizontal = GrayImage::zeros(half, half);
    let mut vertical = GrayImage::zeros(half, half);
    let mut diagonal = GrayImage::zeros(half, half);
    for y in 0..half {
        for x in 0..half {
            let a = img.get(2 * x, 2 * y);
            let b = img.get(2 * x + 1, 2 * y);
            let c = img.get(2 * x, 2 * y + 1);
            let d = img.get(2 * x + 1, 2 * y + 1);
            approx.set(x, y, 0.5 * (a + b + c + d));
            horizontal.set(x, y, 0.5 * (a - b + c - d));
            vertical.set(x, y, 0.5 * (a + b - c - d));
            diagonal.set(x, y, 0.5 * (a - b - c + d));
        }
    }
    (
        approx,
        DetailBands {
            horizontal,
            vertical,
            diagonal,
        },
    )
}

fn synthesize_level(approx: &GrayImage, bands: &DetailBands) -> GrayImage {
    let half = bands.side();
    let mut out = GrayImage::zeros(2 * half, 2 * half);
    for y in 0..half {
        for x in 0..half {
            let s = approx.get(x, y);
            let h = bands.horizontal.get(x, y);
            let v = bands.vertical.get(x, y);
            let d = bands.diagonal.get(x, y);
            out.set(2 * x, 2 * y, 0.5 * (s + h + v + d));
            out.set(2 * x + 1, 2 * y, 0.5 * (s - h + v - d));
            out.set(2 * x, 2 * y + 1, 0.5 * (s + h - v - d));
            out.set(2 * x + 1, 2 * y + 1, 0.5 * (s - h - v + d));
        }
    }
    out
}
