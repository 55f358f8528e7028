//! Per-pixel features of the combined map and their two-cluster split into
//! text and background.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::GrayImage;

pub const KMEANS_MAX_SWEEPS: usize = 100;

/// Binary per-pixel labelling, `true` for text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TextMask {
    width: usize,
    height: usize,
    labels: Vec<bool>,
}

impl TextMask {
    pub fn new(width: usize, height: usize, labels: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        if labels.len() != width * height {
            return Err(Error::PixelCount {
                expected: width * height,
                actual: labels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            labels,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            labels: vec![false; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.labels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, text: bool) {
        self.labels[y * self.width + x] = text;
    }

    pub fn count(&self) -> usize {
        self.labels.iter().filter(|&&t| t).count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMap {
    /// Local standard deviation of the combined map.
    pub sigma: GrayImage,
    /// Combined coefficient magnitudes.
    pub combined: GrayImage,
}

impl FeatureMap {
    pub fn from_combined(combined: GrayImage) -> Self {
        Self {
            sigma: sd_map(&combined),
            combined,
        }
    }

    /// Feature vectors `(sigma, |I|)` in raster order.
    pub fn points(&self) -> Vec<[f64; 2]> {
        self.sigma
            .values()
            .iter()
            .zip(self.combined.values())
            .map(|(&s, &c)| [s, c.abs()])
            .collect()
    }
}

/// Population standard deviation over the 3x3 neighbourhood of each pixel,
/// with edge pixels replicated outward.
pub fn sd_map(img: &GrayImage) -> GrayImage {
    let (w, h) = img.dims();
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
    let mut out = GrayImage::zeros(w, h);
    let mut window = [0.0; 9];
    for y in 0..h {
        for x in 0..w {
            let mut i = 0;
            for dy in -1..=1isize {
                for dx in -1..=1isize {
                    window[i] = img.get(clamp(x as isize + dx, w), clamp(y as isize + dy, h));
                    i += 1;
                }
            }
            let mean = window.iter().sum::<f64>() / 9.0;
            let var = window.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 9.0;
            out.set(x, y, libm::sqrt(var));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansOutcome {
    /// Cluster id per point, 0 or 1.
    pub labels: Vec<u8>,
    pub centers: [[f64; 2]; 2],
    pub sweeps: usize,
    /// Within-cluster sum of squares after each centre update.
    pub objective_history: Vec<f64>,
    /// All points were identical; everything is in cluster 0.
    pub degenerate: bool,
}

impl KMeansOutcome {
    pub fn objective(&self) -> f64 {
        self.objective_history.last().copied().unwrap_or(0.0)
    }
}

#[inline]
fn dist2(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// Within-cluster sum of squares for a labelling and its centres.
pub fn within_cluster_ss(points: &[[f64; 2]], labels: &[u8], centers: &[[f64; 2]; 2]) -> f64 {
    points
        .iter()
        .zip(labels)
        .map(|(p, &l)| dist2(p, &centers[usize::from(l)]))
        .sum()
}

/// Initial centres: the points with the smallest and the largest second
/// coordinate, ties broken by the first coordinate and then by index.
fn initial_centers(points: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let mut lo = points[0];
    let mut hi = points[0];
    for p in &points[1..] {
        if p[1] < lo[1] || (p[1] == lo[1] && p[0] < lo[0]) {
            lo = *p;
        }
        if p[1] > hi[1] || (p[1] == hi[1] && p[0] > hi[0]) {
            hi = *p;
        }
    }
    (lo, hi)
}

/// Lloyd's algorithm with `K = 2` and deterministic initialization.
pub fn kmeans2_points(points: &[[f64; 2]]) -> KMeansOutcome {
    let mut labels = vec![0u8; points.len()];
    if points.is_empty() {
        return KMeansOutcome {
            labels,
            centers: [[0.0; 2]; 2],
            sweeps: 0,
            objective_history: Vec::new(),
            degenerate: true,
        };
    }
    let (lo, hi) = initial_centers(points);
    if lo == hi {
        let objective = within_cluster_ss(points, &labels, &[lo, lo]);
        return KMeansOutcome {
            labels,
            centers: [lo, lo],
            sweeps: 0,
            objective_history: vec![objective],
            degenerate: true,
        };
    }

    let mut centers = [lo, hi];
    let mut history = Vec::new();
    let mut sweeps = 0;
    let mut first = true;
    while sweeps < KMEANS_MAX_SWEEPS {
        sweeps += 1;
        let mut changed = first;
        first = false;
        for (p, l) in points.iter().zip(labels.iter_mut()) {
            let next = u8::from(dist2(p, &centers[1]) < dist2(p, &centers[0]));
            if next != *l {
                *l = next;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = [[0.0f64; 2]; 2];
        let mut counts = [0usize; 2];
        for (p, &l) in points.iter().zip(&labels) {
            let l = usize::from(l);
            sums[l][0] += p[0];
            sums[l][1] += p[1];
            counts[l] += 1;
        }
        for c in 0..2 {
            if counts[c] > 0 {
                centers[c] = [sums[c][0] / counts[c] as f64, sums[c][1] / counts[c] as f64];
            }
        }
        history.push(within_cluster_ss(points, &labels, &centers));
    }

    KMeansOutcome {
        labels,
        centers,
        sweeps,
        objective_history: history,
        degenerate: false,
    }
}

pub fn kmeans2(features: &FeatureMap) -> KMeansOutcome {
    kmeans2_points(&features.points())
}

/// Marks the cluster with the larger mean `|I|` as text. Equal means go to
/// the smaller cluster; a labelling with an empty cluster yields no text.
pub fn select_text_cluster(labels: &[u8], combined: &GrayImage) -> Result<TextMask> {
    if labels.len() != combined.len() {
        return Err(Error::PixelCount {
            expected: combined.len(),
            actual: labels.len(),
        });
    }
    let (w, h) = combined.dims();
    let mut sums = [0.0f64; 2];
    let mut counts = [0usize; 2];
    for (&l, &v) in labels.iter().zip(combined.values()) {
        let l = usize::from(l.min(1));
        sums[l] += v.abs();
        counts[l] += 1;
    }
    if counts[0] == 0 || counts[1] == 0 {
        return Ok(TextMask::empty(w, h));
    }
    let means = [sums[0] / counts[0] as f64, sums[1] / counts[1] as f64];
    let text: u8 = if means[0] > means[1] {
        0
    } else if means[1] > means[0] {
        1
    } else {
        u8::from(counts[1] < counts[0])
    };
    TextMask::new(w, h, labels.iter().map(|&l| l.min(1) == text).collect())
}
