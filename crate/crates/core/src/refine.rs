//! Boundary refinement of the clustered mask and conversion to boxes.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::Rect;
use crate::raster::rescale_rect;
use crate::textmap::TextMask;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RefineConfig {
    /// Side of the sliding text-presence window (odd).
    pub window: usize,
    /// Minimum fraction of text pixels in the window for a pixel to stay text.
    pub tpr_threshold: f64,
    /// Boxes narrower or shorter than this (working-grid pixels) are dropped.
    pub min_box_width: u32,
    pub min_box_height: u32,
    /// Two boxes merge when their vertical overlap is at least this fraction
    /// of the shorter height...
    pub merge_min_vertical_overlap: f64,
    /// ...and the horizontal gap between them is at most this multiple of the
    /// taller height.
    pub merge_max_gap_factor: f64,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            window: 7,
            tpr_threshold: 0.5,
            min_box_width: 8,
            min_box_height: 8,
            merge_min_vertical_overlap: 0.5,
            merge_max_gap_factor: 1.0,
        }
    }
}

impl RefineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window.is_multiple_of(2) {
            return Err(Error::InvalidConfig("TPR window must be odd and at least 3"));
        }
        if !(0.0..=1.0).contains(&self.tpr_threshold) {
            return Err(Error::InvalidConfig("TPR threshold must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.merge_min_vertical_overlap) {
            return Err(Error::InvalidConfig("vertical overlap fraction must lie in [0, 1]"));
        }
        if !(self.merge_max_gap_factor.is_finite() && self.merge_max_gap_factor >= 0.0) {
            return Err(Error::InvalidConfig("merge gap factor must be non-negative"));
        }
        Ok(())
    }
}

/// Text presence ratio filter: a pixel stays text when at least
/// `tpr_threshold` of the `window x window` cells centred on it are text.
/// Cells outside the frame count as background.
pub fn tpr_filter(mask: &TextMask, cfg: &RefineConfig) -> TextMask {
    let (w, h) = (mask.width(), mask.height());
    // summed-area table with a zero border row/column
    let mut sat = vec![0u32; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row = 0u32;
        for x in 0..w {
            row += u32::from(mask.get(x, y));
            sat[(y + 1) * (w + 1) + x + 1] = sat[y * (w + 1) + x + 1] + row;
        }
    }
    let r = cfg.window / 2;
    let cells = (cfg.window * cfg.window) as f64;
    let mut out = TextMask::empty(w, h);
    for y in 0..h {
        let (y0, y1) = (y.saturating_sub(r), (y + r + 1).min(h));
        for x in 0..w {
            let (x0, x1) = (x.saturating_sub(r), (x + r + 1).min(w));
            let count = sat[y1 * (w + 1) + x1] + sat[y0 * (w + 1) + x0]
                - sat[y0 * (w + 1) + x1]
                - sat[y1 * (w + 1) + x0];
            out.set(x, y, f64::from(count) / cells >= cfg.tpr_threshold);
        }
    }
    out
}

fn morph3x3(mask: &TextMask, dilate: bool) -> TextMask {
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    let mut out = TextMask::empty(mask.width(), mask.height());
    for y in 0..h {
        for x in 0..w {
            let mut any = false;
            let mut all = true;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    let v = nx >= 0 && ny >= 0 && nx < w && ny < h && mask.get(nx as usize, ny as usize);
                    any |= v;
                    all &= v;
                }
            }
            out.set(x as usize, y as usize, if dilate { any } else { all });
        }
    }
    out
}

pub fn dilate_3x3(mask: &TextMask) -> TextMask {
    morph3x3(mask, true)
}

pub fn erode_3x3(mask: &TextMask) -> TextMask {
    morph3x3(mask, false)
}

/// Dilation followed by erosion with a full 3x3 element.
pub fn close_3x3(mask: &TextMask) -> TextMask {
    erode_3x3(&dilate_3x3(mask))
}

/// One 8-connected group of text pixels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub pixels: Vec<(u32, u32)>,
    pub bounds: Rect,
}

/// All maximal 8-connected components, ordered by their first pixel in
/// raster order.
pub fn extract_components(mask: &TextMask) -> Vec<Region> {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; w * h];
    let mut regions = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if seen[start] || !mask.labels()[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut pixels = Vec::new();
        let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0, 0);
        while let Some(idx) = stack.pop() {
            let (x, y) = ((idx % w) as u32, (idx / w) as u32);
            pixels.push((x, y));
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (nx, ny) = (i64::from(x) + dx, i64::from(y) + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let n = ny as usize * w + nx as usize;
                    if !seen[n] && mask.labels()[n] {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
        }
        pixels.sort_unstable_by_key(|&(x, y)| (y, x));
        regions.push(Region {
            pixels,
            bounds: Rect::from_corners(x0, y0, x1, y1),
        });
    }
    regions
}

/// Whether two boxes belong to the same text line.
pub fn should_merge(a: &Rect, b: &Rect, cfg: &RefineConfig) -> bool {
    let overlap_top = a.y.max(b.y);
    let overlap_bottom = a.bottom().min(b.bottom());
    let vertical_overlap = overlap_bottom.saturating_sub(overlap_top);
    let shorter = a.h.min(b.h);
    if f64::from(vertical_overlap) < cfg.merge_min_vertical_overlap * f64::from(shorter) {
        return false;
    }
    let gap = a.x.max(b.x).saturating_sub(a.right().min(b.right()));
    f64::from(gap) <= cfg.merge_max_gap_factor * f64::from(a.h.max(b.h))
}

/// Repeatedly merges line-mates until no pair qualifies. Input order does
/// not matter; the result is sorted.
pub fn merge_boxes(boxes: &[Rect], cfg: &RefineConfig) -> Vec<Rect> {
    let mut boxes = boxes.to_vec();
    boxes.sort_unstable_by_key(|r| (r.y, r.x, r.h, r.w));
    'merge: loop {
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if should_merge(&boxes[i], &boxes[j], cfg) {
                    let merged = boxes[i].union(&boxes[j]);
                    boxes.remove(j);
                    boxes[i] = merged;
                    boxes.sort_unstable_by_key(|r| (r.y, r.x, r.h, r.w));
                    continue 'merge;
                }
            }
        }
        break;
    }
    boxes
}

/// Drops specks, merges line-mates and maps the boxes from the `working`
/// grid back to `original` image coordinates.
pub fn to_boxes(
    regions: &[Region],
    cfg: &RefineConfig,
    working: (u32, u32),
    original: (u32, u32),
) -> Vec<Rect> {
    let kept: Vec<Rect> = regions
        .iter()
        .map(|r| r.bounds)
        .filter(|b| b.w >= cfg.min_box_width && b.h >= cfg.min_box_height)
        .collect();
    merge_boxes(&kept, cfg)
        .iter()
        .map(|b| rescale_rect(b, working, original))
        .collect()
}
