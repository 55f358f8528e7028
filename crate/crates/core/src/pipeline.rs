//! Frame-level orchestration from a gray frame to text boxes.

use alloc::vec::Vec;

use crate::error::Result;
use crate::image::{GrayImage, Rect};
use crate::raster::resize_to_working;
use crate::refine::{close_3x3, extract_components, to_boxes, tpr_filter, RefineConfig};
use crate::separation::{combined_map, SeparationConfig, SeparationResult, Separator, WORKING_SIZE};
use crate::textmap::{kmeans2, select_text_cluster, FeatureMap, TextMask};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    Resize,
    Separate,
    Features,
    Cluster,
    Refine,
    Boxes,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Resize,
        Stage::Separate,
        Stage::Features,
        Stage::Cluster,
        Stage::Refine,
        Stage::Boxes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Resize => "resize",
            Stage::Separate => "separate",
            Stage::Features => "features",
            Stage::Cluster => "cluster",
            Stage::Refine => "refine",
            Stage::Boxes => "boxes",
        }
    }
}

/// Hook wrapped around every stage, e.g. to time it.
pub trait StageObserver {
    fn stage<T>(&mut self, stage: Stage, run: impl FnOnce() -> T) -> T;
}

/// Observer that does nothing.
pub struct NoObserver;

impl StageObserver for NoObserver {
    fn stage<T>(&mut self, _: Stage, run: impl FnOnce() -> T) -> T {
        run()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetectorConfig {
    pub separation: SeparationConfig,
    pub refine: RefineConfig,
}

/// Every intermediate product of one frame.
#[derive(Clone, Debug)]
pub struct FrameDetection {
    pub separation: SeparationResult,
    pub features: FeatureMap,
    pub cluster_mask: TextMask,
    pub refined_mask: TextMask,
    /// Boxes on the working grid.
    pub working_boxes: Vec<Rect>,
    /// Boxes in the coordinates of the input frame.
    pub boxes: Vec<Rect>,
}

#[derive(Clone, Debug)]
pub struct Detector {
    separator: Separator,
    refine: RefineConfig,
}

impl Detector {
    pub fn new(cfg: &DetectorConfig) -> Result<Self> {
        cfg.refine.validate()?;
        Ok(Self {
            separator: Separator::new(cfg.separation.clone())?,
            refine: cfg.refine.clone(),
        })
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.separator = self.separator.parallel(parallel);
        self
    }

    pub fn separator(&self) -> &Separator {
        &self.separator
    }

    pub fn detect(&self, gray: &GrayImage) -> Result<FrameDetection> {
        self.detect_observed(gray, &mut NoObserver)
    }

    pub fn detect_observed(
        &self,
        gray: &GrayImage,
        obs: &mut impl StageObserver,
    ) -> Result<FrameDetection> {
        let original = (gray.width() as u32, gray.height() as u32);
        let working = obs.stage(Stage::Resize, || resize_to_working(gray));
        let separation = obs.stage(Stage::Separate, || self.separator.separate(&working))?;
        let features = obs.stage(Stage::Features, || {
            FeatureMap::from_combined(combined_map(&separation))
        });
        let cluster_mask = obs.stage(Stage::Cluster, || {
            let km = kmeans2(&features);
            select_text_cluster(&km.labels, &features.combined)
        })?;
        let refined_mask = obs.stage(Stage::Refine, || {
            close_3x3(&tpr_filter(&cluster_mask, &self.refine))
        });
        let size = WORKING_SIZE as u32;
        let (working_boxes, boxes) = obs.stage(Stage::Boxes, || {
            let regions = extract_components(&refined_mask);
            let working_boxes = to_boxes(&regions, &self.refine, (size, size), (size, size));
            let boxes = to_boxes(&regions, &self.refine, (size, size), original);
            (working_boxes, boxes)
        });
        Ok(FrameDetection {
            separation,
            features,
            cluster_mask,
            refined_mask,
            working_boxes,
            boxes,
        })
    }
}
