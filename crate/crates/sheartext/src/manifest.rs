//! Per-run record of what was processed, where outputs went and how long
//! each stage took.

use std::time::Instant;

use serde::Serialize;
use sheartext_core::pipeline::{Stage, StageObserver};
use sheartext_core::Rect;

use crate::config::PipelineConfig;

pub const TOOL: &str = "shear-text";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FrameOutputs {
    pub rects: Option<String>,
    pub annotated: Option<String>,
    pub cluster: Option<String>,
    pub refined: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameEntry {
    pub input: String,
    pub width: Option<usize>,
    pub height: Option<usize>,
    /// Boxes in input-frame coordinates.
    pub boxes: Vec<Rect>,
    pub outputs: FrameOutputs,
    pub timings_ms: Vec<StageTiming>,
    pub total_ms: f64,
    pub error: Option<String>,
}

impl FrameEntry {
    pub fn failed(input: String, error: String, timings_ms: Vec<StageTiming>) -> Self {
        let total_ms = timings_ms.iter().map(|t| t.ms).sum();
        Self {
            input,
            width: None,
            height: None,
            boxes: Vec::new(),
            outputs: FrameOutputs::default(),
            timings_ms,
            total_ms,
            error: Some(error),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: PipelineConfig,
    pub frames: Vec<FrameEntry>,
}

impl RunManifest {
    pub fn new(config: PipelineConfig, frames: Vec<FrameEntry>) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            config,
            frames,
        }
    }

    pub fn failures(&self) -> usize {
        self.frames.iter().filter(|f| f.error.is_some()).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest is plain data") + "\n"
    }
}

/// Wall-clock timer for pipeline stages and the IO around them.
#[derive(Debug, Default)]
pub struct StageTimer {
    pub timings: Vec<StageTiming>,
}

impl StageTimer {
    pub fn time<T>(&mut self, name: &str, run: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = run();
        self.timings.push(StageTiming {
            stage: name.to_string(),
            ms: start.elapsed().as_secs_f64() * 1e3,
        });
        out
    }

    pub fn total_ms(&self) -> f64 {
        self.timings.iter().map(|t| t.ms).sum()
    }
}

impl StageObserver for StageTimer {
    fn stage<T>(&mut self, stage: Stage, run: impl FnOnce() -> T) -> T {
        self.time(stage.name(), run)
    }
}
