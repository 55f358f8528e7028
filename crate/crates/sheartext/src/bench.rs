//! Per-stage timing statistics over a set of frames.

use std::fmt::Write as _;
use std::path::PathBuf;

use log::warn;

use crate::config::PipelineConfig;
use crate::detect::{build_detector, detect_frame, resolve_inputs};
use crate::manifest::{FrameEntry, FrameOutputs, RunManifest, StageTimer};

/// Median, nearest-rank 90th percentile and maximum of one stage.
#[derive(Clone, Debug, PartialEq)]
pub struct StageStats {
    pub stage: String,
    pub median_ms: f64,
    pub p90_ms: f64,
    pub max_ms: f64,
}

pub fn stats(stage: &str, samples: &[f64]) -> StageStats {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    let median_ms = if n == 0 {
        0.0
    } else if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    };
    let rank = (0.9 * n as f64).ceil() as usize;
    StageStats {
        stage: stage.to_string(),
        median_ms,
        p90_ms: if n == 0 { 0.0 } else { s[rank.max(1) - 1] },
        max_ms: s.last().copied().unwrap_or(0.0),
    }
}

/// Runs frames one after another so timings are not skewed by contention.
/// Nothing is written.
pub fn run_bench(inputs: &[PathBuf], cfg: &PipelineConfig) -> anyhow::Result<RunManifest> {
    let detector = build_detector(cfg)?;
    let frames = resolve_inputs(inputs)?
        .into_iter()
        .map(|(path, _)| {
            let mut timer = StageTimer::default();
            let input = path.display().to_string();
            match detect_frame(&detector, &path, &mut timer) {
                Ok((frame, det)) => FrameEntry {
                    input,
                    width: Some(frame.width()),
                    height: Some(frame.height()),
                    boxes: det.boxes,
                    outputs: FrameOutputs::default(),
                    total_ms: timer.total_ms(),
                    timings_ms: timer.timings,
                    error: None,
                },
                Err(e) => {
                    warn!("skipped {input}: {e:#}");
                    FrameEntry::failed(input, format!("{e:#}"), timer.timings)
                }
            }
        })
        .collect();
    Ok(RunManifest::new(cfg.clone(), frames))
}

/// Statistics for every stage seen, in first-seen order, then the total.
pub fn summarize(manifest: &RunManifest) -> Vec<StageStats> {
    let ok: Vec<&FrameEntry> = manifest.frames.iter().filter(|f| f.error.is_none()).collect();
    let mut names: Vec<&str> = Vec::new();
    for f in &ok {
        for t in &f.timings_ms {
            if !names.contains(&t.stage.as_str()) {
                names.push(&t.stage);
            }
        }
    }
    let mut rows: Vec<StageStats> = names
        .iter()
        .map(|name| {
            let samples: Vec<f64> = ok
                .iter()
                .flat_map(|f| f.timings_ms.iter().filter(|t| t.stage == *name).map(|t| t.ms))
                .collect();
            stats(name, &samples)
        })
        .collect();
    let totals: Vec<f64> = ok.iter().map(|f| f.total_ms).collect();
    rows.push(stats("total", &totals));
    rows
}

pub fn format_table(frames: usize, rows: &[StageStats]) -> String {
    let mut out = String::new();
    writeln!(out, "frames: {frames}").unwrap();
    writeln!(out, "{:<10} {:>10} {:>10} {:>10}", "stage", "median_ms", "p90_ms", "max_ms").unwrap();
    for r in rows {
        writeln!(
            out,
            "{:<10} {:>10.2} {:>10.2} {:>10.2}",
            r.stage, r.median_ms, r.p90_ms, r.max_ms
        )
        .unwrap();
    }
    out
}
