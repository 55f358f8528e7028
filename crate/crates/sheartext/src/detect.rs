//! Batch text localization over still frames.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use log::{info, warn};
use rayon::prelude::*;
use sheartext_core::pipeline::{Detector, FrameDetection};
use sheartext_core::raster::to_grayscale;
use sheartext_core::ColorImage;

use crate::config::PipelineConfig;
use crate::frame_io::{collect_inputs, file_stem, load_frame, write_annotated, write_mask};
use crate::manifest::{FrameEntry, FrameOutputs, RunManifest, StageTimer};
use crate::rectfile::write_rects;

pub const THREADS_ENV: &str = "SHEARTEXT_THREADS";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, Default)]
pub struct DetectOptions {
    pub inputs: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub annotate: bool,
    pub dump_cluster: bool,
    pub dump_refined: bool,
}

/// Worker count: the configured value (all cores when unset), capped by
/// `SHEARTEXT_THREADS` when that is set to a positive integer.
pub fn worker_threads(cfg: &PipelineConfig) -> usize {
    let wanted = cfg
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    match cap {
        Some(cap) => wanted.min(cap),
        None => wanted,
    }
    .max(1)
}

pub fn thread_pool(cfg: &PipelineConfig) -> anyhow::Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(worker_threads(cfg))
        .build()
        .context("cannot start worker pool")
}

pub fn build_detector(cfg: &PipelineConfig) -> anyhow::Result<Detector> {
    cfg.validate()?;
    Ok(Detector::new(&cfg.detector)?.parallel(cfg.intra_frame_parallel))
}

/// Inputs with their output stems; two inputs sharing a stem would overwrite
/// each other's outputs, so that is refused.
pub fn resolve_inputs(inputs: &[PathBuf]) -> anyhow::Result<Vec<(PathBuf, String)>> {
    let files = collect_inputs(inputs).context("cannot list inputs")?;
    if files.is_empty() {
        bail!("no input frames");
    }
    let mut seen: HashMap<String, &Path> = HashMap::new();
    for f in &files {
        if let Some(prev) = seen.insert(file_stem(f), f) {
            bail!(
                "{} and {} would write the same outputs",
                prev.display(),
                f.display()
            );
        }
    }
    Ok(files.iter().map(|f| (f.clone(), file_stem(f))).collect())
}

/// Loads and localizes one frame, timing every step.
pub fn detect_frame(
    detector: &Detector,
    path: &Path,
    timer: &mut StageTimer,
) -> anyhow::Result<(ColorImage, FrameDetection)> {
    let frame = timer.time("load", || load_frame(path))?;
    let gray = timer.time("grayscale", || to_grayscale(&frame));
    let detection = detector.detect_observed(&gray, timer)?;
    Ok((frame, detection))
}

fn process(
    detector: &Detector,
    opts: &DetectOptions,
    path: &Path,
    stem: &str,
) -> FrameEntry {
    let mut timer = StageTimer::default();
    let input = path.display().to_string();
    let (frame, detection) = match detect_frame(detector, path, &mut timer) {
        Ok(v) => v,
        Err(e) => return FrameEntry::failed(input, format!("{e:#}"), timer.timings),
    };
    let written = timer.time("write", || write_outputs(opts, stem, &frame, &detection));
    let outputs = match written {
        Ok(o) => o,
        Err(e) => return FrameEntry::failed(input, format!("{e:#}"), timer.timings),
    };
    FrameEntry {
        input,
        width: Some(frame.width()),
        height: Some(frame.height()),
        boxes: detection.boxes,
        outputs,
        total_ms: timer.total_ms(),
        timings_ms: timer.timings,
        error: None,
    }
}

fn write_outputs(
    opts: &DetectOptions,
    stem: &str,
    frame: &ColorImage,
    detection: &FrameDetection,
) -> anyhow::Result<FrameOutputs> {
    let dir = &opts.out_dir;
    let rects = dir.join(format!("{stem}.txt"));
    write_rects(&detection.boxes, &rects)
        .with_context(|| format!("cannot write {}", rects.display()))?;
    let mut out = FrameOutputs {
        rects: Some(rects.display().to_string()),
        ..FrameOutputs::default()
    };
    if opts.annotate {
        let p = dir.join(format!("{stem}_boxes.png"));
        write_annotated(frame, &detection.boxes, &p)?;
        out.annotated = Some(p.display().to_string());
    }
    if opts.dump_cluster {
        let p = dir.join(format!("{stem}_cluster.png"));
        write_mask(&detection.cluster_mask, &p)?;
        out.cluster = Some(p.display().to_string());
    }
    if opts.dump_refined {
        let p = dir.join(format!("{stem}_refined.png"));
        write_mask(&detection.refined_mask, &p)?;
        out.refined = Some(p.display().to_string());
    }
    Ok(out)
}

/// Runs the detector over every input and writes per-frame rectangle files,
/// the requested diagnostics and `manifest.json`. Setup problems are
/// errors; per-frame failures are recorded in the manifest and skipped.
pub fn run_detect(opts: &DetectOptions, cfg: &PipelineConfig) -> anyhow::Result<RunManifest> {
    let detector = build_detector(cfg)?;
    let inputs = resolve_inputs(&opts.inputs)?;
    fs::create_dir_all(&opts.out_dir)
        .with_context(|| format!("cannot create {}", opts.out_dir.display()))?;
    let pool = thread_pool(cfg)?;
    info!(
        "processing {} frame(s) on {} thread(s)",
        inputs.len(),
        pool.current_num_threads()
    );
    let frames: Vec<FrameEntry> = pool.install(|| {
        inputs
            .par_iter()
            .map(|(path, stem)| process(&detector, opts, path, stem))
            .collect()
    });
    for f in &frames {
        match &f.error {
            Some(e) => warn!("skipped {e}"),
            None => info!("{}: {} box(es) in {:.0} ms", f.input, f.boxes.len(), f.total_ms),
        }
    }
    let manifest = RunManifest::new(cfg.clone(), frames);
    let path = opts.out_dir.join(MANIFEST_FILE);
    fs::write(&path, manifest.to_json())
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(manifest)
}
