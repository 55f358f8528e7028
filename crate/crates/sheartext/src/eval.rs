//! Scores rectangle files against ground truth, pairing files by stem.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use log::warn;
use serde::Serialize;
use sheartext_core::evaluate::{evaluate, BlockCounts, EvalConfig, EvalPair, EvalReport};
use sheartext_core::Rect;

use crate::rectfile::read_rects;

pub const CSV_HEADER: &str = "frame,recall,precision,fmeasure,ATB,TDB,FDB,MDB";

/// Aggregate figures written as JSON.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalSummary {
    pub recall: f64,
    pub precision: f64,
    pub fmeasure: f64,
    pub dr: f64,
    pub fpr: f64,
    pub mdr: f64,
    pub counts: BlockCounts,
    /// Some rate had a zero denominator and is reported as 0.
    pub undefined_rates: bool,
    /// MDB counts estimates covering less than `tau_full` of their target,
    /// not missed characters.
    pub mdb_is_coverage_proxy: bool,
    pub frames_scored: usize,
    pub skipped_empty_truth: Vec<String>,
    pub unpaired_truth: Vec<String>,
    pub unpaired_estimates: Vec<String>,
    pub config: EvalConfig,
}

#[derive(Clone, Debug)]
pub struct EvalOutcome {
    pub report: EvalReport,
    pub summary: EvalSummary,
    pub csv: String,
}

impl EvalOutcome {
    /// Every truth file had an estimate file and vice versa.
    pub fn fully_paired(&self) -> bool {
        self.summary.unpaired_truth.is_empty() && self.summary.unpaired_estimates.is_empty()
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary is plain data") + "\n"
    }
}

fn rect_files(dir: &Path) -> anyhow::Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).with_context(|| format!("cannot read {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            let stem = path.file_stem().expect("has extension").to_string_lossy().into_owned();
            out.insert(stem, path);
        }
    }
    Ok(out)
}

fn csv_row(frame: &str, recall: f64, precision: f64, f: f64, c: &BlockCounts) -> String {
    format!(
        "{frame},{recall},{precision},{f},{},{},{},{}",
        c.atb, c.tdb, c.fdb, c.mdb
    )
}

/// Scores already-loaded pairs. `unpaired_*` only feed the summary.
pub fn score_pairs(
    pairs: &[EvalPair],
    cfg: &EvalConfig,
    unpaired_truth: Vec<String>,
    unpaired_estimates: Vec<String>,
) -> EvalOutcome {
    let report = evaluate(pairs, cfg);
    let mut csv = String::new();
    writeln!(csv, "{CSV_HEADER}").expect("writing to a String");
    for f in &report.frames {
        writeln!(csv, "{}", csv_row(&f.frame, f.recall, f.precision, f.fmeasure, &f.counts))
            .expect("writing to a String");
    }
    let b = &report.blocks;
    let summary = EvalSummary {
        recall: report.recall,
        precision: report.precision,
        fmeasure: report.fmeasure,
        dr: b.dr,
        fpr: b.fpr,
        mdr: b.mdr,
        counts: b.counts,
        undefined_rates: b.undefined,
        mdb_is_coverage_proxy: true,
        frames_scored: report.frames.len(),
        skipped_empty_truth: report.skipped.clone(),
        unpaired_truth,
        unpaired_estimates,
        config: cfg.clone(),
    };
    EvalOutcome {
        report,
        summary,
        csv,
    }
}

/// Pairs `<stem>.txt` files of the two directories. A truth file with no
/// estimate file is scored as having no detections; an estimate file with
/// no truth is left out. Both are listed in the summary.
pub fn run_eval(truth_dir: &Path, est_dir: &Path, cfg: &EvalConfig) -> anyhow::Result<EvalOutcome> {
    cfg.validate()?;
    let truth = rect_files(truth_dir)?;
    if truth.is_empty() {
        bail!("no ground-truth files in {}", truth_dir.display());
    }
    let estimates = rect_files(est_dir)?;
    let mut pairs = Vec::new();
    let mut unpaired_truth = Vec::new();
    for (stem, path) in &truth {
        let targets: Vec<Rect> = read_rects(path)?;
        let found = match estimates.get(stem) {
            Some(p) => read_rects(p)?,
            None => {
                warn!("{stem}: no estimate file, scored as empty");
                unpaired_truth.push(stem.clone());
                Vec::new()
            }
        };
        if targets.is_empty() {
            warn!("{stem}: empty ground truth, left out of the averages");
        }
        pairs.push(EvalPair {
            frame: stem.clone(),
            targets,
            estimates: found,
        });
    }
    let unpaired_estimates: Vec<String> = estimates
        .keys()
        .filter(|s| !truth.contains_key(*s))
        .cloned()
        .collect();
    for s in &unpaired_estimates {
        warn!("{s}: estimate file without ground truth, ignored");
    }
    Ok(score_pairs(&pairs, cfg, unpaired_truth, unpaired_estimates))
}
