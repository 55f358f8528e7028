//! Run configuration: `key = value` files with `#` comments, overridden by
//! command-line flags.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sheartext_core::evaluate::EvalConfig;
use sheartext_core::pipeline::DetectorConfig;
use sheartext_core::separation::{BlockUpdate, SUBBANDS};

use crate::error::ConfigError;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub detector: DetectorConfig,
    pub eval: EvalConfig,
    /// Worker threads for frame-level parallelism; all cores when unset.
    pub threads: Option<usize>,
    /// Also parallelize the filter bank inside each frame.
    pub intra_frame_parallel: bool,
}

pub const KEYS: &[&str] = &[
    "iterations",
    "weights",
    "lambda_max",
    "lambda_min",
    "update",
    "window",
    "tpr_threshold",
    "min_box_width",
    "min_box_height",
    "merge_min_vertical_overlap",
    "merge_max_gap_factor",
    "alpha",
    "tau_detect",
    "tau_full",
    "threads",
    "intra_frame_parallel",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Value {
        key: key.to_string(),
        reason: format!("cannot parse `{value}`"),
    })
}

impl PipelineConfig {
    /// Sets one option from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let sep = &mut self.detector.separation;
        let refine = &mut self.detector.refine;
        match key {
            "iterations" => sep.iterations = parse(key, value)?,
            "weights" => {
                let parts: Vec<f64> = value
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| parse(key, s))
                    .collect::<Result<_, _>>()?;
                sep.subband_weights = parts.try_into().map_err(|v: Vec<f64>| ConfigError::Value {
                    key: key.to_string(),
                    reason: format!("expected {SUBBANDS} weights, found {}", v.len()),
                })?;
            }
            "lambda_max" => {
                sep.lambda_max = if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(parse(key, value)?)
                }
            }
            "lambda_min" => sep.lambda_min = parse(key, value)?,
            "update" => {
                sep.update = match value {
                    "alternating" => BlockUpdate::Alternating,
                    "joint" => BlockUpdate::Joint,
                    _ => {
                        return Err(ConfigError::Value {
                            key: key.to_string(),
                            reason: "expected `alternating` or `joint`".into(),
                        })
                    }
                }
            }
            "window" => refine.window = parse(key, value)?,
            "tpr_threshold" => refine.tpr_threshold = parse(key, value)?,
            "min_box_width" => refine.min_box_width = parse(key, value)?,
            "min_box_height" => refine.min_box_height = parse(key, value)?,
            "merge_min_vertical_overlap" => refine.merge_min_vertical_overlap = parse(key, value)?,
            "merge_max_gap_factor" => refine.merge_max_gap_factor = parse(key, value)?,
            "alpha" => self.eval.alpha = parse(key, value)?,
            "tau_detect" => self.eval.tau_detect = parse(key, value)?,
            "tau_full" => self.eval.tau_full = parse(key, value)?,
            "threads" => {
                let n: usize = parse(key, value)?;
                if n == 0 {
                    return Err(ConfigError::Value {
                        key: key.to_string(),
                        reason: "must be at least 1".into(),
                    });
                }
                self.threads = Some(n);
            }
            "intra_frame_parallel" => self.intra_frame_parallel = parse(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str, path: &Path) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = || ConfigError::Syntax {
                path: path.to_path_buf(),
                line: i + 1,
                reason: "expected `key = value`".into(),
            };
            let (key, value) = line.split_once('=').ok_or_else(syntax)?;
            if key.trim().is_empty() {
                return Err(syntax());
            }
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        self.apply_text(&text, path)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.detector.separation.validate()?;
        self.detector.refine.validate()?;
        self.eval.validate()?;
        Ok(())
    }

    /// Renders every option as a config file that reproduces this value.
    pub fn to_text(&self) -> String {
        let sep = &self.detector.separation;
        let refine = &self.detector.refine;
        let weights: Vec<String> = sep.subband_weights.iter().map(|w| w.to_string()).collect();
        let mut lines = vec![
            format!("iterations = {}", sep.iterations),
            format!("weights = {}", weights.join(", ")),
            format!(
                "lambda_max = {}",
                sep.lambda_max.map_or("auto".to_string(), |l| l.to_string())
            ),
            format!("lambda_min = {}", sep.lambda_min),
            format!(
                "update = {}",
                match sep.update {
                    BlockUpdate::Alternating => "alternating",
                    BlockUpdate::Joint => "joint",
                }
            ),
            format!("window = {}", refine.window),
            format!("tpr_threshold = {}", refine.tpr_threshold),
            format!("min_box_width = {}", refine.min_box_width),
            format!("min_box_height = {}", refine.min_box_height),
            format!("merge_min_vertical_overlap = {}", refine.merge_min_vertical_overlap),
            format!("merge_max_gap_factor = {}", refine.merge_max_gap_factor),
            format!("alpha = {}", self.eval.alpha),
            format!("tau_detect = {}", self.eval.tau_detect),
            format!("tau_full = {}", self.eval.tau_full),
            format!("intra_frame_parallel = {}", self.intra_frame_parallel),
        ];
        if let Some(n) = self.threads {
            lines.push(format!("threads = {n}"));
        }
        lines.join("\n") + "\n"
    }
}
