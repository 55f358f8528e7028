//! Command-line interface.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use log::error;

use crate::bench::{format_table, run_bench, summarize};
use crate::config::PipelineConfig;
use crate::detect::{run_detect, DetectOptions};
use crate::error::ConfigError;
use crate::eval::run_eval;
use crate::separate::{run_separate, SeparateOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "shear-text", version, about = "Localize text in video frames")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find text boxes and write one rectangle file per frame.
    Detect {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write each frame with its boxes drawn.
        #[arg(long)]
        annotate: bool,
        /// Also write the clustered text mask.
        #[arg(long)]
        dump_cluster: bool,
        /// Also write the mask after boundary refinement.
        #[arg(long)]
        dump_refined: bool,
        /// Frames, or directories of frames.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Write the point, curve, combined and residual parts of one frame.
    Separate {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write every wavelet band and shearlet plane.
        #[arg(long)]
        dump_coefficients: bool,
        input: PathBuf,
    },
    /// Score rectangle files against ground truth.
    Eval {
        #[command(flatten)]
        config: ConfigArgs,
        /// Directory of ground-truth `<frame>.txt` files.
        #[arg(long)]
        truth: PathBuf,
        /// Directory of detected `<frame>.txt` files.
        #[arg(long)]
        est: PathBuf,
        /// JSON summary path; the per-frame CSV goes next to it. Both are
        /// printed when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time every pipeline stage without writing outputs.
    Bench {
        #[command(flatten)]
        config: ConfigArgs,
        /// Also write the timing manifest here.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

/// Options shared by every command. Flags override the config file.
#[derive(Debug, Default, Args)]
pub struct ConfigArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Separation iterations.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Four sub-band weights, low to high frequency, comma separated.
    #[arg(long)]
    pub weights: Option<String>,
    /// Starting shrinkage threshold, or `auto`.
    #[arg(long)]
    pub lambda_max: Option<String>,
    #[arg(long)]
    pub lambda_min: Option<f64>,
    /// `alternating` or `joint`.
    #[arg(long)]
    pub update: Option<String>,
    /// Text presence window size.
    #[arg(long)]
    pub window: Option<usize>,
    /// Text presence threshold.
    #[arg(long)]
    pub tpr_threshold: Option<f64>,
    #[arg(long)]
    pub min_box_width: Option<u32>,
    #[arg(long)]
    pub min_box_height: Option<u32>,
    #[arg(long)]
    pub merge_min_vertical_overlap: Option<f64>,
    #[arg(long)]
    pub merge_max_gap_factor: Option<f64>,
    /// F-measure precision weight.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub tau_detect: Option<f64>,
    #[arg(long)]
    pub tau_full: Option<f64>,
    /// Frame-level worker threads.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Parallelize the filter bank inside each frame too.
    #[arg(long)]
    pub intra_frame_parallel: bool,
}

impl ConfigArgs {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut push = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k, v));
            }
        };
        push("iterations", self.iterations.map(|v| v.to_string()));
        push("weights", self.weights.clone());
        push("lambda_max", self.lambda_max.clone());
        push("lambda_min", self.lambda_min.map(|v| v.to_string()));
        push("update", self.update.clone());
        push("window", self.window.map(|v| v.to_string()));
        push("tpr_threshold", self.tpr_threshold.map(|v| v.to_string()));
        push("min_box_width", self.min_box_width.map(|v| v.to_string()));
        push("min_box_height", self.min_box_height.map(|v| v.to_string()));
        push(
            "merge_min_vertical_overlap",
            self.merge_min_vertical_overlap.map(|v| v.to_string()),
        );
        push("merge_max_gap_factor", self.merge_max_gap_factor.map(|v| v.to_string()));
        push("alpha", self.alpha.map(|v| v.to_string()));
        push("tau_detect", self.tau_detect.map(|v| v.to_string()));
        push("tau_full", self.tau_full.map(|v| v.to_string()));
        push("threads", self.threads.map(|v| v.to_string()));
        if self.intra_frame_parallel {
            push("intra_frame_parallel", Some("true".into()));
        }
        out
    }

    /// Defaults, then the config file, then the flags.
    pub fn resolve(&self) -> Result<PipelineConfig, ConfigError> {
        let mut cfg = PipelineConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for (k, v) in self.overrides() {
            cfg.set(k, &v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn usage_error(e: impl std::fmt::Display) -> i32 {
    error!("{e:#}");
    eprintln!("error: {e:#}");
    EXIT_USAGE
}

/// Runs one command and returns the process exit status.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Detect {
            config,
            out,
            annotate,
            dump_cluster,
            dump_refined,
            inputs,
        } => {
            let cfg = match config.resolve() {
                Ok(c) => c,
                Err(e) => return usage_error(e),
            };
            let opts = DetectOptions {
                inputs,
                out_dir: out,
                annotate,
                dump_cluster,
                dump_refined,
            };
            match run_detect(&opts, &cfg) {
                Ok(m) if m.failures() == 0 => EXIT_OK,
                Ok(m) => {
                    eprintln!("{} of {} frame(s) failed", m.failures(), m.frames.len());
                    EXIT_PARTIAL
                }
                Err(e) => usage_error(e),
            }
        }
        Command::Separate {
            config,
            out,
            dump_coefficients,
            input,
        } => {
            let cfg = match config.resolve() {
                Ok(c) => c,
                Err(e) => return usage_error(e),
            };
            let opts = SeparateOptions {
                input,
                out_dir: out,
                dump_coefficients,
            };
            match run_separate(&opts, &cfg) {
                Ok(_) => EXIT_OK,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    EXIT_PARTIAL
                }
            }
        }
        Command::Eval {
            config,
            truth,
            est,
            out,
        } => {
            let cfg = match config.resolve() {
                Ok(c) => c,
                Err(e) => return usage_error(e),
            };
            let outcome = match run_eval(&truth, &est, &cfg.eval) {
                Ok(o) => o,
                Err(e) => return usage_error(e),
            };
            match out {
                Some(json) => {
                    let csv = json.with_extension("csv");
                    let written = fs::write(&json, outcome.summary_json())
                        .and_then(|_| fs::write(&csv, &outcome.csv));
                    if let Err(e) = written {
                        return usage_error(format!("cannot write report: {e}"));
                    }
                    let s = &outcome.summary;
                    println!("R {:.4} P {:.4} f {:.4}", s.recall, s.precision, s.fmeasure);
                }
                None => {
                    print!("{}", outcome.csv);
                    print!("{}", outcome.summary_json());
                }
            }
            if outcome.fully_paired() {
                EXIT_OK
            } else {
                EXIT_PARTIAL
            }
        }
        Command::Bench {
            config,
            manifest,
            inputs,
        } => {
            let cfg = match config.resolve() {
                Ok(c) => c,
                Err(e) => return usage_error(e),
            };
            let m = match run_bench(&inputs, &cfg) {
                Ok(m) => m,
                Err(e) => return usage_error(e),
            };
            print!("{}", format_table(m.frames.len(), &summarize(&m)));
            if let Some(path) = manifest {
                if let Err(e) = fs::write(&path, m.to_json()) {
                    return usage_error(format!("cannot write {}: {e}", path.display()));
                }
            }
            if m.failures() == 0 {
                EXIT_OK
            } else {
                EXIT_PARTIAL
            }
        }
    }
}
