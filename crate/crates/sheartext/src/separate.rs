//! Dumps the separated parts of one frame as pseudo-colored PNGs.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use sheartext_core::haar::dwt2_haar;
use sheartext_core::raster::{resize_to_working, to_grayscale};
use sheartext_core::separation::{Separator, SUBBANDS};

use crate::config::PipelineConfig;
use crate::frame_io::{dump_coefficients, file_stem, load_frame, write_pseudo_color};

#[derive(Clone, Debug, Default)]
pub struct SeparateOptions {
    pub input: PathBuf,
    pub out_dir: PathBuf,
    /// Also write every wavelet band and shearlet plane of the frame.
    pub dump_coefficients: bool,
}

pub const PARTS: [&str; 4] = ["point", "curve", "combined", "residual"];

/// Writes `<stem>_{point,curve,combined,residual}.png` and returns their
/// paths, followed by the coefficient planes when requested.
pub fn run_separate(opts: &SeparateOptions, cfg: &PipelineConfig) -> anyhow::Result<Vec<PathBuf>> {
    cfg.validate()?;
    let separator =
        Separator::new(cfg.detector.separation.clone())?.parallel(cfg.intra_frame_parallel);
    let frame = load_frame(&opts.input)?;
    fs::create_dir_all(&opts.out_dir)
        .with_context(|| format!("cannot create {}", opts.out_dir.display()))?;
    let working = resize_to_working(&to_grayscale(&frame));
    let res = separator.separate(&working)?;
    let stem = file_stem(&opts.input);
    let mut written = Vec::new();
    for (name, plane) in PARTS
        .iter()
        .zip([&res.point_part, &res.curve_part, &res.combined, &res.residual])
    {
        let path = opts.out_dir.join(format!("{stem}_{name}.png"));
        write_pseudo_color(plane, &path)?;
        written.push(path);
    }
    if opts.dump_coefficients {
        let dir: &Path = &opts.out_dir.join(format!("{stem}_coefficients"));
        let pyramid = dwt2_haar(&working, SUBBANDS)?;
        let shearlets = separator.system().analyze(&working)?;
        written.extend(dump_coefficients(&pyramid, &shearlets, dir)?);
    }
    Ok(written)
}
