//! Raster input and PNG output.

use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};

use image::{ImageFormat, ImageReader, RgbImage};
use sheartext_core::haar::WaveletPyramid;
use sheartext_core::raster::{draw_boxes, pseudo_color, render_mask, BOX_COLOR, BOX_THICKNESS};
use sheartext_core::shearlet::ShearletCoefficients;
use sheartext_core::textmap::TextMask;
use sheartext_core::{ColorImage, GrayImage, Rect};

use crate::error::FrameError;

pub const SUPPORTED_EXTENSIONS: [&str; 4] = ["png", "bmp", "jpg", "jpeg"];

fn supported(format: ImageFormat) -> bool {
    matches!(format, ImageFormat::Png | ImageFormat::Bmp | ImageFormat::Jpeg)
}

/// Decodes a PNG, BMP or JPEG file into 8-bit RGB. The format is sniffed
/// from the file contents, falling back to the extension.
pub fn load_frame(path: &Path) -> Result<ColorImage, FrameError> {
    let reader = ImageReader::open(path).map_err(|e| match e.kind() {
        ErrorKind::NotFound => FrameError::Missing(path.to_path_buf()),
        _ => FrameError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })?;
    let reader = reader.with_guessed_format().map_err(|e| FrameError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    match reader.format() {
        Some(f) if supported(f) => {}
        other => {
            return Err(FrameError::Unsupported {
                path: path.to_path_buf(),
                detail: other.map(|f| format!("{f:?}")),
            })
        }
    }
    let decoded = reader.decode().map_err(|e| FrameError::Decode {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let rgb = decoded.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let pixels = rgb.pixels().map(|p| p.0).collect();
    ColorImage::new(w, h, pixels).map_err(|e| FrameError::Decode {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

pub fn save_png(img: &ColorImage, path: &Path) -> Result<(), FrameError> {
    let raw: Vec<u8> = img.pixels().iter().flatten().copied().collect();
    let buf = RgbImage::from_raw(img.width() as u32, img.height() as u32, raw)
        .expect("buffer length matches dimensions");
    buf.save_with_format(path, ImageFormat::Png)
        .map_err(|e| FrameError::Write {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
}

/// Frame with 2-pixel box outlines, later boxes on top.
pub fn write_annotated(img: &ColorImage, boxes: &[Rect], path: &Path) -> Result<(), FrameError> {
    save_png(&draw_boxes(img, boxes, BOX_COLOR, BOX_THICKNESS), path)
}

pub fn write_pseudo_color(values: &GrayImage, path: &Path) -> Result<(), FrameError> {
    save_png(&pseudo_color(values), path)
}

/// Text black on white.
pub fn write_mask(mask: &TextMask, path: &Path) -> Result<(), FrameError> {
    save_png(&render_mask(mask.width(), mask.height(), mask.labels()), path)
}

/// One pseudo-colored PNG per detail band and per shearlet filter. Returns
/// the written paths in order.
pub fn dump_coefficients(
    pyramid: &WaveletPyramid,
    shearlets: &ShearletCoefficients,
    dir: &Path,
) -> Result<Vec<PathBuf>, FrameError> {
    fs::create_dir_all(dir).map_err(|e| FrameError::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let mut written = Vec::new();
    for (level, bands) in pyramid.details.iter().enumerate() {
        for (tag, band) in ["H", "V", "D"].iter().zip(bands.bands()) {
            let path = dir.join(format!("wave_l{level}_{tag}.png"));
            write_pseudo_color(band, &path)?;
            written.push(path);
        }
    }
    for (kind, plane) in shearlets.iter() {
        let path = dir.join(format!("{}.png", kind.label()));
        write_pseudo_color(plane, &path)?;
        written.push(path);
    }
    Ok(written)
}

/// Expands directories into their supported image files, sorted by name.
/// Plain files are kept as given.
pub fn collect_inputs(inputs: &[PathBuf]) -> std::io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(input)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && has_image_extension(p))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(input.clone());
        }
    }
    Ok(out)
}

fn has_image_extension(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| SUPPORTED_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "frame".to_string())
}
