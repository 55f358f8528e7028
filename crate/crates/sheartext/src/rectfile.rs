//! Rectangle lists: one `x y w h` per line in original image coordinates,
//! `#` starts a comment line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sheartext_core::Rect;

use crate::error::RectFileError;

pub fn parse_rects(text: &str, path: &Path) -> Result<Vec<Rect>, RectFileError> {
    let mut rects = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: String| RectFileError {
            path: path.to_path_buf(),
            line: i + 1,
            reason,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(err(format!("expected `x y w h`, found {} fields", fields.len())));
        }
        let mut v = [0u32; 4];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f
                .parse()
                .map_err(|_| err(format!("`{f}` is not a non-negative integer")))?;
        }
        let r = Rect::new(v[0], v[1], v[2], v[3]);
        if !r.is_valid() {
            return Err(err("width and height must be positive".into()));
        }
        rects.push(r);
    }
    Ok(rects)
}

pub fn read_rects(path: &Path) -> Result<Vec<Rect>, RectFileError> {
    let text = fs::read_to_string(path).map_err(|e| RectFileError {
        path: path.to_path_buf(),
        line: 0,
        reason: e.to_string(),
    })?;
    parse_rects(&text, path)
}

pub fn format_rects(rects: &[Rect]) -> String {
    let mut out = String::new();
    for r in rects {
        writeln!(out, "{} {} {} {}", r.x, r.y, r.w, r.h).expect("writing to a String");
    }
    out
}

pub fn write_rects(rects: &[Rect], path: &Path) -> std::io::Result<()> {
    fs::write(path, format_rects(rects))
}
