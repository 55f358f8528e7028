#![cfg_attr(not(feature = "std"), no_std)]
//! Text localization in video frames from a combined Haar wavelet and
//! band-limited shearlet decomposition.
//!
//! The crate is `no_std` + `alloc`. The pipeline, stage by stage:
//!
//! - [`raster`]: colour to gray, resampling to the 256x256 working grid,
//!   pseudo-colour rendering and box overlays.
//! - [`haar`] and [`shearlet`]: the two dictionaries.
//! - [`separation`]: iterative shrinkage that splits a frame into point-like
//!   (wavelet) and curve-like (shearlet) parts and forms the combined map.
//! - [`textmap`]: local standard deviation features and two-cluster K-means.
//! - [`refine`]: text presence ratio filtering, 3x3 closing, connected
//!   components and line-level boxes.
//! - [`evaluate`]: rectangle matching, recall/precision/f-measure and block
//!   detection rates.
//! - [`pipeline`]: the stages above chained for one frame.
//!
//! Features: `std` switches off `no_std`; `rayon` (implies `std`) lets the
//! shearlet transform process filters in parallel with bit-identical output;
//! `serde` derives serialization for the configuration and report types.

extern crate alloc;

pub mod error;
pub mod evaluate;
pub mod fft;
pub mod haar;
pub mod image;
pub mod pipeline;
pub mod raster;
pub mod refine;
pub mod separation;
pub mod shearlet;
pub mod textmap;

pub use error::{Error, Result};
pub use image::{ColorImage, GrayImage, Rect};
