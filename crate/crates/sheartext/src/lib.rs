//! File formats, batch runners and the `shear-text` command line around
//! [`sheartext_core`].

pub mod bench;
pub mod cli;
pub mod config;
pub mod detect;
pub mod error;
pub mod eval;
pub mod frame_io;
pub mod manifest;
pub mod rectfile;
pub mod separate;

pub use sheartext_core as core;
