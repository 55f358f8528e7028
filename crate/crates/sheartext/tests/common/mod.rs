#![allow(dead_code)]

pub mod font;
pub mod synth;
