//! Image encryption with two-dimensional linear cellular automata over GF(2),
//! a runs-test randomness score for images, and the usual statistical
//! analyses (histograms, adjacent-pixel correlation, difference images).

pub mod analysis;
pub mod ca_rules;
pub mod cipher;
pub mod cli;
mod error;
pub mod gf2;
pub mod imagecodec;
pub mod keystream;
pub mod randtest;

pub use error::{Error, Result};
