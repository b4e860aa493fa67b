//! File formats, a concurrent sweep runner and the `noiseknn` command line
//! on top of [`noiseknn_core`].

pub mod commands;
pub mod data;
mod error;
pub mod report;
pub mod spec;
pub mod sweep;

pub use error::{Error, Result};
pub use noiseknn_core as core;
