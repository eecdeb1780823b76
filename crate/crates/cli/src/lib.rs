//! File formats, synthetic data, metrics and the `tubal` command line on top of `tubal-core`.

pub mod cli;
pub mod io;
pub mod manifest;
pub mod metrics;
pub mod parallel;
pub mod synth;

pub use tubal_core;
