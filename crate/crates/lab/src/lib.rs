//! Experiment runner for `equilibria-core`.
//!
//! A run reads one JSON configuration, validates it against the pipeline it
//! is meant for, and writes CSV tables, a JSON metadata file and SVG plots to
//! an output directory. CSV is the authoritative output; the plots are a
//! convenience view. Every file is a deterministic function of the
//! configuration and its seed.

pub mod build;
pub mod config;
pub mod output;
pub mod pipelines;
pub mod schema;
pub mod svg;

pub use config::{ConfigError, ExperimentConfig, Pipeline};
pub use pipelines::{run, Outcome};
