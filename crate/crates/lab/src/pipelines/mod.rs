//! Named pipelines. Each writes its CSV, JSON and SVG files into one output
//! directory and reports how many rigorous bounds were violated.

use std::path::Path;

use anyhow::Result;
use serde::Serialize;

use crate::config::{ExperimentConfig, Pipeline};
use crate::output::OutputDir;

pub mod bounds;
pub mod fermion;
pub mod figures;
pub mod spin;

#[derive(Debug, Default)]
pub struct Outcome {
    pub violations: usize,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn warn(&mut self, msg: String) {
        log::warn!("{msg}");
        self.warnings.push(msg);
    }
}

#[derive(Serialize)]
struct Metadata<'a, S: Serialize> {
    pipeline: &'static str,
    version: &'static str,
    seed: u64,
    violations: usize,
    warnings: &'a [String],
    summary: &'a S,
}

fn finish<S: Serialize>(out: &mut OutputDir, cfg: &ExperimentConfig, pipeline: Pipeline, outcome: &Outcome, summary: &S) -> Result<()> {
    out.json(
        "metadata.json",
        &Metadata {
            pipeline: pipeline.name(),
            version: env!("CARGO_PKG_VERSION"),
            seed: cfg.seed,
            violations: outcome.violations,
            warnings: &outcome.warnings,
            summary,
        },
    )
}

/// Validates `cfg`, then runs `pipeline` into `dir`.
pub fn run(pipeline: Pipeline, cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome> {
    cfg.validate(pipeline)?;
    let mut out = OutputDir::create(dir)?;
    let mut resolved = cfg.clone();
    resolved.pipeline = Some(pipeline);
    resolved.out = None;
    out.json("config.json", &resolved)?;
    let mut outcome = Outcome::default();
    match pipeline {
        Pipeline::Model => {
            let s = spin::model(cfg, &mut out, &mut outcome)?;
            finish(&mut out, cfg, pipeline, &outcome, &s)?;
        }
        Pipeline::Quench => {
            let s = spin::quench(cfg, &mut out, &mut outcome)?;
            finish(&mut out, cfg, pipeline, &outcome, &s)?;
        }
        Pipeline::Moments => {
            let s = spin::moments(cfg, &mut out, &mut outcome)?;
            finish(&mut out, cfg, pipeline, &outcome, &s)?;
        }
        Pipeline::Genericity => {
            let s = spin::genericity(cfg, &mut out, &mut outcome)?;
            finish(&mut out, cfg, pipeline, &outcome, &s)?;
        }
        Pipeline::Tails => {
            let s = spin::tails(cfg, &mut out, &mut outcome)?;
            finish(&mut out, cfg, pipeline, &outcome, &s)?;
        }
        Pipeline::Recur => {
            let s = spin::recur(cfg, &mut out, &mut outcome)?;
            finish(&mut out, cfg, pipeline, &outcome, &s)?;
        }
        Pipeline::Fermion => {
            let s = fermion::run(cfg, &mut out, &mut outcome)?;
            finish(&mut out, cfg, pipeline, &outcome, &s)?;
        }
        Pipeline::Fig1 => {
            let s = figures::fig1(cfg, &mut out, &mut outcome)?;
            finish(&mut out, cfg, pipeline, &outcome, &s)?;
        }
        Pipeline::Fig2 => {
            let s = figures::fig2(cfg, &mut out, &mut outcome)?;
            finish(&mut out, cfg, pipeline, &outcome, &s)?;
        }
        Pipeline::Bounds => {
            let s = bounds::run(cfg, &mut out, &mut outcome)?;
            finish(&mut out, cfg, pipeline, &outcome, &s)?;
        }
    }
    log::info!("{}: wrote {} files to {}", pipeline.name(), out.files().len(), out.root().display());
    Ok(outcome)
}

/// `n` evenly spaced points on `[0, t_max]`.
fn grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}
