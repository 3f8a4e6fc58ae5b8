//! Free-fermion correlators and propagators on a quadratic model.

use anyhow::{Context, Result};
use equilibria_core::fermions::{
    correlator_at, free_moment_reports, free_recurrence_scan, propagator_at, propagator_stats, FreeTarget,
};
use equilibria_core::recurrence::{max_step, ScanParams};
use serde::Serialize;

use super::{grid, Outcome};
use crate::build;
use crate::config::ExperimentConfig;
use crate::output::OutputDir;
use crate::svg::{Plot, Series};

#[derive(Debug, Serialize, Default, Clone)]
pub struct FreeMomentRow {
    pub target: String,
    pub m: usize,
    pub n: usize,
    pub q: usize,
    pub mu_exact: f64,
    pub mu_sampled: Option<f64>,
    pub stderr: Option<f64>,
    pub bound: Option<f64>,
    pub satisfied: Option<bool>,
}

#[derive(Debug, Serialize, Default, Clone)]
pub struct PairRow {
    pub m: usize,
    pub n: usize,
    pub omega_mn: f64,
    pub c_const: f64,
}

#[derive(Serialize, Default)]
struct SeriesRow {
    t: f64,
    re: f64,
    im: f64,
    abs2: f64,
}

#[derive(Serialize, Default)]
struct ModeRow {
    mode: usize,
    energy: f64,
}

#[derive(Debug, Serialize, Default, Clone)]
pub struct FreeRecurrenceRow {
    pub target: String,
    pub m: usize,
    pub n: usize,
    pub u: f64,
    pub delta: f64,
    pub dt: f64,
    pub t_max: f64,
    pub events: usize,
    pub empirical_t: Option<f64>,
    pub bound: Option<f64>,
    pub satisfied: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct FermionSummary {
    pub sites: usize,
    pub particles: f64,
    pub extensivity_constant: f64,
    pub extended: bool,
    pub generic: bool,
    pub orthogonality_error: f64,
    /// `max_t |Σ_n |a_mn(t)|² - 1|` over the series grid, for the first pair's `m`.
    pub unitarity_error: f64,
    pub pairs: Vec<PairRow>,
    pub moments: Vec<FreeMomentRow>,
    pub recurrences: Vec<FreeRecurrenceRow>,
}

pub fn run(cfg: &ExperimentConfig, out: &mut OutputDir, outcome: &mut Outcome) -> Result<FermionSummary> {
    let f = cfg.fermion.as_ref().context("fermion section missing")?;
    let model = build::fermion_model(cfg, f)?;
    let state = build::fermion_state(cfg, f, &model)?;
    let l = model.sites();
    if !model.is_extended(f.extensivity_threshold) {
        outcome.warn(format!(
            "mode functions are not extended: max|O| sqrt(L) = {:.3} exceeds {}",
            model.extensivity_constant(),
            f.extensivity_threshold
        ));
    }
    if !model.genericity().passed {
        outcome.warn("mode energies are not generic; moment bounds do not apply".into());
    }
    out.csv(
        "modes.csv",
        &model.energies().iter().enumerate().map(|(mode, &energy)| ModeRow { mode, energy }).collect::<Vec<_>>(),
    )?;

    let pairs = f.resolved_pairs();
    let params = f.sample.then(|| build::sampling(cfg, cfg.sampling.horizon.unwrap_or(1e4 * std::f64::consts::TAU / min_mode_gap(model.energies()))));
    let mut pair_rows = Vec::new();
    let mut rows = Vec::new();
    for &(m, n) in &pairs {
        let stats = propagator_stats(&model, m, n)?;
        pair_rows.push(PairRow { m, n, omega_mn: stats.omega_mn, c_const: stats.c_const });
        let targets = [("correlator", FreeTarget::Correlator { state: &state, m, n }), ("propagator", FreeTarget::PropagatorSq { m, n })];
        for (name, target) in targets {
            let orders: Vec<usize> = f.orders.iter().copied().filter(|&q| name == "propagator" || m == n || q % 2 == 0).collect();
            if orders.len() < f.orders.len() {
                log::info!("({m}, {n}): odd moments of a complex correlator are skipped");
            }
            let reports = free_moment_reports(&model, &target, &orders, params.as_ref()).with_context(|| format!("{name} ({m}, {n})"))?;
            rows.extend(reports.into_iter().map(|r| FreeMomentRow {
                target: name.into(),
                m,
                n,
                q: r.q,
                mu_exact: r.mu_exact,
                mu_sampled: r.mu_sampled,
                stderr: r.sampled_stderr,
                bound: r.bound,
                satisfied: r.bound_satisfied,
            }));
        }
    }
    outcome.violations += rows.iter().filter(|r| r.satisfied == Some(false)).count();
    out.csv("pairs.csv", &pair_rows)?;
    out.csv("moments.csv", &rows)?;

    let (m0, n0) = pairs[0];
    let times = grid(cfg.series.t_max, cfg.series.points);
    let corr = times
        .iter()
        .map(|&t| {
            let z = correlator_at(&model, &state, m0, n0, t)?;
            Ok(SeriesRow { t, re: z.re, im: z.im, abs2: z.norm_sqr() })
        })
        .collect::<Result<Vec<_>>>()?;
    let prop = times
        .iter()
        .map(|&t| {
            let z = propagator_at(&model, m0, n0, t)?;
            Ok(SeriesRow { t, re: z.re, im: z.im, abs2: z.norm_sqr() })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut unitarity_error = 0.0f64;
    for &t in &times {
        let total: f64 = (0..l).map(|n| propagator_at(&model, m0, n, t).map(|z| z.norm_sqr())).sum::<equilibria_core::Result<f64>>()?;
        unitarity_error = unitarity_error.max((total - 1.0).abs());
    }
    out.csv("correlator_series.csv", &corr)?;
    out.csv("propagator_series.csv", &prop)?;
    let plot = Plot {
        title: format!("Site pair ({m0}, {n0})"),
        x_label: "t".into(),
        y_label: "value".into(),
        log_y: false,
        series: vec![
            Series::line("Re <f_m+ f_n(t)>", corr.iter().map(|r| (r.t, r.re)).collect()),
            Series::line("Im <f_m+ f_n(t)>", corr.iter().map(|r| (r.t, r.im)).collect()),
            Series::line("|a_mn(t)|^2", prop.iter().map(|r| (r.t, r.abs2)).collect()),
        ],
    };
    out.text("series.svg", &plot.render())?;

    let mut recurrences = Vec::new();
    if let Some(r) = &f.recurrence {
        let norm = model.energies().iter().fold(0.0f64, |a, e| a.max(e.abs()));
        let dt = r.dt.unwrap_or_else(|| max_step(norm).min(r.t_max / 10.0));
        let params = ScanParams::new(r.u, r.delta, dt, r.t_max);
        let targets = [("correlator", FreeTarget::Correlator { state: &state, m: m0, n: n0 }), ("fidelity", FreeTarget::PropagatorSq { m: m0, n: m0 })];
        for (name, target) in targets {
            let scan = free_recurrence_scan(&model, &target, &params).with_context(|| format!("{name} recurrence scan"))?;
            let (m, n) = target.sites();
            recurrences.push(FreeRecurrenceRow {
                target: name.into(),
                m,
                n,
                u: r.u,
                delta: r.delta,
                dt,
                t_max: r.t_max,
                events: scan.outcome.events.len(),
                empirical_t: scan.empirical_t,
                bound: scan.lower_bound,
                satisfied: scan.empirical_t.zip(scan.lower_bound).map(|(t, b)| t >= b),
            });
        }
        outcome.violations += recurrences.iter().filter(|r| r.satisfied == Some(false)).count();
        out.csv("recurrence.csv", &recurrences)?;
    }

    Ok(FermionSummary {
        sites: l,
        particles: state.particles(),
        extensivity_constant: model.extensivity_constant(),
        extended: model.is_extended(f.extensivity_threshold),
        generic: model.genericity().passed,
        orthogonality_error: model.orthogonality_error(),
        unitarity_error,
        pairs: pair_rows,
        moments: rows,
        recurrences,
    })
}

/// Smallest gap between distinct mode energies.
fn min_mode_gap(e: &[f64]) -> f64 {
    e.windows(2).map(|w| w[1] - w[0]).filter(|&g| g > 0.0).fold(f64::INFINITY, f64::min).min(1.0)
}
