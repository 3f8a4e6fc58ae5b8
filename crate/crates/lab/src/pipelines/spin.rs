//! Pipelines over a single quench setup.

use anyhow::{Context, Result};
use equilibria_core::concentration::{concentration_scale, empirical_tail};
use equilibria_core::moments::{check_genericity, moment_reports};
use equilibria_core::quench::{
    default_tolerance, diagonal_ensemble, expectation_at, fidelity_at, fidelity_average, time_average, DiagonalEnsemble,
    Quantity,
};
use equilibria_core::recurrence::{max_step, recurrence_scan, ScanParams};
use equilibria_core::sampling::default_horizon;
use serde::Serialize;

use super::{grid, Outcome};
use crate::build;
use crate::config::ExperimentConfig;
use crate::output::OutputDir;
use crate::svg::{Plot, Series};

fn quantity_name(q: Quantity) -> &'static str {
    match q {
        Quantity::Observable => "observable",
        Quantity::Fidelity => "fidelity",
    }
}

#[derive(Serialize, Default)]
struct LevelRow {
    index: usize,
    energy: f64,
}

#[derive(Debug, Serialize)]
pub struct ModelSummary {
    pub dim: usize,
    pub norm: f64,
    pub ground_energy: f64,
    pub max_residual: f64,
    pub orthonormality_error: f64,
    pub tolerance: f64,
    /// Neighbouring levels closer than the tolerance.
    pub degenerate_pairs: usize,
    pub min_spacing: Option<f64>,
}

pub fn model(cfg: &ExperimentConfig, out: &mut OutputDir, _outcome: &mut Outcome) -> Result<ModelSummary> {
    let sys = build::system(cfg, cfg.model.as_ref().context("model spec missing")?)?;
    let e = sys.spectrum.eigenvalues();
    let tol = default_tolerance(&sys.spectrum);
    let rows: Vec<LevelRow> = e.iter().enumerate().map(|(index, &energy)| LevelRow { index, energy }).collect();
    out.csv("spectrum.csv", &rows)?;
    let spacings = e.windows(2).map(|w| w[1] - w[0]);
    Ok(ModelSummary {
        dim: e.len(),
        norm: sys.spectrum.norm(),
        ground_energy: e[0],
        max_residual: sys.spectrum.max_residual(sys.hamiltonian.matrix()),
        orthonormality_error: sys.spectrum.orthonormality_error(),
        tolerance: tol,
        degenerate_pairs: spacings.clone().filter(|&s| s <= tol).count(),
        min_spacing: spacings.filter(|&s| s > tol).reduce(f64::min),
    })
}

#[derive(Serialize, Default)]
struct PopulationRow {
    index: usize,
    energy: f64,
    population: f64,
}

#[derive(Serialize, Default)]
struct SeriesRow {
    t: f64,
    observable: f64,
    fidelity: f64,
}

#[derive(Debug, Serialize)]
pub struct QuenchSummary {
    pub dim: usize,
    pub support: usize,
    pub obs_norm: f64,
    pub initial_value: f64,
    pub time_average: f64,
    pub fidelity_average: f64,
    pub diagonal_ensemble: DiagonalEnsemble,
    pub min_gap: Option<f64>,
    pub default_horizon: Option<f64>,
}

pub fn quench(cfg: &ExperimentConfig, out: &mut OutputDir, _outcome: &mut Outcome) -> Result<QuenchSummary> {
    let q = build::quench(cfg)?;
    let setup = &q.setup;
    let mut de = diagonal_ensemble(setup);
    let rows: Vec<PopulationRow> = setup
        .energies()
        .iter()
        .zip(&de.populations)
        .enumerate()
        .map(|(index, (&energy, &population))| PopulationRow { index, energy, population })
        .collect();
    out.csv("populations.csv", &rows)?;
    let series = grid(cfg.series.t_max, cfg.series.points)
        .into_iter()
        .map(|t| Ok(SeriesRow { t, observable: expectation_at(setup, t)?, fidelity: fidelity_at(setup, t) }))
        .collect::<Result<Vec<_>>>()?;
    out.csv("series.csv", &series)?;
    let plot = Plot {
        title: "Quench dynamics".into(),
        x_label: "t".into(),
        y_label: "value".into(),
        log_y: false,
        series: vec![
            Series::line("<A(t)>", series.iter().map(|r| (r.t, r.observable)).collect()),
            Series::line("F(t)", series.iter().map(|r| (r.t, r.fidelity)).collect()),
        ],
    };
    out.text("series.svg", &plot.render())?;
    de.populations.clear();
    let min_gap = setup.min_gap();
    Ok(QuenchSummary {
        dim: setup.dim(),
        support: setup.support().len(),
        obs_norm: setup.obs_norm(),
        initial_value: expectation_at(setup, 0.0)?,
        time_average: time_average(setup),
        fidelity_average: fidelity_average(setup),
        diagonal_ensemble: de,
        min_gap,
        default_horizon: min_gap.map(default_horizon),
    })
}

#[derive(Debug, Serialize, Default, Clone)]
pub struct MomentRow {
    pub quantity: String,
    pub q: usize,
    pub mu_exact: f64,
    pub mu_sampled: Option<f64>,
    pub stderr: Option<f64>,
    pub bound: Option<f64>,
    pub satisfied: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct MomentSummary {
    pub purity: f64,
    pub obs_norm: f64,
    pub horizon: Option<f64>,
    pub n_samples: Option<usize>,
    pub rows: Vec<MomentRow>,
}

pub fn moments(cfg: &ExperimentConfig, out: &mut OutputDir, outcome: &mut Outcome) -> Result<MomentSummary> {
    let q = build::quench(cfg)?;
    let setup = &q.setup;
    let params = cfg.moments.sample.then(|| build::sampling(cfg, build::horizon(cfg, setup)));
    let mut rows = Vec::new();
    for &quantity in &cfg.moments.quantities {
        let reports = moment_reports(setup, quantity, &cfg.moments.orders, params.as_ref())
            .with_context(|| format!("{} moments", quantity_name(quantity)))?;
        for r in reports {
            rows.push(MomentRow {
                quantity: quantity_name(quantity).into(),
                q: r.q,
                mu_exact: r.mu_exact,
                mu_sampled: r.mu_sampled,
                stderr: r.sampled_stderr,
                bound: r.bound,
                satisfied: r.bound_satisfied,
            });
        }
    }
    outcome.violations += rows.iter().filter(|r| r.satisfied == Some(false)).count();
    out.csv("moments.csv", &rows)?;
    Ok(MomentSummary {
        purity: diagonal_ensemble(setup).purity,
        obs_norm: setup.obs_norm(),
        horizon: params.map(|p| p.horizon),
        n_samples: params.map(|p| p.n_samples),
        rows,
    })
}

#[derive(Serialize, Default)]
struct CollisionRow {
    q: usize,
    set_a: String,
    set_b: String,
    sum_a: f64,
    sum_b: f64,
}

#[derive(Debug, Serialize)]
pub struct GenericitySummary {
    pub levels: usize,
    pub tolerance: f64,
    pub q_checked: usize,
    pub passed: bool,
    pub violation_count: usize,
    pub degenerate_pairs: usize,
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

pub fn genericity(cfg: &ExperimentConfig, out: &mut OutputDir, outcome: &mut Outcome) -> Result<GenericitySummary> {
    let sys = build::system(cfg, cfg.model.as_ref().context("model spec missing")?)?;
    let tol = cfg.genericity.tolerance.unwrap_or_else(|| default_tolerance(&sys.spectrum));
    let e = sys.spectrum.eigenvalues();
    let levels: Vec<f64> = if cfg.genericity.populated_only {
        let psi = build::state(cfg, cfg.state.as_ref().context("state spec missing")?, &sys)?;
        let setup = equilibria_core::quench::make_fidelity_setup(&sys.spectrum, &psi)?;
        setup.support().iter().map(|&m| e[m]).collect()
    } else {
        e.to_vec()
    };
    let report = check_genericity(&levels, cfg.genericity.q_max, tol)?;
    let rows: Vec<CollisionRow> = report
        .violations
        .iter()
        .map(|v| CollisionRow { q: v.q, set_a: join(&v.set_a), set_b: join(&v.set_b), sum_a: v.sum_a, sum_b: v.sum_b })
        .collect();
    out.csv("collisions.csv", &rows)?;
    if !report.passed {
        outcome.warn(format!("spectrum is not generic: {} coincidences up to q = {}", report.violation_count, report.q_checked));
    }
    Ok(GenericitySummary {
        levels: levels.len(),
        tolerance: tol,
        q_checked: report.q_checked,
        passed: report.passed,
        violation_count: report.violation_count,
        degenerate_pairs: report.degenerate_levels.len(),
    })
}

#[derive(Debug, Serialize, Default, Clone)]
pub struct TailRow {
    pub quantity: String,
    pub delta: f64,
    pub empirical: f64,
    pub bound: f64,
    pub satisfied: bool,
}

#[derive(Debug, Serialize)]
pub struct TailSummary {
    pub horizon: f64,
    pub n_samples: usize,
    pub scales: Vec<(String, f64)>,
    pub rows: Vec<TailRow>,
}

pub fn tails(cfg: &ExperimentConfig, out: &mut OutputDir, outcome: &mut Outcome) -> Result<TailSummary> {
    let q = build::quench(cfg)?;
    let setup = &q.setup;
    let params = build::sampling(cfg, build::horizon(cfg, setup));
    let mut rows = Vec::new();
    let mut scales = Vec::new();
    let mut plot = Plot {
        title: "Tail probabilities".into(),
        x_label: "delta".into(),
        y_label: "P(|f - mean| >= delta)".into(),
        log_y: true,
        series: Vec::new(),
    };
    for &quantity in &cfg.tails.quantities {
        let name = quantity_name(quantity);
        let top = match quantity {
            Quantity::Observable => 2.0 * setup.obs_norm(),
            Quantity::Fidelity => 1.0,
        };
        let n = cfg.tails.points;
        let deltas: Vec<f64> = (1..=n).map(|k| top * k as f64 / n as f64).collect();
        let report = empirical_tail(setup, quantity, &deltas, &params)?;
        scales.push((name.to_string(), concentration_scale(setup, quantity)));
        for i in 0..deltas.len() {
            rows.push(TailRow {
                quantity: name.into(),
                delta: deltas[i],
                empirical: report.empirical[i],
                bound: report.bound[i],
                satisfied: report.empirical[i] <= report.bound[i],
            });
        }
        plot.series.push(Series { markers: true, ..Series::line(format!("{name} empirical"), deltas.iter().copied().zip(report.empirical.clone()).collect()) });
        plot.series.push(Series { dashed: true, ..Series::line(format!("{name} bound"), deltas.iter().copied().zip(report.bound.clone()).collect()) });
    }
    outcome.violations += rows.iter().filter(|r| !r.satisfied).count();
    out.csv("tails.csv", &rows)?;
    out.text("tails.svg", &plot.render())?;
    Ok(TailSummary { horizon: params.horizon, n_samples: params.n_samples, scales, rows })
}

#[derive(Debug, Serialize, Default, Clone)]
pub struct RecurrenceRow {
    pub quantity: String,
    pub u: f64,
    pub delta: f64,
    pub dt: f64,
    pub t_max: f64,
    pub events: usize,
    pub empirical_t: Option<f64>,
    pub bound: Option<f64>,
    pub c_a: Option<f64>,
    pub satisfied: Option<bool>,
}

#[derive(Serialize, Default)]
struct EventRow {
    quantity: String,
    index: usize,
    t_start: f64,
    duration: f64,
}

#[derive(Debug, Serialize)]
pub struct RecurrenceSummary {
    pub purity: f64,
    pub rows: Vec<RecurrenceRow>,
}

pub fn recur(cfg: &ExperimentConfig, out: &mut OutputDir, outcome: &mut Outcome) -> Result<RecurrenceSummary> {
    let q = build::quench(cfg)?;
    let setup = &q.setup;
    let r = &cfg.recurrence;
    let dt = r.dt.unwrap_or_else(|| max_step(setup.spectrum().norm()).min(r.t_max / 10.0));
    let params = ScanParams::new(r.u, r.delta, dt, r.t_max);
    let mut rows = Vec::new();
    let mut events = Vec::new();
    for &quantity in &r.quantities {
        let name = quantity_name(quantity);
        let scan = recurrence_scan(setup, quantity, &params).with_context(|| format!("{name} recurrence scan"))?;
        if scan.outcome.never_left {
            outcome.warn(format!("{name}: the closeness condition held on the whole grid"));
        }
        events.extend(scan.events().iter().enumerate().map(|(index, e)| EventRow {
            quantity: name.into(),
            index,
            t_start: e.t_start,
            duration: e.duration,
        }));
        rows.push(RecurrenceRow {
            quantity: name.into(),
            u: r.u,
            delta: r.delta,
            dt,
            t_max: r.t_max,
            events: scan.events().len(),
            empirical_t: scan.empirical_t,
            bound: scan.lower_bound,
            c_a: scan.c_a,
            satisfied: scan.bound_satisfied(),
        });
    }
    outcome.violations += rows.iter().filter(|r| r.satisfied == Some(false)).count();
    out.csv("recurrence.csv", &rows)?;
    out.csv("events.csv", &events)?;
    Ok(RecurrenceSummary { purity: diagonal_ensemble(setup).purity, rows })
}
