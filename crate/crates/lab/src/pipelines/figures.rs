//! Sampled distributions at growing horizons, and purity against system size.

use anyhow::{Context, Result};
use equilibria_core::eigen::diagonalize;
use equilibria_core::lattice::{build_spin_chain, build_state, BasisState, SpinChainSpec};
use equilibria_core::moments::{exact_moment, gap_table, moment_bound, BoundKind};
use equilibria_core::quench::{diagonal_ensemble, make_fidelity_setup, sample_histogram, time_average, Quantity};
use equilibria_core::sampling::default_horizon;
use serde::Serialize;

use super::Outcome;
use crate::build;
use crate::config::{ExperimentConfig, ModelSpec};
use crate::output::OutputDir;
use crate::svg::{Plot, Series};

#[derive(Serialize, Default)]
struct BinRow {
    horizon: f64,
    bin_left: f64,
    bin_right: f64,
    density: f64,
}

#[derive(Debug, Serialize, Default, Clone)]
pub struct HorizonRow {
    pub horizon: f64,
    pub sample_mean: f64,
    pub sample_variance: f64,
    pub occupied_bins: usize,
}

#[derive(Debug, Serialize)]
pub struct Fig1Summary {
    pub time_average: f64,
    pub mu2_exact: f64,
    pub mu2_bound: f64,
    pub bound_satisfied: bool,
    pub min_gap: Option<f64>,
    pub horizons: Vec<HorizonRow>,
    /// `|variance / μ₂ - 1|` at the longest horizon.
    pub final_relative_error: Option<f64>,
    pub variance_decreasing: bool,
}

pub fn fig1(cfg: &ExperimentConfig, out: &mut OutputDir, outcome: &mut Outcome) -> Result<Fig1Summary> {
    let q = build::quench(cfg)?;
    let setup = &q.setup;
    let mut horizons = cfg.fig1.horizons.clone();
    let min_gap = setup.min_gap();
    if cfg.fig1.include_default {
        horizons.push(min_gap.map_or(1.0, default_horizon));
    }
    let table = gap_table(setup, Quantity::Observable, setup.tolerance())?;
    let mu2 = exact_moment(&table, 2)?;
    let purity = diagonal_ensemble(setup).purity;
    let mu2_bound = moment_bound(BoundKind::Observable, setup.obs_norm(), purity, 2);
    let mut bins = Vec::new();
    let mut rows = Vec::new();
    let mut plot = Plot {
        title: "Distribution of <A(t)> over [0, T]".into(),
        x_label: "<A(t)>".into(),
        y_label: "density".into(),
        log_y: false,
        series: Vec::new(),
    };
    for &t in &horizons {
        let params = build::sampling(cfg, t);
        let h = sample_histogram(setup, &params, cfg.sampling.bins, Quantity::Observable)?;
        if h.occupied_bins() <= 1 {
            outcome.warn(format!("T = {t}: <A(t)> is constant, histogram has a single bin"));
        }
        for (w, &d) in h.edges.windows(2).zip(&h.densities) {
            bins.push(BinRow { horizon: t, bin_left: w[0], bin_right: w[1], density: d });
        }
        plot.series.push(Series::histogram(format!("T = {t:.4e}"), &h.edges, &h.densities));
        rows.push(HorizonRow {
            horizon: t,
            sample_mean: h.sample_mean,
            sample_variance: h.sample_variance,
            occupied_bins: h.occupied_bins(),
        });
    }
    out.csv("histograms.csv", &bins)?;
    out.csv("variances.csv", &rows)?;
    out.text("fig1.svg", &plot.render())?;
    let bound_satisfied = mu2 <= mu2_bound;
    if !bound_satisfied {
        outcome.violations += 1;
    }
    let final_relative_error = rows.last().filter(|_| mu2 > 0.0).map(|r| (r.sample_variance / mu2 - 1.0).abs());
    Ok(Fig1Summary {
        time_average: time_average(setup),
        mu2_exact: mu2,
        mu2_bound,
        bound_satisfied,
        min_gap,
        variance_decreasing: rows.windows(2).all(|w| w[1].sample_variance < w[0].sample_variance),
        horizons: rows,
        final_relative_error,
    })
}

/// Least-squares line `y = slope x + intercept`.
#[derive(Debug, Serialize, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Undefined when every `y` is equal.
    pub r2: Option<f64>,
}

pub fn linear_fit(points: &[(f64, f64)]) -> Option<LinearFit> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    // rounding noise on a flat line carries no fit quality
    let r2 = (syy > 1e-20 * n * (1.0 + my * my)).then(|| sxy * sxy / (sxx * syy));
    Some(LinearFit { slope, intercept: my - slope * mx, r2 })
}

#[derive(Debug, Serialize, Default, Clone)]
pub struct PurityRow {
    #[serde(rename = "L")]
    pub sites: usize,
    pub state: String,
    pub purity: f64,
}

#[derive(Debug, Serialize, Clone)]
pub struct StateFit {
    pub state: String,
    pub points: usize,
    /// Fit of `ln tr ω²` against `L`.
    pub fit: Option<LinearFit>,
}

#[derive(Debug, Serialize)]
pub struct Fig2Summary {
    pub rows: Vec<PurityRow>,
    pub fits: Vec<StateFit>,
    /// State names by ascending purity, per `L` with every state present.
    pub ordering: Vec<(usize, Vec<String>)>,
    pub ordering_stable: bool,
}

const CONTROL: &str = "eigenstate";

pub fn fig2(cfg: &ExperimentConfig, out: &mut OutputDir, outcome: &mut Outcome) -> Result<Fig2Summary> {
    let template = match &cfg.model {
        Some(ModelSpec::SpinChain(c)) => c.spec(),
        _ => SpinChainSpec::standard(cfg.fig2.sizes[0]),
    };
    let mut rows = Vec::new();
    for &l in &cfg.fig2.sizes {
        let spec = SpinChainSpec { sites: l, n_up: l / 2, ..template };
        let h = build_spin_chain(&spec).with_context(|| format!("L = {l}"))?;
        let spectrum = diagonalize(&h).with_context(|| format!("diagonalizing L = {l}"))?;
        log::info!("L = {l}: diagonalized dimension {}", spectrum.dim());
        for &kind in &cfg.fig2.states {
            let psi = match build_state(kind, l, spec.n_up) {
                Ok(psi) => psi,
                Err(e) => {
                    log::info!("L = {l}: skipping {}: {e}", kind.name());
                    continue;
                }
            };
            let purity = diagonal_ensemble(&make_fidelity_setup(&spectrum, &psi)?).purity;
            rows.push(PurityRow { sites: l, state: kind.name().into(), purity });
        }
        if cfg.fig2.eigenstate_control {
            let psi = BasisState::normalized(spectrum.vector(0))?;
            let purity = diagonal_ensemble(&make_fidelity_setup(&spectrum, &psi)?).purity;
            rows.push(PurityRow { sites: l, state: CONTROL.into(), purity });
        }
    }
    out.csv("fig2.csv", &rows)?;

    let mut names: Vec<String> = cfg.fig2.states.iter().map(|k| k.name().to_string()).collect();
    if cfg.fig2.eigenstate_control {
        names.push(CONTROL.into());
    }
    let mut fits = Vec::new();
    let mut plot = Plot { title: "Purity of the diagonal ensemble".into(), x_label: "L".into(), y_label: "tr w^2".into(), log_y: true, series: Vec::new() };
    for name in &names {
        let pts: Vec<(f64, f64)> = rows.iter().filter(|r| &r.state == name).map(|r| (r.sites as f64, r.purity)).collect();
        let logs: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x, y.ln())).collect();
        let fit = linear_fit(&logs);
        if fit.is_none() {
            outcome.warn(format!("{name}: fewer than two sizes, no fit"));
        }
        fits.push(StateFit { state: name.clone(), points: pts.len(), fit });
        plot.series.push(Series { markers: true, ..Series::line(name.clone(), pts) });
    }
    out.csv("fits.csv", &fits.iter().map(FitRow::from).collect::<Vec<_>>())?;
    out.text("fig2.svg", &plot.render())?;

    let ordering: Vec<(usize, Vec<String>)> = cfg
        .fig2
        .sizes
        .iter()
        .filter_map(|&l| {
            let mut at: Vec<&PurityRow> = rows.iter().filter(|r| r.sites == l && r.state != CONTROL).collect();
            (at.len() == cfg.fig2.states.len()).then(|| {
                at.sort_by(|a, b| a.purity.total_cmp(&b.purity));
                (l, at.iter().map(|r| r.state.clone()).collect())
            })
        })
        .collect();
    let ordering_stable = ordering.windows(2).all(|w| w[0].1 == w[1].1);
    Ok(Fig2Summary { rows, fits, ordering, ordering_stable })
}

#[derive(Serialize, Default)]
struct FitRow {
    state: String,
    points: usize,
    slope: Option<f64>,
    intercept: Option<f64>,
    r2: Option<f64>,
}

impl From<&StateFit> for FitRow {
    fn from(f: &StateFit) -> Self {
        Self {
            state: f.state.clone(),
            points: f.points,
            slope: f.fit.map(|x| x.slope),
            intercept: f.fit.map(|x| x.intercept),
            r2: f.fit.and_then(|x| x.r2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_a_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 3.0 - 0.5 * i as f64)).collect();
        let f = linear_fit(&pts).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
        assert!((f.intercept - 3.0).abs() < 1e-12);
        assert!((f.r2.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_data_has_no_r2() {
        let f = linear_fit(&[(1.0, 0.0), (2.0, 0.0)]).unwrap();
        assert_eq!(f.slope, 0.0);
        assert_eq!(f.r2, None);
        assert_eq!(linear_fit(&[(1.0, 2.0)]), None);
    }

    #[test]
    fn r2_of_noisy_data() {
        // y = x plus alternating ±1: r² = 1 - SS_res/SS_tot by hand
        let pts = [(0.0, 1.0), (1.0, 0.0), (2.0, 3.0), (3.0, 2.0)];
        let f = linear_fit(&pts).unwrap();
        let pred = |x: f64| f.slope * x + f.intercept;
        let mean = 1.5;
        let ss_res: f64 = pts.iter().map(|&(x, y)| (y - pred(x)).powi(2)).sum();
        let ss_tot: f64 = pts.iter().map(|&(_, y): &(f64, f64)| (y - mean).powi(2)).sum();
        assert!((f.r2.unwrap() - (1.0 - ss_res / ss_tot)).abs() < 1e-12);
    }
}
