//! Grid detection of recurrences and lower bounds on their average spacing.
//!
//! A recurrence is a maximal run of grid points where the closeness condition
//! holds, spanning at least `Δ`, confirmed on a ten times finer grid. The run
//! holding `t = 0` is the initial residence and the run touching `t_max` is
//! clipped by the horizon; neither is counted.

use alloc::vec::Vec;

use crate::math;
use crate::par;
use crate::quench::{diagonal_ensemble, expectation_at, fidelity_at, time_average, Quantity, QuenchSetup};
use crate::{Error, Result};

/// Most grid points a single scan may evaluate.
pub const MAX_GRID_POINTS: usize = 200_000_000;

const REFINE: usize = 10;

/// Largest admissible step for a spectrum of norm `norm`: Bohr frequencies
/// then advance by at most `π/5` per step.
pub fn max_step(norm: f64) -> f64 {
    if norm > 0.0 {
        math::PI / (10.0 * norm)
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanParams {
    pub u: f64,
    pub delta: f64,
    pub dt: f64,
    pub t_max: f64,
}

impl ScanParams {
    pub fn new(u: f64, delta: f64, dt: f64, t_max: f64) -> Self {
        Self { u, delta, dt, t_max }
    }

    fn validate_grid(&self) -> Result<usize> {
        if !(self.delta > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("delta = {} must be positive", self.delta)));
        }
        if !(self.dt > 0.0 && self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidParameter("dt and t_max must be positive".into()));
        }
        let steps = math::floor(self.t_max / self.dt);
        if steps >= MAX_GRID_POINTS as f64 {
            return Err(Error::InvalidParameter(alloc::format!("scan grid of {steps} steps is too large")));
        }
        Ok(steps as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RecurrenceEvent {
    pub t_start: f64,
    pub duration: f64,
}

/// Events of one closeness condition on one grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanOutcome {
    pub events: Vec<RecurrenceEvent>,
    /// The condition held at every grid point.
    pub never_left: bool,
    pub satisfied_points: usize,
    pub grid_points: usize,
}

impl ScanOutcome {
    /// `t_start(last) / n`, undefined without events.
    pub fn empirical_t(&self) -> Option<f64> {
        self.events.last().map(|e| e.t_start / self.events.len() as f64)
    }
}

fn runs(flags: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &f) in flags.iter().enumerate() {
        match (f, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, flags.len() - 1));
    }
    out
}

/// Scans `close(t)` on `t_i = i · dt`, `0 <= t_i <= t_max`.
pub fn scan_condition<C: Fn(f64) -> bool + Sync>(close: &C, params: &ScanParams) -> Result<ScanOutcome> {
    let steps = params.validate_grid()?;
    let dt = params.dt;
    let flags: Vec<bool> = par::map_chunks(steps + 1, 8192, |range| {
        range.map(|i| close(i as f64 * dt)).collect::<Vec<_>>()
    })
    .concat();
    let satisfied_points = flags.iter().filter(|&&f| f).count();
    let never_left = satisfied_points == flags.len();
    let mut events = Vec::new();
    for (a, b) in runs(&flags) {
        if a == 0 || b == steps || ((b - a) as f64) * dt < params.delta {
            continue;
        }
        // the neighbouring coarse points fail, so the true edges lie within
        // one coarse step outside the run
        let h = dt / REFINE as f64;
        let t0 = (a - 1) as f64 * dt;
        let fine: Vec<bool> = (0..=REFINE * (b - a + 2)).map(|j| close(t0 + j as f64 * h)).collect();
        for (fa, fb) in runs(&fine) {
            let span = (fb - fa) as f64 * h;
            if span >= params.delta {
                events.push(RecurrenceEvent { t_start: t0 + fa as f64 * h, duration: span });
            }
        }
    }
    Ok(ScanOutcome { events, never_left, satisfied_points, grid_points: steps + 1 })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RecurrenceScan {
    pub quantity: Quantity,
    pub params: ScanParams,
    pub outcome: ScanOutcome,
    pub empirical_t: Option<f64>,
    /// Absent when the bound's hypothesis fails (`u > c_A`).
    pub lower_bound: Option<f64>,
    /// `|⟨A(0)⟩ - f̄| / ‖A‖`; absent for the fidelity.
    pub c_a: Option<f64>,
}

impl RecurrenceScan {
    pub fn events(&self) -> &[RecurrenceEvent] {
        &self.outcome.events
    }

    pub fn bound_satisfied(&self) -> Option<bool> {
        Some(self.empirical_t? >= self.lower_bound?)
    }
}

/// Finds `(u, Δ, A)`-recurrences (`|⟨A(t)⟩ - ⟨A(0)⟩| <= u‖A‖`) or
/// `(u, Δ)`-recurrences (`1 - F(t) <= u`).
pub fn recurrence_scan(setup: &QuenchSetup, quantity: Quantity, params: &ScanParams) -> Result<RecurrenceScan> {
    let u_max = match quantity {
        Quantity::Observable => 2.0,
        Quantity::Fidelity => 1.0,
    };
    if !(params.u > 0.0 && params.u <= u_max) {
        return Err(Error::InvalidParameter(alloc::format!("u = {} must lie in (0, {u_max}]", params.u)));
    }
    let cap = max_step(setup.spectrum().norm());
    if params.dt > cap {
        return Err(Error::InvalidParameter(alloc::format!("dt = {} exceeds pi/(10 ||H||) = {cap}", params.dt)));
    }
    let purity = diagonal_ensemble(setup).purity;
    let (outcome, c_a, lower_bound) = match quantity {
        Quantity::Observable => {
            let norm = setup.obs_norm();
            let f0 = expectation_at(setup, 0.0)?;
            let radius = params.u * norm;
            let close = |t: f64| expectation_at(setup, t).map(|f| (f - f0).abs() <= radius).unwrap_or(false);
            let outcome = scan_condition(&close, params)?;
            let c_a = if norm > 0.0 { (f0 - time_average(setup)).abs() / norm } else { 0.0 };
            let bound = recurrence_lower_bound(RecurrenceKind::Observable, c_a, params.u, params.delta, purity).ok();
            (outcome, Some(c_a), bound)
        }
        Quantity::Fidelity => {
            let close = |t: f64| 1.0 - fidelity_at(setup, t) <= params.u;
            let outcome = scan_condition(&close, params)?;
            let bound = recurrence_lower_bound(RecurrenceKind::Fidelity, 1.0, params.u, params.delta, purity).ok();
            (outcome, None, bound)
        }
    };
    Ok(RecurrenceScan { quantity, params: *params, empirical_t: outcome.empirical_t(), outcome, lower_bound, c_a })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum RecurrenceKind {
    Observable,
    Fidelity,
}

/// Lower bound on the average recurrence time:
/// `(Δ/2e) exp((c_A - u)/(e √purity))` for observables and
/// `(Δ/2e²) exp((1 - u)/(e purity))` for the fidelity.
pub fn recurrence_lower_bound(kind: RecurrenceKind, c: f64, u: f64, delta: f64, purity: f64) -> Result<f64> {
    if !(delta >= 0.0) || !(purity > 0.0 && purity <= 1.0 + 1e-12) {
        return Err(Error::InvalidParameter("need delta >= 0 and purity in (0, 1]".into()));
    }
    let e = math::E;
    match kind {
        RecurrenceKind::Observable => {
            if !(u > 0.0 && u <= c) {
                return Err(Error::Hypothesis(alloc::format!("u = {u} must lie in (0, c_A = {c}]")));
            }
            Ok(delta / (2.0 * e) * math::exp((c - u) / (e * math::sqrt(purity))))
        }
        RecurrenceKind::Fidelity => {
            if !(u > 0.0 && u <= 1.0) {
                return Err(Error::Hypothesis(alloc::format!("u = {u} must lie in (0, 1]")));
            }
            Ok(delta / (2.0 * e * e) * math::exp((1.0 - u) / (e * purity)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum FermionRecurrenceKind {
    Correlator,
    Fidelity,
}

/// `(Δ/2e) exp((c_f - u)/(e c²) √(L/ν))` for correlators and
/// `(Δ/2e) exp((1 - u) L/(e c⁴))` for the fidelity.
pub fn fermion_recurrence_lower_bound(
    kind: FermionRecurrenceKind,
    c_f: f64,
    u: f64,
    delta: f64,
    c_const: f64,
    nu: f64,
    sites: usize,
) -> Result<f64> {
    if !(delta >= 0.0) || !(c_const > 0.0) || sites == 0 {
        return Err(Error::InvalidParameter("need delta >= 0, c > 0 and L > 0".into()));
    }
    let e = math::E;
    let l = sites as f64;
    match kind {
        FermionRecurrenceKind::Correlator => {
            if !(nu > 0.0 && nu <= 1.0) {
                return Err(Error::InvalidParameter(alloc::format!("filling nu = {nu} must lie in (0, 1]")));
            }
            if !(u > 0.0 && u <= c_f) {
                return Err(Error::Hypothesis(alloc::format!("u = {u} must lie in (0, c_f = {c_f}]")));
            }
            Ok(delta / (2.0 * e) * math::exp((c_f - u) / (e * c_const * c_const) * math::sqrt(l / nu)))
        }
        FermionRecurrenceKind::Fidelity => {
            if !(u > 0.0 && u <= 1.0) {
                return Err(Error::Hypothesis(alloc::format!("u = {u} must lie in (0, 1]")));
            }
            Ok(delta / (2.0 * e) * math::exp((1.0 - u) * l / (e * math::powi(c_const, 4))))
        }
    }
}
