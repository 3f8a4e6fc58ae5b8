//! Infinite-time central moments, their bounds and the genericity check.

mod enumerate;
mod gaps;
mod genericity;

use alloc::vec::Vec;

use num_complex::Complex64;

pub use enumerate::{exact_moment, exact_moment_complex, STORED_LIMIT, STREAM_LIMIT};
pub use gaps::{gap_table, GapEntry, GapTable, PRUNE_RELATIVE};
pub use genericity::{check_genericity, GenericityReport, Violation, MAX_REPORTED};

use crate::math;
use crate::matrix::CMatrix;
use crate::quench::{diagonal_ensemble, Quantity, QuenchDynamics, QuenchSetup};
use crate::sampling::{self, Dynamics, Estimate, SamplingParams};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum BoundKind {
    Observable,
    Fidelity,
}

impl From<Quantity> for BoundKind {
    fn from(q: Quantity) -> Self {
        match q {
            Quantity::Observable => BoundKind::Observable,
            Quantity::Fidelity => BoundKind::Fidelity,
        }
    }
}

/// `(q ‖A‖ √purity)^q` for observables, `(q · purity)^q` for the fidelity.
pub fn moment_bound(kind: BoundKind, obs_norm: f64, purity: f64, q: usize) -> f64 {
    let g = match kind {
        BoundKind::Observable => obs_norm * math::sqrt(purity),
        BoundKind::Fidelity => purity,
    };
    math::powi(q as f64 * g, q as i32)
}

/// Number of derangements of `q` elements.
pub fn derangement_count(q: u32) -> u128 {
    let (mut prev, mut cur) = (1u128, 0u128);
    if q == 0 {
        return 1;
    }
    for k in 2..=q as u128 {
        let next = (k - 1) * (cur + prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// `⌊q!/e + 1/2⌋` in floating point, exact for `1 <= q <= 18`.
pub fn derangement_nearest(q: u32) -> u128 {
    let mut fact = 1.0f64;
    for k in 2..=q {
        fact *= k as f64;
    }
    math::floor(fact / math::E + 0.5) as u128
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TracePower {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Compares `|tr (A ω)^q|` with `(‖A‖ √tr ω²)^q`, with `ω = diag(p)` in the
/// eigenbasis.
pub fn trace_power_check(setup: &QuenchSetup, q: usize) -> TracePower {
    let p = setup.populations();
    let d = setup.dim();
    let obs = setup.obs();
    let aw = CMatrix::from_fn(d, d, |i, j| obs[(i, j)] * p[j]);
    let mut acc = aw.clone();
    for _ in 1..q {
        acc = acc.matmul(&aw);
    }
    let lhs = if q == 0 { d as f64 } else { math::abs_c(acc.trace()) };
    let purity: f64 = p.iter().map(|x| x * x).sum();
    let rhs = math::powi(setup.obs_norm() * math::sqrt(purity), q as i32);
    let ok = lhs <= rhs * (1.0 + 1e-10) + 1e-14;
    TracePower { lhs, rhs, ok }
}

/// Monte Carlo estimate of `(f - f̄)^⌈q/2⌉ conj(f - f̄)^⌊q/2⌋` averaged over
/// uniform times, for several orders from one set of samples.
pub fn sampled_moments<D: Dynamics + ?Sized>(
    dynamics: &D,
    mean: Complex64,
    orders: &[usize],
    params: &SamplingParams,
) -> Result<Vec<Estimate>> {
    let values = sampling::sample_values(dynamics, params)?;
    let mut out = Vec::with_capacity(orders.len());
    for &q in orders {
        let xs: Vec<f64> = values
            .iter()
            .map(|&f| sampling::mixed_power(f - mean, q.div_ceil(2), q / 2).re)
            .collect();
        out.push(sampling::estimate(&xs));
    }
    Ok(out)
}

/// Sampled `μ_q` of a quench quantity around its exact infinite-time mean.
pub fn sampled_moment(setup: &QuenchSetup, quantity: Quantity, q: usize, params: &SamplingParams) -> Result<Estimate> {
    let dynamics = QuenchDynamics::new(setup, quantity);
    let mean = Complex64::new(dynamics.average(), 0.0);
    Ok(sampled_moments(&dynamics, mean, &[q], params)?[0])
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentReport {
    pub q: usize,
    pub mu_exact: f64,
    pub mu_sampled: Option<f64>,
    pub sampled_stderr: Option<f64>,
    /// Absent where no theorem applies (odd `q` for correlators).
    pub bound: Option<f64>,
    pub bound_satisfied: Option<bool>,
}

impl MomentReport {
    pub fn new(q: usize, mu_exact: f64, bound: Option<f64>) -> Self {
        Self {
            q,
            mu_exact,
            mu_sampled: None,
            sampled_stderr: None,
            bound,
            bound_satisfied: bound.map(|b| mu_exact <= b),
        }
    }

    pub fn with_sampled(mut self, e: Estimate) -> Self {
        self.mu_sampled = Some(e.mean);
        self.sampled_stderr = Some(e.stderr);
        self
    }

    /// `|exact - sampled| <= k · stderr`, when a sampled value exists.
    pub fn agrees_within(&self, k: f64) -> Option<bool> {
        Some((self.mu_exact - self.mu_sampled?).abs() <= k * self.sampled_stderr?)
    }
}

/// Exact moments with the matching theorem bound and, optionally, sampled
/// estimates, for every order in `orders`.
pub fn moment_reports(
    setup: &QuenchSetup,
    quantity: Quantity,
    orders: &[usize],
    sampling: Option<&SamplingParams>,
) -> Result<Vec<MomentReport>> {
    let table = gap_table(setup, quantity, setup.tolerance())?;
    let purity = diagonal_ensemble(setup).purity;
    let mut reports = Vec::with_capacity(orders.len());
    for &q in orders {
        let mu = exact_moment(&table, q)?;
        let bound = moment_bound(quantity.into(), setup.obs_norm(), purity, q);
        reports.push(MomentReport::new(q, mu, Some(bound)));
    }
    if let Some(params) = sampling {
        let dynamics = QuenchDynamics::new(setup, quantity);
        let estimates = sampled_moments(&dynamics, table.mean, orders, params)?;
        for (r, e) in reports.iter_mut().zip(estimates) {
            *r = r.clone().with_sampled(e);
        }
    }
    Ok(reports)
}
