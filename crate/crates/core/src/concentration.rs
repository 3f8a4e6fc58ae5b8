//! Exponential tail bounds and their empirical counterparts.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math;
use crate::quench::{diagonal_ensemble, Quantity, QuenchDynamics, QuenchSetup};
use crate::sampling::{self, Dynamics, SamplingParams};
use crate::{Error, Result};

/// `2e · exp(-δ / (e g))`.
pub fn tail_bound(g: f64, delta: f64) -> f64 {
    2.0 * math::E * math::exp(-delta / (math::E * g))
}

/// Concentration scale `‖A‖ √tr ω²` for observables and `tr ω²` for the
/// fidelity.
pub fn concentration_scale(setup: &QuenchSetup, quantity: Quantity) -> f64 {
    let purity = diagonal_ensemble(setup).purity;
    match quantity {
        Quantity::Observable => setup.obs_norm() * math::sqrt(purity),
        Quantity::Fidelity => purity,
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TailReport {
    pub quantity: Option<Quantity>,
    pub g: f64,
    pub delta_grid: Vec<f64>,
    /// Fraction of samples with `|f(t) - f̄| >= δ`.
    pub empirical: Vec<f64>,
    pub bound: Vec<f64>,
}

impl TailReport {
    /// Grid points where the empirical tail exceeds the bound.
    pub fn violations(&self) -> Vec<usize> {
        (0..self.delta_grid.len()).filter(|&i| self.empirical[i] > self.bound[i]).collect()
    }
}

fn check_grid(delta_grid: &[f64]) -> Result<()> {
    if delta_grid.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
        return Err(Error::InvalidParameter("tail grid values must be finite and non-negative".into()));
    }
    Ok(())
}

/// Empirical tail of any sampled dynamics around `mean`, with the bound
/// computed from scale `g`.
pub fn empirical_tail_of<D: Dynamics + ?Sized>(
    dynamics: &D,
    mean: Complex64,
    g: f64,
    delta_grid: &[f64],
    params: &SamplingParams,
) -> Result<TailReport> {
    check_grid(delta_grid)?;
    if !(g > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("concentration scale g = {g} must be positive")));
    }
    let values = sampling::sample_values(dynamics, params)?;
    let mut devs: Vec<f64> = values.iter().map(|&f| math::abs_c(f - mean)).collect();
    devs.sort_by(f64::total_cmp);
    let n = devs.len() as f64;
    let empirical = delta_grid
        .iter()
        .map(|&d| (devs.len() - devs.partition_point(|&x| x < d)) as f64 / n)
        .collect();
    Ok(TailReport {
        quantity: None,
        g,
        delta_grid: delta_grid.to_vec(),
        empirical,
        bound: delta_grid.iter().map(|&d| tail_bound(g, d)).collect(),
    })
}

/// Tail probabilities of `⟨A(t)⟩` or `F(t)` against the matching bound.
pub fn empirical_tail(
    setup: &QuenchSetup,
    quantity: Quantity,
    delta_grid: &[f64],
    params: &SamplingParams,
) -> Result<TailReport> {
    let dynamics = QuenchDynamics::new(setup, quantity);
    let mean = Complex64::new(dynamics.average(), 0.0);
    let g = concentration_scale(setup, quantity);
    if !(g > 0.0) {
        // zero observable: the deviation is identically zero
        return Ok(TailReport {
            quantity: Some(quantity),
            g,
            delta_grid: delta_grid.to_vec(),
            empirical: delta_grid.iter().map(|&d| if d <= 0.0 { 1.0 } else { 0.0 }).collect(),
            bound: delta_grid.iter().map(|&d| tail_bound(g, d)).collect(),
        });
    }
    let mut report = empirical_tail_of(&dynamics, mean, g, delta_grid, params)?;
    report.quantity = Some(quantity);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_values() {
        let g = 0.7;
        assert!((tail_bound(g, math::E * g) - 2.0).abs() < 1e-14);
        assert!((tail_bound(g, 0.0) - 2.0 * math::E).abs() < 1e-14);
        let v = tail_bound(0.01, 0.3);
        assert!((v - 2.0 * math::E * math::exp(-30.0 / math::E)).abs() < 1e-18);
        assert!(v > 8.6e-5 && v < 8.8e-5);
    }

    #[test]
    fn cosine_tail_follows_arcsine_law() {
        let f = |t: f64| 0.5 * math::cos(t);
        let p = SamplingParams::new(1e4 * math::TAU, 200_000, 9);
        let r = empirical_tail_of(&f, Complex64::new(0.0, 0.0), 0.5, &[0.0, 0.25, 0.6], &p).unwrap();
        assert_eq!(r.empirical[0], 1.0);
        assert!((r.empirical[1] - 2.0 / 3.0).abs() < 0.005);
        assert_eq!(r.empirical[2], 0.0);
    }

    #[test]
    fn negative_delta_rejected() {
        let f = |_t: f64| 0.0;
        let p = SamplingParams::new(1.0, 10, 0);
        assert!(empirical_tail_of(&f, Complex64::new(0.0, 0.0), 1.0, &[-0.1], &p).is_err());
    }
}
