//! Quench dynamics evaluated exactly in the energy eigenbasis.
//!
//! With `c_m = ⟨E_m|Ψ⟩` and `A_mn = ⟨E_m|A|E_n⟩`,
//! `f(t) = Σ_{m,n} conj(c_m) c_n A_mn e^{i(E_m - E_n)t}` and the fidelity is
//! `F(t) = |Σ_m |c_m|² e^{-i E_m t}|²`.

use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64;

use crate::eigen::{operator_norm, Spectrum};
use crate::lattice::{BasisState, HermitianOperator};
use crate::math::{self, ComplexSum, KahanSum};
use crate::matrix::CMatrix;
use crate::sampling::{self, Dynamics, SamplingParams};
use crate::{Error, Result};

/// Default resonance tolerance relative to `||H||`.
pub const RELATIVE_RESONANCE_TOLERANCE: f64 = 1e-10;

/// Levels with `|c_m|^2` at or below this are left out of time evaluation.
const SUPPORT_THRESHOLD: f64 = 1e-28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Quantity {
    /// `⟨A(t)⟩`.
    Observable,
    /// `F(t) = |⟨Ψ|e^{-iHt}|Ψ⟩|²`.
    Fidelity,
}

/// Default resonance tolerance `1e-10 · ||H||`.
pub fn default_tolerance(spectrum: &Spectrum) -> f64 {
    let norm = spectrum.norm();
    if norm > 0.0 {
        RELATIVE_RESONANCE_TOLERANCE * norm
    } else {
        f64::EPSILON
    }
}

/// Maximal runs of sorted levels whose neighbours differ by at most `tol`.
pub fn degenerate_blocks(levels: &[f64], tol: f64) -> Vec<Range<usize>> {
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..=levels.len() {
        if i == levels.len() || levels[i] - levels[i - 1] > tol {
            blocks.push(start..i);
            start = i;
        }
    }
    blocks
}

#[derive(Debug, Clone)]
pub struct QuenchSetup {
    spectrum: Spectrum,
    coeffs: Vec<Complex64>,
    obs: CMatrix,
    obs_norm: f64,
    tolerance: f64,
    blocks: Vec<Range<usize>>,
    support: Vec<usize>,
    obs_support: Vec<Complex64>,
}

impl QuenchSetup {
    /// Builds a setup from eigenbasis data directly.
    pub fn from_eigenbasis(spectrum: Spectrum, coeffs: Vec<Complex64>, obs: CMatrix, obs_norm: f64) -> Result<Self> {
        let dim = spectrum.dim();
        if coeffs.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: coeffs.len() });
        }
        if obs.rows() != dim || obs.cols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: obs.rows() });
        }
        let norm2: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(alloc::format!("sum |c_m|^2 = {norm2}")));
        }
        let deviation = obs.hermiticity_deviation();
        if deviation > 1e-10 * obs.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        let tolerance = default_tolerance(&spectrum);
        let mut setup = Self {
            spectrum,
            coeffs,
            obs,
            obs_norm,
            tolerance,
            blocks: Vec::new(),
            support: Vec::new(),
            obs_support: Vec::new(),
        };
        setup.refresh();
        Ok(setup)
    }

    fn refresh(&mut self) {
        self.blocks = degenerate_blocks(self.spectrum.eigenvalues(), self.tolerance);
        self.support = (0..self.dim()).filter(|&m| self.coeffs[m].norm_sqr() > SUPPORT_THRESHOLD).collect();
        self.obs_support = self
            .support
            .iter()
            .flat_map(|&m| self.support.iter().map(move |&n| (m, n)))
            .map(|(m, n)| self.obs[(m, n)])
            .collect();
    }

    /// Replaces the resonance tolerance (an energy).
    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::InvalidParameter("resonance tolerance must be positive".into()));
        }
        self.tolerance = tolerance;
        self.refresh();
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn energies(&self) -> &[f64] {
        self.spectrum.eigenvalues()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn obs(&self) -> &CMatrix {
        &self.obs
    }

    pub fn obs_norm(&self) -> f64 {
        self.obs_norm
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Groups of levels treated as one energy.
    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    /// Levels with non-negligible population.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn populations(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Smallest non-resonant gap between populated levels, if any.
    pub fn min_gap(&self) -> Option<f64> {
        let e = self.energies();
        let mut best: Option<f64> = None;
        for (i, &m) in self.support.iter().enumerate() {
            for &n in &self.support[i + 1..] {
                let g = (e[m] - e[n]).abs();
                if g > self.tolerance && best.is_none_or(|b| g < b) {
                    best = Some(g);
                }
            }
        }
        best
    }

    /// Complex `f(t)` before the imaginary part is discarded.
    fn expectation_complex(&self, t: f64) -> Complex64 {
        let e = self.energies();
        let u: Vec<Complex64> = self.support.iter().map(|&m| self.coeffs[m] * math::cis(-e[m] * t)).collect();
        let s = u.len();
        let mut acc = ComplexSum::new();
        for (i, ui) in u.iter().enumerate() {
            let row = &self.obs_support[i * s..(i + 1) * s];
            let inner: Complex64 = row.iter().zip(&u).map(|(a, un)| a * un).sum();
            acc.add(ui.conj() * inner);
        }
        acc.value()
    }
}

/// Moves `psi` and `a` into the eigenbasis of `spectrum`.
pub fn make_setup(spectrum: &Spectrum, psi: &BasisState, a: &HermitianOperator) -> Result<QuenchSetup> {
    let dim = spectrum.dim();
    if psi.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: psi.dim() });
    }
    if a.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: a.dim() });
    }
    let v = spectrum.eigenvectors();
    let coeffs = v.adjoint_matvec(psi.amplitudes());
    let obs = v.adjoint().matmul(a.matrix()).matmul(v);
    let obs_norm = operator_norm(a)?;
    QuenchSetup::from_eigenbasis(spectrum.clone(), coeffs, obs, obs_norm)
}

/// Setup whose observable is the initial-state projector `|Ψ⟩⟨Ψ|`.
pub fn make_fidelity_setup(spectrum: &Spectrum, psi: &BasisState) -> Result<QuenchSetup> {
    let dim = spectrum.dim();
    if psi.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: psi.dim() });
    }
    let coeffs = spectrum.eigenvectors().adjoint_matvec(psi.amplitudes());
    let obs = CMatrix::outer(&coeffs);
    QuenchSetup::from_eigenbasis(spectrum.clone(), coeffs, obs, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiagonalEnsemble {
    pub populations: Vec<f64>,
    /// `tr ω²`, summing populations within degenerate blocks first.
    pub purity: f64,
    pub effective_dimension: f64,
    pub energy_mean: f64,
    pub energy_variance: f64,
}

pub fn diagonal_ensemble(setup: &QuenchSetup) -> DiagonalEnsemble {
    let populations = setup.populations();
    let mut purity = KahanSum::new();
    for block in setup.blocks() {
        let w: f64 = populations[block.clone()].iter().sum();
        purity.add(w * w);
    }
    let purity = purity.value();
    let e = setup.energies();
    let mut mean = KahanSum::new();
    let mut second = KahanSum::new();
    for (p, &em) in populations.iter().zip(e) {
        mean.add(p * em);
        second.add(p * em * em);
    }
    let energy_mean = mean.value();
    DiagonalEnsemble {
        purity,
        effective_dimension: 1.0 / purity,
        energy_mean,
        energy_variance: (second.value() - energy_mean * energy_mean).max(0.0),
        populations,
    }
}

/// `⟨A(t)⟩`.
pub fn expectation_at(setup: &QuenchSetup, t: f64) -> Result<f64> {
    let z = setup.expectation_complex(t);
    let limit = 1e-6 * setup.obs_norm().max(f64::MIN_POSITIVE);
    if z.im.abs() > limit {
        return Err(Error::ImaginaryResidue { imag: z.im, limit });
    }
    Ok(z.re)
}

/// `F(t)`.
pub fn fidelity_at(setup: &QuenchSetup, t: f64) -> f64 {
    let e = setup.energies();
    let mut acc = ComplexSum::new();
    for &m in setup.support() {
        acc.add(math::cis(-e[m] * t) * setup.coeffs()[m].norm_sqr());
    }
    acc.value().norm_sqr().min(1.0)
}

/// Infinite-time average `f̄ = Σ_{m,n resonant} conj(c_m) c_n A_mn`.
pub fn time_average(setup: &QuenchSetup) -> f64 {
    let c = setup.coeffs();
    let mut acc = KahanSum::new();
    for block in setup.blocks() {
        for m in block.clone() {
            for n in block.clone() {
                acc.add((c[m].conj() * c[n] * setup.obs()[(m, n)]).re);
            }
        }
    }
    acc.value()
}

/// Infinite-time average of the fidelity, `tr ω²`.
pub fn fidelity_average(setup: &QuenchSetup) -> f64 {
    diagonal_ensemble(setup).purity
}

/// `f(t)` or `F(t)` of a setup as a sampleable function.
#[derive(Debug, Clone, Copy)]
pub struct QuenchDynamics<'a> {
    pub setup: &'a QuenchSetup,
    pub quantity: Quantity,
}

impl<'a> QuenchDynamics<'a> {
    pub fn new(setup: &'a QuenchSetup, quantity: Quantity) -> Self {
        Self { setup, quantity }
    }

    pub fn average(&self) -> f64 {
        match self.quantity {
            Quantity::Observable => time_average(self.setup),
            Quantity::Fidelity => fidelity_average(self.setup),
        }
    }

    /// `||A||` for observables, 1 for the fidelity.
    pub fn scale(&self) -> f64 {
        match self.quantity {
            Quantity::Observable => self.setup.obs_norm(),
            Quantity::Fidelity => 1.0,
        }
    }
}

impl Dynamics for QuenchDynamics<'_> {
    fn value_at(&self, t: f64) -> Complex64 {
        let v = match self.quantity {
            Quantity::Observable => self.setup.expectation_complex(t).re,
            Quantity::Fidelity => fidelity_at(self.setup, t),
        };
        Complex64::new(v, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampledHistogram {
    /// `n_bins + 1` ascending edges.
    pub edges: Vec<f64>,
    pub densities: Vec<f64>,
    pub horizon: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub sample_mean: f64,
    pub sample_variance: f64,
}

impl SampledHistogram {
    pub fn total_mass(&self) -> f64 {
        self.densities
            .iter()
            .zip(self.edges.windows(2))
            .map(|(d, w)| d * (w[1] - w[0]))
            .sum()
    }

    pub fn occupied_bins(&self) -> usize {
        self.densities.iter().filter(|&&d| d > 0.0).count()
    }
}

/// Normalized histogram of `values` over their own `[min, max]`. A constant
/// sample (up to rounding) gets a single narrow bin around its value.
pub fn histogram(values: &[f64], n_bins: usize) -> (Vec<f64>, Vec<f64>) {
    let mut n_bins = n_bins.max(1);
    let mut lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 1e-12 * lo.abs().max(1.0) {
        let half = 1e-9 * lo.abs().max(1.0);
        let mid = 0.5 * (lo + hi);
        lo = mid - half;
        hi = mid + half;
        n_bins = 1;
    }
    let width = (hi - lo) / n_bins as f64;
    let edges: Vec<f64> = (0..=n_bins).map(|i| if i == n_bins { hi } else { lo + width * i as f64 }).collect();
    let mut counts = alloc::vec![0usize; n_bins];
    for &x in values {
        let idx = (((x - lo) / (hi - lo)) * n_bins as f64) as usize;
        counts[idx.min(n_bins - 1)] += 1;
    }
    let n = values.len() as f64;
    let densities = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / (n * (w[1] - w[0])))
        .collect();
    (edges, densities)
}

/// Histogram of `f(t)` (or `F(t)`) at uniform random times in `[0, T]`.
pub fn sample_histogram(
    setup: &QuenchSetup,
    params: &SamplingParams,
    n_bins: usize,
    quantity: Quantity,
) -> Result<SampledHistogram> {
    let values: Vec<f64> = sampling::sample_values(&QuenchDynamics::new(setup, quantity), params)?
        .into_iter()
        .map(|z| z.re)
        .collect();
    let (edges, densities) = histogram(&values, n_bins);
    let est = sampling::estimate(&values);
    Ok(SampledHistogram {
        edges,
        densities,
        horizon: params.horizon,
        n_samples: params.n_samples,
        seed: params.seed,
        sample_mean: est.mean,
        sample_variance: sampling::sample_variance(&values),
    })
}
