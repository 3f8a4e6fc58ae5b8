use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math::{self, ComplexSum};
use crate::quench::{degenerate_blocks, Quantity, QuenchSetup};
use crate::{Error, Result};

/// Entries with `|weight|` at or below this fraction of the largest weight
/// (or of the table scale, if larger) are dropped.
pub const PRUNE_RELATIVE: f64 = 1e-14;

/// One oscillating term `weight · e^{i gap t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GapEntry {
    pub m: usize,
    pub n: usize,
    pub gap: f64,
    pub weight: Complex64,
}

/// Bohr-frequency expansion `f(t) = f̄ + Σ_entries w e^{i g t}` with every
/// resonant (same-block) pair folded into `f̄`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GapTable {
    pub entries: Vec<GapEntry>,
    pub mean: Complex64,
    /// Resonance tolerance (an energy).
    pub tolerance: f64,
    /// `f(t)` is real for all `t`; the entries then come in conjugate pairs.
    pub real_valued: bool,
    /// Bound on `|f(t) - f̄|` used to judge imaginary residues.
    pub scale: f64,
}

impl GapTable {
    /// Builds the table over sorted `levels`, keeping only pairs drawn from
    /// `support` (ascending level indices).
    pub fn from_levels(
        levels: &[f64],
        support: &[usize],
        tolerance: f64,
        real_valued: bool,
        scale: f64,
        weight: impl Fn(usize, usize) -> Complex64,
    ) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::InvalidParameter("resonance tolerance must be positive".into()));
        }
        let blocks = degenerate_blocks(levels, tolerance);
        let mut block_of = alloc::vec![0usize; levels.len()];
        for (b, range) in blocks.iter().enumerate() {
            for i in range.clone() {
                block_of[i] = b;
            }
        }
        let mut mean = ComplexSum::new();
        let mut entries = Vec::new();
        for &m in support {
            for &n in support {
                let w = weight(m, n);
                if block_of[m] == block_of[n] {
                    mean.add(w);
                } else if w != Complex64::new(0.0, 0.0) {
                    entries.push(GapEntry { m, n, gap: levels[m] - levels[n], weight: w });
                }
            }
        }
        let largest = entries.iter().map(|e| math::abs_c(e.weight)).fold(scale, f64::max);
        entries.retain(|e| math::abs_c(e.weight) > PRUNE_RELATIVE * largest);
        Ok(Self { entries, mean: mean.value(), tolerance, real_valued, scale })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Smallest `|gap|` among the entries.
    pub fn min_gap(&self) -> Option<f64> {
        self.entries.iter().map(|e| e.gap.abs()).min_by(f64::total_cmp)
    }

    /// `f(t)` reconstructed from the expansion.
    pub fn evaluate(&self, t: f64) -> Complex64 {
        let mut acc = ComplexSum::new();
        acc.add(self.mean);
        for e in &self.entries {
            acc.add(e.weight * math::cis(e.gap * t));
        }
        acc.value()
    }

    /// For real-valued tables: every entry has its conjugate partner.
    pub fn has_conjugate_pairs(&self, rel_tol: f64) -> bool {
        let largest = self.entries.iter().map(|e| math::abs_c(e.weight)).fold(0.0, f64::max);
        self.entries.iter().all(|e| {
            self.entries.iter().any(|o| {
                o.m == e.n && o.n == e.m && (o.gap + e.gap).abs() <= self.tolerance
                    && math::abs_c(o.weight - e.weight.conj()) <= rel_tol * largest
            })
        })
    }
}

/// Gap table of `⟨A(t)⟩` (weights `conj(c_m) c_n A_mn`) or of the fidelity
/// (weights `|c_m|² |c_n|²`).
pub fn gap_table(setup: &QuenchSetup, quantity: Quantity, tolerance: f64) -> Result<GapTable> {
    let c = setup.coeffs();
    let support = setup.support();
    match quantity {
        Quantity::Observable => {
            let obs = setup.obs();
            GapTable::from_levels(setup.energies(), support, tolerance, true, 2.0 * setup.obs_norm(), |m, n| {
                c[m].conj() * c[n] * obs[(m, n)]
            })
        }
        Quantity::Fidelity => GapTable::from_levels(setup.energies(), support, tolerance, true, 1.0, |m, n| {
            Complex64::new(c[m].norm_sqr() * c[n].norm_sqr(), 0.0)
        }),
    }
}
