//! Spin-1/2 chains restricted to a fixed-magnetization sector, the initial
//! states used with them, and site observables.
//!
//! Basis convention: a configuration is a bit pattern with bit `j - 1` set
//! when site `j` carries an up spin. Sector configurations are enumerated in
//! ascending numeric order; the position in that list is the basis index.
//! Spin operators use `S^± = σ^±` (hopping amplitude 1) and `S^z = σ^z / 2`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math;
use crate::matrix::CMatrix;
use crate::random;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

/// Heisenberg-type chain with nearest (`j1`, `gamma1`) and next-nearest
/// (`j2`, `gamma2`) neighbour couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpinChainSpec {
    #[cfg_attr(feature = "serde", serde(rename = "L"))]
    pub sites: usize,
    pub n_up: usize,
    #[cfg_attr(feature = "serde", serde(rename = "J1"))]
    pub j1: f64,
    #[cfg_attr(feature = "serde", serde(rename = "g1"))]
    pub gamma1: f64,
    #[cfg_attr(feature = "serde", serde(rename = "J2"))]
    pub j2: f64,
    #[cfg_attr(feature = "serde", serde(rename = "g2"))]
    pub gamma2: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub boundary: Boundary,
}

impl SpinChainSpec {
    /// The non-integrable couplings `(J1, γ1, J2, γ2) = (-1, 1, -0.2, 0.5)` at
    /// half filling.
    pub fn standard(sites: usize) -> Self {
        Self {
            sites,
            n_up: sites / 2,
            j1: -1.0,
            gamma1: 1.0,
            j2: -0.2,
            gamma2: 0.5,
            boundary: Boundary::Periodic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 || self.sites > 30 {
            return Err(Error::InvalidParameter(alloc::format!(
                "chain length {} outside 2..=30",
                self.sites
            )));
        }
        if self.n_up > self.sites {
            return Err(Error::EmptySector { sites: self.sites, n_up: self.n_up });
        }
        if self.sites < 3 && self.j2 != 0.0 {
            return Err(Error::DegenerateGeometry { sites: self.sites });
        }
        Ok(())
    }

    pub fn sector_dim(&self) -> usize {
        math::binomial(self.sites, self.n_up) as usize
    }
}

/// Ascending list of `sites`-bit configurations with `n_up` set bits.
pub fn sector_basis(sites: usize, n_up: usize) -> Result<Vec<u64>> {
    if n_up > sites {
        return Err(Error::EmptySector { sites, n_up });
    }
    let configs: Vec<u64> = (0u64..(1u64 << sites)).filter(|c| c.count_ones() as usize == n_up).collect();
    Ok(configs)
}

fn basis_index(basis: &[u64], config: u64) -> Option<usize> {
    basis.binary_search(&config).ok()
}

/// A square matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Accepts `matrix` if `max|A - A^†| <= 1e-12 max|A|`.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), found: matrix.cols() });
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > 1e-12 * matrix.max_abs() {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim) }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self { matrix: CMatrix::diagonal(values) }
    }

    /// `|psi><psi|`.
    pub fn projector(psi: &BasisState) -> Self {
        Self { matrix: CMatrix::outer(psi.amplitudes()) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn expectation(&self, psi: &BasisState) -> f64 {
        let hv = self.matrix.matvec(psi.amplitudes());
        psi.amplitudes().iter().zip(&hv).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
    }
}

/// Normalized state vector in a sector basis.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BasisState {
    amplitudes: Vec<Complex64>,
}

impl BasisState {
    /// Accepts a vector with unit norm to within `1e-12`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if amplitudes.is_empty() || (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(alloc::format!("state norm^2 = {norm2}")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a non-zero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = math::sqrt(amplitudes.iter().map(|z| z.norm_sqr()).sum());
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("cannot normalize a zero vector".into()));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Ok(Self { amplitudes })
    }

    pub fn basis_vector(dim: usize, index: usize) -> Self {
        let mut amplitudes = alloc::vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn haar(dim: usize, seed: u64) -> Self {
        Self { amplitudes: random::haar_vector(dim, &mut random::rng(seed)) }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

/// Sector Hamiltonian of the chain described by `spec`.
pub fn build_spin_chain(spec: &SpinChainSpec) -> Result<HermitianOperator> {
    spec.validate()?;
    let l = spec.sites;
    let basis = sector_basis(l, spec.n_up)?;
    let dim = basis.len();
    let mut h = CMatrix::zeros(dim, dim);

    let mut bonds: Vec<(usize, usize, f64, f64)> = Vec::new();
    for j in 0..l {
        for (range, hop, zz) in [(1usize, spec.j1, spec.gamma1), (2, spec.j2, spec.gamma2)] {
            if hop == 0.0 && zz == 0.0 {
                continue;
            }
            let k = j + range;
            let k = match spec.boundary {
                Boundary::Periodic => k % l,
                Boundary::Open if k < l => k,
                Boundary::Open => continue,
            };
            bonds.push((j, k, hop, zz));
        }
    }

    for (col, &config) in basis.iter().enumerate() {
        for &(i, k, hop, zz) in &bonds {
            let up_i = (config >> i) & 1 == 1;
            let up_k = (config >> k) & 1 == 1;
            let sign = if up_i == up_k { 0.25 } else { -0.25 };
            h[(col, col)] += Complex64::new(zz * sign, 0.0);
            if up_i != up_k && hop != 0.0 {
                let flipped = config ^ (1 << i) ^ (1 << k);
                let row = basis_index(&basis, flipped).expect("hopping preserves the sector");
                h[(row, col)] += Complex64::new(hop, 0.0);
            }
        }
    }
    Ok(HermitianOperator { matrix: h })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StateKind {
    /// `|↑↓↑↓…⟩`.
    Neel,
    /// `(|↑↓↑↓…⟩ + |↓↑↓↑…⟩) / √2`.
    NeelSymmetric,
    /// `L^{-1/2} Σ_r T^r |↑…↑↓…↓⟩` with `n_up` leading up spins.
    DomainwallTranslated,
}

impl StateKind {
    pub fn name(&self) -> &'static str {
        match self {
            StateKind::Neel => "neel",
            StateKind::NeelSymmetric => "neel_symmetric",
            StateKind::DomainwallTranslated => "domainwall_translated",
        }
    }
}

fn neel_config(sites: usize, first_up: bool) -> u64 {
    (0..sites).filter(|j| (j % 2 == 0) == first_up).fold(0, |acc, j| acc | (1 << j))
}

/// Shifts every site index by one: site `j` goes to `j + 1 (mod L)`.
fn translate(config: u64, sites: usize) -> u64 {
    let mask = (1u64 << sites) - 1;
    ((config << 1) | (config >> (sites - 1))) & mask
}

pub fn build_state(kind: StateKind, sites: usize, n_up: usize) -> Result<BasisState> {
    let basis = sector_basis(sites, n_up)?;
    let dim = basis.len();
    let mut amps = alloc::vec![Complex64::new(0.0, 0.0); dim];
    let mut add = |config: u64, weight: f64| {
        let idx = basis_index(&basis, config).expect("config belongs to the sector");
        amps[idx] += Complex64::new(weight, 0.0);
    };
    match kind {
        StateKind::Neel | StateKind::NeelSymmetric => {
            if sites % 2 != 0 || 2 * n_up != sites {
                return Err(Error::IncompatibleState { kind: kind.name(), sites, n_up });
            }
            add(neel_config(sites, true), 1.0);
            if kind == StateKind::NeelSymmetric {
                add(neel_config(sites, false), 1.0);
            }
        }
        StateKind::DomainwallTranslated => {
            let mut config = (1u64 << n_up) - 1;
            for _ in 0..sites {
                add(config, 1.0);
                config = translate(config, sites);
            }
        }
    }
    BasisState::normalized(amps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SiteObservable {
    SigmaZ,
}

/// `σ^z` on `site` (1-based): diagonal, `+1` where the site is up.
pub fn site_observable(kind: SiteObservable, site: usize, sites: usize, n_up: usize) -> Result<HermitianOperator> {
    if site == 0 || site > sites {
        return Err(Error::SiteOutOfRange { site, sites });
    }
    let basis = sector_basis(sites, n_up)?;
    let values: Vec<f64> = match kind {
        SiteObservable::SigmaZ => basis
            .iter()
            .map(|c| if (c >> (site - 1)) & 1 == 1 { 1.0 } else { -1.0 })
            .collect(),
    };
    Ok(HermitianOperator::diagonal(&values))
}

/// Gaussian-unitary-ensemble draw, deterministic in `seed`.
pub fn random_hermitian(dim: usize, seed: u64) -> HermitianOperator {
    HermitianOperator { matrix: random::gue_matrix(dim, &mut random::rng(seed)) }
}
