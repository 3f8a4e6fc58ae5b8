//! Quadratic fermion Hamiltonians `H = Σ M_mn f_m† f_n` handled entirely in the
//! `L`-dimensional single-particle space.
//!
//! Modes are `d_k = Σ_j O_jk f_j` with `M = O diag(ε) Oᵀ`, so
//! `f_m† f_n(t) = Σ_kl O_mk O_nl e^{i(ε_k - ε_l)t} d_k† d_l`. Site indices are
//! zero-based.

pub mod fock;

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::eigen;
use crate::math::{self, ComplexSum};
use crate::matrix::CMatrix;
use crate::moments::{check_genericity, exact_moment, sampled_moments, GapTable, GenericityReport, MomentReport};
use crate::random;
use crate::recurrence::{
    fermion_recurrence_lower_bound, scan_condition, FermionRecurrenceKind, ScanOutcome, ScanParams,
};
use crate::sampling::{Dynamics, SamplingParams};
use crate::{Error, Result};

/// Default bound on `√L · max |O_jk|` for a model to count as extended.
pub const DEFAULT_EXTENSIVITY_THRESHOLD: f64 = 4.0;

/// Draws allowed before `generic_extended_model` gives up.
pub const REJECTION_CAP: usize = 100;

/// Relative tolerance for mode-energy resonances.
pub const RELATIVE_MODE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FreeFermionModel {
    sites: usize,
    /// Row-major `M`.
    hopping: Vec<f64>,
    /// Row-major `O`; column `k` is mode `k`.
    modes: Vec<f64>,
    energies: Vec<f64>,
    genericity: GenericityReport,
}

fn mode_tolerance(energies: &[f64]) -> f64 {
    let norm = energies.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    if norm > 0.0 {
        RELATIVE_MODE_TOLERANCE * norm
    } else {
        f64::EPSILON
    }
}

impl FreeFermionModel {
    fn assemble(sites: usize, modes: Vec<f64>, energies: Vec<f64>) -> Result<Self> {
        let mut hopping = alloc::vec![0.0; sites * sites];
        for i in 0..sites {
            for j in i..sites {
                let v: f64 = (0..sites).map(|k| modes[i * sites + k] * energies[k] * modes[j * sites + k]).sum();
                hopping[i * sites + j] = v;
                hopping[j * sites + i] = v;
            }
        }
        let genericity = check_genericity(&energies, 3, mode_tolerance(&energies))?;
        Ok(Self { sites, hopping, modes, energies, genericity })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// `M_ij`.
    pub fn hopping(&self, i: usize, j: usize) -> f64 {
        self.hopping[i * self.sites + j]
    }

    pub fn hopping_matrix(&self) -> &[f64] {
        &self.hopping
    }

    /// `O_jk`: amplitude of mode `k` on site `j`.
    pub fn mode(&self, j: usize, k: usize) -> f64 {
        self.modes[j * self.sites + k]
    }

    /// Row `j` of `O`.
    pub fn site_row(&self, j: usize) -> &[f64] {
        &self.modes[j * self.sites..(j + 1) * self.sites]
    }

    /// Mode energies `ε_k`, ascending.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn genericity(&self) -> &GenericityReport {
        &self.genericity
    }

    /// Resonance tolerance `1e-10 · max |ε|`.
    pub fn tolerance(&self) -> f64 {
        mode_tolerance(&self.energies)
    }

    /// `max |M - O diag(ε) Oᵀ|`.
    pub fn reconstruction_error(&self, m: &[f64]) -> f64 {
        (0..self.sites * self.sites)
            .map(|idx| {
                let (i, j) = (idx / self.sites, idx % self.sites);
                let r: f64 = (0..self.sites).map(|k| self.mode(i, k) * self.energies[k] * self.mode(j, k)).sum();
                (m[idx] - r).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `max |OᵀO - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let l = self.sites;
        let mut worst = 0.0f64;
        for k in 0..l {
            for p in 0..l {
                let dot: f64 = (0..l).map(|j| self.mode(j, k) * self.mode(j, p)).sum();
                let target = if k == p { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `√L · max_jk |O_jk|`.
    pub fn extensivity_constant(&self) -> f64 {
        math::sqrt(self.sites as f64) * self.modes.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn is_extended(&self, threshold: f64) -> bool {
        self.extensivity_constant() <= threshold
    }

    /// `c = √L · max_k {|O_mk|, |O_nk|}` for one site pair.
    pub fn pair_constant(&self, m: usize, n: usize) -> f64 {
        let rows = self.site_row(m).iter().chain(self.site_row(n));
        math::sqrt(self.sites as f64) * rows.fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    fn check_site(&self, j: usize) -> Result<()> {
        if j >= self.sites {
            return Err(Error::SiteOutOfRange { site: j, sites: self.sites });
        }
        Ok(())
    }
}

/// Diagonalizes a real symmetric hopping matrix (row-major, `sites²` entries).
pub fn build_free_model(hopping: &[f64], sites: usize) -> Result<FreeFermionModel> {
    if sites == 0 {
        return Err(Error::InvalidParameter("a free model needs at least one site".into()));
    }
    if hopping.len() != sites * sites {
        return Err(Error::DimensionMismatch { expected: sites * sites, found: hopping.len() });
    }
    let scale = hopping.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut deviation = 0.0f64;
    for i in 0..sites {
        for j in 0..i {
            deviation = deviation.max((hopping[i * sites + j] - hopping[j * sites + i]).abs());
        }
    }
    if deviation > 1e-12 * scale || hopping.iter().any(|x| !x.is_finite()) {
        return Err(Error::NotHermitian { deviation });
    }
    let spectrum = eigen::diagonalize_matrix(&CMatrix::from_real(sites, sites, hopping))?;
    let v = spectrum.eigenvectors();
    let modes = (0..sites * sites).map(|idx| v[(idx / sites, idx % sites)].re).collect();
    let mut model = FreeFermionModel::assemble(sites, modes, spectrum.eigenvalues().to_vec())?;
    model.hopping = hopping.to_vec();
    Ok(model)
}

/// Real Fourier basis: the constant column, `cos`/`sin` pairs scaled by
/// `√(2/L)` and, for even `L`, the alternating column. Row-major `L x L`.
pub fn fourier_basis(sites: usize) -> Vec<f64> {
    let l = sites as f64;
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(sites);
    columns.push(alloc::vec![1.0 / math::sqrt(l); sites]);
    let amp = math::sqrt(2.0 / l);
    for r in 1..=(sites - 1) / 2 {
        let w = math::TAU * r as f64 / l;
        columns.push((0..sites).map(|j| amp * math::cos(w * j as f64)).collect());
        columns.push((0..sites).map(|j| amp * math::sin(w * j as f64)).collect());
    }
    if sites % 2 == 0 {
        columns.push((0..sites).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } / math::sqrt(l)).collect());
    }
    let mut out = alloc::vec![0.0; sites * sites];
    for (k, col) in columns.iter().enumerate() {
        for j in 0..sites {
            out[j * sites + k] = col[j];
        }
    }
    out
}

/// Real Fourier mode functions with independent mode energies drawn uniformly
/// from `[-1, 1]`, redrawn until the energies pass the genericity check at
/// `q <= 3`.
pub fn generic_extended_model(sites: usize, seed: u64) -> Result<FreeFermionModel> {
    if sites < 2 {
        return Err(Error::InvalidParameter(alloc::format!("L = {sites} must be at least 2")));
    }
    let basis = fourier_basis(sites);
    let mut rng = random::rng(seed);
    for _ in 0..REJECTION_CAP {
        let draws: Vec<f64> = (0..sites).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let mut order: Vec<usize> = (0..sites).collect();
        order.sort_by(|&a, &b| draws[a].total_cmp(&draws[b]));
        let energies: Vec<f64> = order.iter().map(|&k| draws[k]).collect();
        let modes = (0..sites * sites).map(|idx| basis[(idx / sites) * sites + order[idx % sites]]).collect();
        let model = FreeFermionModel::assemble(sites, modes, energies)?;
        if model.genericity.passed {
            return Ok(model);
        }
    }
    Err(Error::RejectionCap(REJECTION_CAP))
}

/// Gaussian state described by `Λ_kl = ⟨d_k† d_l⟩`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModeState {
    lambda: CMatrix,
    particles: f64,
}

impl ModeState {
    /// Validates `Λ`: Hermitian with eigenvalues in `[0, 1]`.
    pub fn new(lambda: CMatrix) -> Result<Self> {
        if !lambda.is_square() {
            return Err(Error::DimensionMismatch { expected: lambda.rows(), found: lambda.cols() });
        }
        let deviation = lambda.hermiticity_deviation();
        if deviation > 1e-10 {
            return Err(Error::NotHermitian { deviation });
        }
        let values = eigen::eigenvalues(&lambda)?;
        if values.iter().any(|&v| !(-1e-10..=1.0 + 1e-10).contains(&v)) {
            return Err(Error::InvalidParameter("correlation matrix eigenvalues must lie in [0, 1]".into()));
        }
        Ok(Self::unchecked(lambda))
    }

    fn unchecked(lambda: CMatrix) -> Self {
        let particles = lambda.trace().re;
        Self { lambda, particles }
    }

    pub fn lambda(&self) -> &CMatrix {
        &self.lambda
    }

    pub fn modes(&self) -> usize {
        self.lambda.rows()
    }

    /// `N = tr Λ`.
    pub fn particles(&self) -> f64 {
        self.particles
    }

    /// `ν = N / L`.
    pub fn filling(&self) -> f64 {
        self.particles / self.modes() as f64
    }

    /// Whether `Λ` has off-diagonal entries above `tol`.
    pub fn has_coherences(&self, tol: f64) -> bool {
        let l = self.modes();
        (0..l).any(|k| (0..l).any(|p| k != p && math::abs_c(self.lambda[(k, p)]) > tol))
    }
}

/// Slater determinant of the listed modes.
pub fn slater_state(model: &FreeFermionModel, occupied: &[usize]) -> Result<ModeState> {
    let l = model.sites;
    let mut diag = alloc::vec![0.0; l];
    for &k in occupied {
        if k >= l {
            return Err(Error::InvalidParameter(alloc::format!("mode {k} out of range for L = {l}")));
        }
        if diag[k] != 0.0 {
            return Err(Error::InvalidParameter(alloc::format!("mode {k} listed twice")));
        }
        diag[k] = 1.0;
    }
    Ok(ModeState::unchecked(CMatrix::diagonal(&diag)))
}

/// Slater determinant `Π_i (Σ_k ψ_i(k) d_k†)|0⟩` of orthonormal mode-space
/// orbitals: `Λ_kl = Σ_i conj(ψ_i(k)) ψ_i(l)`.
pub fn slater_from_orbitals(modes: usize, orbitals: &[Vec<Complex64>]) -> Result<ModeState> {
    for (i, a) in orbitals.iter().enumerate() {
        if a.len() != modes {
            return Err(Error::DimensionMismatch { expected: modes, found: a.len() });
        }
        for (j, b) in orbitals[..=i].iter().enumerate() {
            let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            if math::abs_c(dot - target) > 1e-10 {
                return Err(Error::InvalidParameter("orbitals must be orthonormal".into()));
            }
        }
    }
    let lambda = CMatrix::from_fn(modes, modes, |k, l| orbitals.iter().map(|psi| psi[k].conj() * psi[l]).sum());
    Ok(ModeState::unchecked(lambda))
}

/// Same, for orbitals given on lattice sites: `ψ_i(k) = Σ_j O_jk φ_i(j)`.
pub fn slater_from_site_orbitals(model: &FreeFermionModel, orbitals: &[Vec<Complex64>]) -> Result<ModeState> {
    let l = model.sites;
    let mut in_modes = Vec::with_capacity(orbitals.len());
    for phi in orbitals {
        if phi.len() != l {
            return Err(Error::DimensionMismatch { expected: l, found: phi.len() });
        }
        in_modes.push((0..l).map(|k| (0..l).map(|j| phi[j] * model.mode(j, k)).sum()).collect::<Vec<Complex64>>());
    }
    slater_from_orbitals(l, &in_modes)
}

/// Fermions placed on the listed sites: `Λ_kl = Σ_i O_{s_i k} O_{s_i l}`.
pub fn real_space_occupation(model: &FreeFermionModel, sites: &[usize]) -> Result<ModeState> {
    let l = model.sites;
    let mut seen = alloc::vec![false; l];
    let mut orbitals = Vec::with_capacity(sites.len());
    for &s in sites {
        model.check_site(s)?;
        if core::mem::replace(&mut seen[s], true) {
            return Err(Error::InvalidParameter(alloc::format!("site {s} listed twice")));
        }
        orbitals.push(model.site_row(s).iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>());
    }
    slater_from_orbitals(l, &orbitals)
}

/// Slater determinant of `particles` Haar-random mode-space orbitals; `Λ` then
/// carries coherences between all modes.
pub fn random_slater_state(modes: usize, particles: usize, seed: u64) -> Result<ModeState> {
    if particles > modes {
        return Err(Error::InvalidParameter(alloc::format!("N = {particles} exceeds L = {modes}")));
    }
    let orbitals = random::haar_orbitals(modes, particles, &mut random::rng(seed));
    slater_from_orbitals(modes, &orbitals)
}

/// `⟨f_m† f_n(t)⟩ = Σ_kl O_mk O_nl Λ_kl e^{i(ε_k - ε_l)t}`.
pub fn correlator_at(model: &FreeFermionModel, state: &ModeState, m: usize, n: usize, t: f64) -> Result<Complex64> {
    model.check_site(m)?;
    model.check_site(n)?;
    if state.modes() != model.sites {
        return Err(Error::DimensionMismatch { expected: model.sites, found: state.modes() });
    }
    Ok(correlator_unchecked(model, state, m, n, t))
}

fn correlator_unchecked(model: &FreeFermionModel, state: &ModeState, m: usize, n: usize, t: f64) -> Complex64 {
    let l = model.sites;
    let phases: Vec<Complex64> = model.energies.iter().map(|&e| math::cis(e * t)).collect();
    let right: Vec<Complex64> = (0..l).map(|q| phases[q].conj() * model.mode(n, q)).collect();
    let mut acc = ComplexSum::new();
    for k in 0..l {
        let omk = model.mode(m, k);
        if omk == 0.0 {
            continue;
        }
        let row = state.lambda.row(k);
        let inner: Complex64 = row.iter().zip(&right).map(|(a, b)| a * b).sum();
        acc.add(phases[k] * omk * inner);
    }
    acc.value()
}

/// Single-particle propagator `a_mn(t) = {f_m†(t), f_n} = Σ_k O_mk O_nk e^{iε_k t}`.
pub fn propagator_at(model: &FreeFermionModel, m: usize, n: usize, t: f64) -> Result<Complex64> {
    model.check_site(m)?;
    model.check_site(n)?;
    Ok(propagator_unchecked(model, m, n, t))
}

fn propagator_unchecked(model: &FreeFermionModel, m: usize, n: usize, t: f64) -> Complex64 {
    let mut acc = ComplexSum::new();
    for (k, &e) in model.energies.iter().enumerate() {
        acc.add(math::cis(e * t) * (model.mode(m, k) * model.mode(n, k)));
    }
    acc.value()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PropagatorStats {
    pub m: usize,
    pub n: usize,
    /// Infinite-time average of `|a_mn(t)|²`, `Σ_k O_mk² O_nk²`.
    pub omega_mn: f64,
    pub c_const: f64,
}

pub fn propagator_stats(model: &FreeFermionModel, m: usize, n: usize) -> Result<PropagatorStats> {
    model.check_site(m)?;
    model.check_site(n)?;
    let omega_mn = (0..model.sites).map(|k| math::powi(model.mode(m, k) * model.mode(n, k), 2)).sum();
    Ok(PropagatorStats { m, n, omega_mn, c_const: model.pair_constant(m, n) })
}

/// A dynamical quantity of a free model.
#[derive(Debug, Clone, Copy)]
pub enum FreeTarget<'a> {
    /// `⟨f_m† f_n(t)⟩`, complex unless `m == n`.
    Correlator { state: &'a ModeState, m: usize, n: usize },
    /// `|a_mn(t)|²`; for `m == n` this is the fidelity of `f_m†|0⟩`.
    PropagatorSq { m: usize, n: usize },
}

impl FreeTarget<'_> {
    pub fn sites(&self) -> (usize, usize) {
        match *self {
            FreeTarget::Correlator { m, n, .. } | FreeTarget::PropagatorSq { m, n } => (m, n),
        }
    }
}

/// A free-model target bound to its model, for sampling.
#[derive(Debug, Clone, Copy)]
pub struct FreeDynamics<'a> {
    pub model: &'a FreeFermionModel,
    pub target: FreeTarget<'a>,
}

impl<'a> FreeDynamics<'a> {
    pub fn new(model: &'a FreeFermionModel, target: FreeTarget<'a>) -> Result<Self> {
        let (m, n) = target.sites();
        model.check_site(m)?;
        model.check_site(n)?;
        if let FreeTarget::Correlator { state, .. } = target {
            if state.modes() != model.sites {
                return Err(Error::DimensionMismatch { expected: model.sites, found: state.modes() });
            }
        }
        Ok(Self { model, target })
    }
}

impl Dynamics for FreeDynamics<'_> {
    fn value_at(&self, t: f64) -> Complex64 {
        match self.target {
            FreeTarget::Correlator { state, m, n } => correlator_unchecked(self.model, state, m, n, t),
            FreeTarget::PropagatorSq { m, n } => Complex64::new(propagator_unchecked(self.model, m, n, t).norm_sqr(), 0.0),
        }
    }

    fn is_real(&self) -> bool {
        match self.target {
            FreeTarget::Correlator { m, n, .. } => m == n,
            FreeTarget::PropagatorSq { .. } => true,
        }
    }
}

/// Single-particle gap table: weights `O_mk O_nl Λ_kl` for correlators and
/// `O_mk O_nk O_ml O_nl` for the squared propagator, over mode pairs `k != l`.
pub fn free_gap_table(model: &FreeFermionModel, target: &FreeTarget) -> Result<GapTable> {
    let dynamics = FreeDynamics::new(model, *target)?;
    let support: Vec<usize> = (0..model.sites).collect();
    let tol = model.tolerance();
    match *target {
        FreeTarget::Correlator { state, m, n } => {
            GapTable::from_levels(&model.energies, &support, tol, dynamics.is_real(), 2.0, |k, l| {
                state.lambda[(k, l)] * (model.mode(m, k) * model.mode(n, l))
            })
        }
        FreeTarget::PropagatorSq { m, n } => GapTable::from_levels(&model.energies, &support, tol, true, 1.0, |k, l| {
            Complex64::new(model.mode(m, k) * model.mode(n, k) * model.mode(m, l) * model.mode(n, l), 0.0)
        }),
    }
}

/// Bound on `μ_q`: `(q c² √(ν/L))^q` for correlators at even `q`,
/// `(q c⁴ / L)^q` for the squared propagator.
pub fn free_moment_bound(model: &FreeFermionModel, target: &FreeTarget, q: usize) -> Option<f64> {
    let (m, n) = target.sites();
    let c = model.pair_constant(m, n);
    let l = model.sites as f64;
    match *target {
        FreeTarget::Correlator { state, .. } => {
            (q % 2 == 0).then(|| math::powi(q as f64 * c * c * math::sqrt(state.filling() / l), q as i32))
        }
        FreeTarget::PropagatorSq { .. } => Some(math::powi(q as f64 * math::powi(c, 4) / l, q as i32)),
    }
}

/// Exact `μ_q` of a free-model target with its theorem bound.
pub fn free_moment_exact(model: &FreeFermionModel, target: &FreeTarget, q: usize) -> Result<MomentReport> {
    let table = free_gap_table(model, target)?;
    let mu = exact_moment(&table, q)?;
    Ok(MomentReport::new(q, mu, free_moment_bound(model, target, q)))
}

/// Exact reports for several orders, with sampled estimates when requested.
pub fn free_moment_reports(
    model: &FreeFermionModel,
    target: &FreeTarget,
    orders: &[usize],
    sampling: Option<&SamplingParams>,
) -> Result<Vec<MomentReport>> {
    let table = free_gap_table(model, target)?;
    let mut reports = Vec::with_capacity(orders.len());
    for &q in orders {
        reports.push(MomentReport::new(q, exact_moment(&table, q)?, free_moment_bound(model, target, q)));
    }
    if let Some(params) = sampling {
        let dynamics = FreeDynamics::new(model, *target)?;
        let estimates = sampled_moments(&dynamics, table.mean, orders, params)?;
        for (r, e) in reports.iter_mut().zip(estimates) {
            *r = r.clone().with_sampled(e);
        }
    }
    Ok(reports)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FreeRecurrenceScan {
    pub params: ScanParams,
    pub outcome: ScanOutcome,
    pub empirical_t: Option<f64>,
    pub lower_bound: Option<f64>,
    /// `|f(0) - f̄|` for correlators.
    pub c_f: Option<f64>,
}

/// Recurrences of a correlator (`|f(t) - f(0)| <= u`) or of the fidelity
/// `|a_mm(t)|²` (`1 - |a_mm|² <= u`). Off-diagonal squared propagators use the
/// correlator-style condition and carry no bound.
pub fn free_recurrence_scan(model: &FreeFermionModel, target: &FreeTarget, params: &ScanParams) -> Result<FreeRecurrenceScan> {
    let dynamics = FreeDynamics::new(model, *target)?;
    let norm = model.energies.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let cap = crate::recurrence::max_step(norm);
    if params.dt > cap {
        return Err(Error::InvalidParameter(alloc::format!("dt = {} exceeds pi/(10 max|eps|) = {cap}", params.dt)));
    }
    if !(params.u > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("u = {} must be positive", params.u)));
    }
    let f0 = dynamics.value_at(0.0);
    let (m, n) = target.sites();
    let c = model.pair_constant(m, n);
    let (outcome, c_f, lower_bound) = match *target {
        FreeTarget::PropagatorSq { m, n } if m == n => {
            let outcome = scan_condition(&|t: f64| 1.0 - dynamics.value_at(t).re <= params.u, params)?;
            let bound = fermion_recurrence_lower_bound(
                FermionRecurrenceKind::Fidelity,
                1.0,
                params.u,
                params.delta,
                c,
                1.0,
                model.sites,
            );
            (outcome, None, bound.ok())
        }
        _ => {
            let outcome = scan_condition(&|t: f64| math::abs_c(dynamics.value_at(t) - f0) <= params.u, params)?;
            match *target {
                FreeTarget::Correlator { state, .. } => {
                    let mean = free_gap_table(model, target)?.mean;
                    let c_f = math::abs_c(f0 - mean);
                    let bound = fermion_recurrence_lower_bound(
                        FermionRecurrenceKind::Correlator,
                        c_f,
                        params.u,
                        params.delta,
                        c,
                        state.filling(),
                        model.sites,
                    );
                    (outcome, Some(c_f), bound.ok())
                }
                FreeTarget::PropagatorSq { .. } => (outcome, None, None),
            }
        }
    };
    Ok(FreeRecurrenceScan { params: *params, empirical_t: outcome.empirical_t(), outcome, lower_bound, c_f })
}
