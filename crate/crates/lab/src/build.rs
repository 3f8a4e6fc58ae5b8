//! Turns configuration specs into core objects.

use anyhow::{Context, Result};
use equilibria_core::eigen::{diagonalize, Spectrum};
use equilibria_core::fermions::{
    build_free_model, generic_extended_model, random_slater_state, real_space_occupation, slater_state, FreeFermionModel,
    ModeState,
};
use equilibria_core::lattice::{
    build_spin_chain, build_state, random_hermitian, site_observable, BasisState, HermitianOperator, SiteObservable,
    SpinChainSpec,
};
use equilibria_core::quench::{make_setup, QuenchSetup};
use equilibria_core::sampling::{default_horizon, SamplingParams};
use equilibria_core::{CMatrix, Complex64};

use crate::config::{ExperimentConfig, FermionConfig, FermionModelSpec, FermionStateSpec, ModelSpec, ObservableSpec, StateSpec};

/// Seed streams; each random object draws from its own.
pub mod stream {
    pub const MODEL: u64 = 1;
    pub const STATE: u64 = 2;
    pub const OBSERVABLE: u64 = 3;
    pub const SAMPLING: u64 = 4;
    pub const FERMION_MODEL: u64 = 5;
    pub const FERMION_STATE: u64 = 6;
    /// Bounds setups use `SETUPS + 3 i + {0, 1, 2}`.
    pub const SETUPS: u64 = 1000;
}

pub struct System {
    pub hamiltonian: HermitianOperator,
    pub spectrum: Spectrum,
    pub chain: Option<SpinChainSpec>,
}

pub fn system(cfg: &ExperimentConfig, model: &ModelSpec) -> Result<System> {
    let (hamiltonian, chain) = match model {
        ModelSpec::SpinChain(c) => {
            let spec = c.spec();
            (build_spin_chain(&spec).context("building the spin chain")?, Some(spec))
        }
        ModelSpec::Gue { dim, seed } => (random_hermitian(*dim, seed.unwrap_or_else(|| cfg.stream_seed(stream::MODEL))), None),
        ModelSpec::Levels { levels } => {
            let spectrum = Spectrum::from_levels(levels.clone())?;
            return Ok(System { hamiltonian: HermitianOperator::diagonal(levels), spectrum, chain: None });
        }
    };
    let spectrum = diagonalize(&hamiltonian).context("diagonalizing the Hamiltonian")?;
    Ok(System { hamiltonian, spectrum, chain })
}

pub fn state(cfg: &ExperimentConfig, spec: &StateSpec, sys: &System) -> Result<BasisState> {
    let dim = sys.spectrum.dim();
    if let Some(kind) = spec.chain_kind() {
        let chain = sys.chain.context("chain states need a spin_chain model")?;
        return Ok(build_state(kind, chain.sites, chain.n_up)?);
    }
    Ok(match spec {
        StateSpec::Haar { seed } => BasisState::haar(dim, seed.unwrap_or_else(|| cfg.stream_seed(stream::STATE))),
        StateSpec::Basis { index } => BasisState::basis_vector(dim, *index),
        StateSpec::Eigenstate { index } => BasisState::normalized(sys.spectrum.vector(*index))?,
        StateSpec::Amplitudes { re, im } => {
            let amps = re
                .iter()
                .enumerate()
                .map(|(i, &r)| Complex64::new(r, im.as_ref().map_or(0.0, |v| v[i])))
                .collect();
            BasisState::normalized(amps)?
        }
        _ => unreachable!("chain states handled above"),
    })
}

pub fn observable(cfg: &ExperimentConfig, spec: &ObservableSpec, sys: &System, psi: &BasisState) -> Result<HermitianOperator> {
    let dim = sys.spectrum.dim();
    Ok(match spec {
        ObservableSpec::SigmaZ { site } => {
            let chain = sys.chain.context("sigma_z needs a spin_chain model")?;
            site_observable(SiteObservable::SigmaZ, *site, chain.sites, chain.n_up)?
        }
        ObservableSpec::Identity => HermitianOperator::identity(dim),
        ObservableSpec::Projector => HermitianOperator::projector(psi),
        ObservableSpec::Gue { seed } => random_hermitian(dim, seed.unwrap_or_else(|| cfg.stream_seed(stream::OBSERVABLE))),
        ObservableSpec::Matrix { re, im } => {
            let m = CMatrix::from_fn(dim, dim, |i, j| Complex64::new(re[i][j], im.as_ref().map_or(0.0, |v| v[i][j])));
            HermitianOperator::new(m).context("observable")?
        }
    })
}

/// Model, state and observable from the config, with the configured
/// resonance tolerance applied.
pub struct Quench {
    pub system: System,
    pub psi: BasisState,
    pub setup: QuenchSetup,
}

pub fn quench(cfg: &ExperimentConfig) -> Result<Quench> {
    let model = cfg.model.as_ref().context("model spec missing")?;
    let system = system(cfg, model)?;
    let psi = state(cfg, cfg.state.as_ref().context("state spec missing")?, &system)?;
    let a = observable(cfg, cfg.observable.as_ref().unwrap_or(&ObservableSpec::Projector), &system, &psi)?;
    let mut setup = make_setup(&system.spectrum, &psi, &a)?;
    if let Some(tol) = cfg.moments.tolerance {
        setup = setup.with_tolerance(tol)?;
    }
    Ok(Quench { system, psi, setup })
}

/// Sampling horizon: configured, else `10^4 · 2π / g_min`, else 1 for a
/// stationary state.
pub fn horizon(cfg: &ExperimentConfig, setup: &QuenchSetup) -> f64 {
    cfg.sampling.horizon.unwrap_or_else(|| setup.min_gap().map_or(1.0, default_horizon))
}

pub fn sampling(cfg: &ExperimentConfig, horizon: f64) -> SamplingParams {
    SamplingParams::new(horizon, cfg.sampling.n_samples, cfg.sampling.seed.unwrap_or_else(|| cfg.stream_seed(stream::SAMPLING)))
}

pub fn fermion_model(cfg: &ExperimentConfig, f: &FermionConfig) -> Result<FreeFermionModel> {
    match &f.model {
        FermionModelSpec::Dense { hopping } => {
            let l = hopping.len();
            let flat: Vec<f64> = hopping.iter().flatten().copied().collect();
            build_free_model(&flat, l).context("diagonalizing M")
        }
        FermionModelSpec::Generic { sites, seed, .. } => {
            generic_extended_model(*sites, seed.unwrap_or_else(|| cfg.stream_seed(stream::FERMION_MODEL)))
                .context("drawing a generic extended model")
        }
    }
}

pub fn fermion_state(cfg: &ExperimentConfig, f: &FermionConfig, model: &FreeFermionModel) -> Result<ModeState> {
    let l = model.sites();
    Ok(match &f.state {
        FermionStateSpec::RandomSlater { particles, seed } => {
            random_slater_state(l, particles.unwrap_or(l / 2), seed.unwrap_or_else(|| cfg.stream_seed(stream::FERMION_STATE)))?
        }
        FermionStateSpec::Sites { sites } => real_space_occupation(model, sites)?,
        FermionStateSpec::Modes { modes } => slater_state(model, modes)?,
    })
}
