//! Experiment configuration: one JSON document per run.

use std::path::{Path, PathBuf};

use equilibria_core::lattice::{Boundary, SpinChainSpec, StateKind};
use equilibria_core::quench::Quantity;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Model,
    Quench,
    Moments,
    Genericity,
    Tails,
    Recur,
    Fermion,
    Fig1,
    Fig2,
    Bounds,
}

impl Pipeline {
    pub fn name(&self) -> &'static str {
        match self {
            Pipeline::Model => "model",
            Pipeline::Quench => "quench",
            Pipeline::Moments => "moments",
            Pipeline::Genericity => "genericity",
            Pipeline::Tails => "tails",
            Pipeline::Recur => "recur",
            Pipeline::Fermion => "fermion",
            Pipeline::Fig1 => "fig1",
            Pipeline::Fig2 => "fig2",
            Pipeline::Bounds => "bounds",
        }
    }

    fn needs_model(&self) -> bool {
        !matches!(self, Pipeline::Fermion | Pipeline::Fig2 | Pipeline::Bounds)
    }

    fn needs_state(&self) -> bool {
        matches!(self, Pipeline::Quench | Pipeline::Moments | Pipeline::Tails | Pipeline::Recur | Pipeline::Fig1)
    }

    fn needs_observable(&self) -> bool {
        matches!(self, Pipeline::Quench | Pipeline::Moments | Pipeline::Tails | Pipeline::Fig1)
    }
}

/// Field-level validation failures; the run never starts.
#[derive(Debug, thiserror::Error)]
#[error("invalid configuration:\n  {}", .0.join("\n  "))]
pub struct ConfigError(pub Vec<String>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<Pipeline>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<ObservableSpec>,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub moments: MomentConfig,
    #[serde(default)]
    pub recurrence: RecurrenceConfig,
    #[serde(default)]
    pub tails: TailConfig,
    #[serde(default)]
    pub series: SeriesConfig,
    #[serde(default)]
    pub genericity: GenericityConfig,
    #[serde(default)]
    pub fig1: Fig1Config,
    #[serde(default)]
    pub fig2: Fig2Config,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fermion: Option<FermionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    SpinChain(SpinChainConfig),
    /// GUE matrix of dimension `dim`.
    Gue {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Diagonal Hamiltonian with the given levels; the computational basis is
    /// the eigenbasis.
    Levels { levels: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinChainConfig {
    #[serde(rename = "L")]
    pub sites: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_up: Option<usize>,
    #[serde(rename = "J1", default = "default_j1")]
    pub j1: f64,
    #[serde(rename = "g1", default = "default_g1")]
    pub gamma1: f64,
    #[serde(rename = "J2", default = "default_j2")]
    pub j2: f64,
    #[serde(rename = "g2", default = "default_g2")]
    pub gamma2: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

fn default_j1() -> f64 {
    -1.0
}
fn default_g1() -> f64 {
    1.0
}
fn default_j2() -> f64 {
    -0.2
}
fn default_g2() -> f64 {
    0.5
}

impl SpinChainConfig {
    pub fn standard(sites: usize) -> Self {
        Self::from(SpinChainSpec::standard(sites))
    }

    pub fn spec(&self) -> SpinChainSpec {
        SpinChainSpec {
            sites: self.sites,
            n_up: self.n_up.unwrap_or(self.sites / 2),
            j1: self.j1,
            gamma1: self.gamma1,
            j2: self.j2,
            gamma2: self.gamma2,
            boundary: self.boundary,
        }
    }
}

impl From<SpinChainSpec> for SpinChainConfig {
    fn from(s: SpinChainSpec) -> Self {
        Self {
            sites: s.sites,
            n_up: Some(s.n_up),
            j1: s.j1,
            gamma1: s.gamma1,
            j2: s.j2,
            gamma2: s.gamma2,
            boundary: s.boundary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Neel,
    NeelSymmetric,
    DomainwallTranslated,
    Haar {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Computational basis vector.
    Basis { index: usize },
    /// Eigenvector `index` of the Hamiltonian, levels ascending.
    Eigenstate {
        #[serde(default)]
        index: usize,
    },
    /// Explicit amplitudes, normalized on load.
    Amplitudes {
        re: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<f64>>,
    },
}

impl StateSpec {
    pub fn chain_kind(&self) -> Option<StateKind> {
        match self {
            StateSpec::Neel => Some(StateKind::Neel),
            StateSpec::NeelSymmetric => Some(StateKind::NeelSymmetric),
            StateSpec::DomainwallTranslated => Some(StateKind::DomainwallTranslated),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservableSpec {
    /// `σ^z` on a 1-based site of a spin chain.
    SigmaZ { site: usize },
    Identity,
    /// Projector onto the initial state.
    Projector,
    Gue {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Explicit matrix in the model's computational basis.
    Matrix {
        re: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    /// Defaults to `10^4 · 2π / g_min`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

fn default_samples() -> usize {
    100_000
}
fn default_bins() -> usize {
    60
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self { horizon: None, n_samples: default_samples(), seed: None, bins: default_bins() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentConfig {
    #[serde(default = "default_orders")]
    pub orders: Vec<usize>,
    /// Resonance tolerance; defaults to `1e-10 · ‖H‖`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default = "yes")]
    pub sample: bool,
    #[serde(default = "both_quantities")]
    pub quantities: Vec<Quantity>,
}

fn default_orders() -> Vec<usize> {
    vec![1, 2, 3, 4]
}
fn yes() -> bool {
    true
}
fn both_quantities() -> Vec<Quantity> {
    vec![Quantity::Observable, Quantity::Fidelity]
}

impl Default for MomentConfig {
    fn default() -> Self {
        Self { orders: default_orders(), tolerance: None, sample: true, quantities: both_quantities() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurrenceConfig {
    #[serde(default = "default_u")]
    pub u: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Defaults to the largest admissible step `π / (10 ‖H‖)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "both_quantities")]
    pub quantities: Vec<Quantity>,
}

fn default_u() -> f64 {
    0.1
}
fn default_delta() -> f64 {
    0.05
}
fn default_t_max() -> f64 {
    1000.0
}

impl Default for RecurrenceConfig {
    fn default() -> Self {
        Self { u: default_u(), delta: default_delta(), dt: None, t_max: default_t_max(), quantities: both_quantities() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailConfig {
    /// Grid points `δ_k = k · δ_max / points`, with `δ_max` the largest possible
    /// deviation (`2‖A‖`, or 1 for the fidelity).
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "both_quantities")]
    pub quantities: Vec<Quantity>,
}

fn default_points() -> usize {
    20
}

impl Default for TailConfig {
    fn default() -> Self {
        Self { points: default_points(), quantities: both_quantities() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    #[serde(default = "default_series_t")]
    pub t_max: f64,
    #[serde(default = "default_series_points")]
    pub points: usize,
}

fn default_series_t() -> f64 {
    20.0
}
fn default_series_points() -> usize {
    401
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self { t_max: default_series_t(), points: default_series_points() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenericityConfig {
    #[serde(default = "default_q_max")]
    pub q_max: usize,
    /// Defaults to `1e-10 · ‖H‖`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Restrict to levels the initial state populates.
    #[serde(default)]
    pub populated_only: bool,
}

fn default_q_max() -> usize {
    3
}

impl Default for GenericityConfig {
    fn default() -> Self {
        Self { q_max: default_q_max(), tolerance: None, populated_only: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig1Config {
    #[serde(default = "default_horizons")]
    pub horizons: Vec<f64>,
    /// Append the default horizon `10^4 · 2π / g_min`.
    #[serde(default = "yes")]
    pub include_default: bool,
}

fn default_horizons() -> Vec<f64> {
    vec![1.0, 10.0, 100.0]
}

impl Default for Fig1Config {
    fn default() -> Self {
        Self { horizons: default_horizons(), include_default: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig2Config {
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
    #[serde(default = "default_states")]
    pub states: Vec<StateKind>,
    /// Also record the ground state, whose purity is 1.
    #[serde(default = "yes")]
    pub eigenstate_control: bool,
}

fn default_sizes() -> Vec<usize> {
    vec![6, 8, 10, 12]
}
fn default_states() -> Vec<StateKind> {
    vec![StateKind::Neel, StateKind::NeelSymmetric, StateKind::DomainwallTranslated]
}

impl Default for Fig2Config {
    fn default() -> Self {
        Self { sizes: default_sizes(), states: default_states(), eigenstate_control: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    #[serde(default = "default_setups")]
    pub setups: usize,
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "default_bound_orders")]
    pub orders: Vec<usize>,
    #[serde(default = "default_trace_orders")]
    pub trace_orders: Vec<usize>,
}

fn default_setups() -> usize {
    30
}
fn default_dims() -> Vec<usize> {
    vec![4, 8, 16, 32]
}
fn default_bound_orders() -> Vec<usize> {
    vec![2, 4]
}
fn default_trace_orders() -> Vec<usize> {
    vec![2, 3, 4, 5, 6]
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            setups: default_setups(),
            dims: default_dims(),
            orders: default_bound_orders(),
            trace_orders: default_trace_orders(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FermionModelSpec {
    Dense {
        #[serde(rename = "M")]
        hopping: Vec<Vec<f64>>,
    },
    Generic {
        #[serde(rename = "type")]
        kind: GenericKind,
        #[serde(rename = "L")]
        sites: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenericKind {
    GenericExtended,
}

impl FermionModelSpec {
    pub fn sites(&self) -> usize {
        match self {
            FermionModelSpec::Dense { hopping } => hopping.len(),
            FermionModelSpec::Generic { sites, .. } => *sites,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FermionStateSpec {
    /// Haar-random orbitals; defaults to half filling.
    RandomSlater {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        particles: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// One fermion on each listed (0-based) site.
    Sites { sites: Vec<usize> },
    /// Occupied single-particle modes, energies ascending.
    Modes { modes: Vec<usize> },
}

impl Default for FermionStateSpec {
    fn default() -> Self {
        FermionStateSpec::RandomSlater { particles: None, seed: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FermionConfig {
    pub model: FermionModelSpec,
    #[serde(default)]
    pub state: FermionStateSpec,
    /// 0-based site pairs; defaults to `(0, 0)`, `(0, 1)` and `(0, L/2)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(usize, usize)>>,
    #[serde(default = "default_bound_orders")]
    pub orders: Vec<usize>,
    #[serde(default)]
    pub sample: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recurrence: Option<RecurrenceConfig>,
    #[serde(default = "default_extensivity")]
    pub extensivity_threshold: f64,
}

fn default_extensivity() -> f64 {
    equilibria_core::fermions::DEFAULT_EXTENSIVITY_THRESHOLD
}

impl FermionConfig {
    pub fn generic(sites: usize, seed: u64) -> Self {
        Self {
            model: FermionModelSpec::Generic { kind: GenericKind::GenericExtended, sites, seed: Some(seed) },
            state: FermionStateSpec::default(),
            pairs: None,
            orders: default_bound_orders(),
            sample: false,
            recurrence: None,
            extensivity_threshold: default_extensivity(),
        }
    }

    pub fn resolved_pairs(&self) -> Vec<(usize, usize)> {
        let l = self.model.sites();
        self.pairs.clone().unwrap_or_else(|| {
            let mut p = vec![(0, 0), (0, 1.min(l - 1)), (0, l / 2)];
            p.dedup();
            p
        })
    }
}

impl ExperimentConfig {
    /// Configuration used when no file is given.
    pub fn builtin(pipeline: Pipeline) -> Self {
        let mut cfg = Self::empty();
        cfg.pipeline = Some(pipeline);
        match pipeline {
            Pipeline::Fermion => cfg.fermion = Some(FermionConfig::generic(64, 7)),
            Pipeline::Fig2 | Pipeline::Bounds => {}
            _ => {
                cfg.model = Some(ModelSpec::SpinChain(SpinChainConfig::standard(10)));
                cfg.state = Some(StateSpec::Neel);
                cfg.observable = Some(ObservableSpec::SigmaZ { site: 1 });
            }
        }
        cfg
    }

    fn empty() -> Self {
        serde_json::from_str("{}").expect("every field has a default")
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        use anyhow::Context;
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| ConfigError(vec![format!("{}: {e}", path.display())]).into())
    }

    /// Seed for an independent random stream; explicit per-field seeds take
    /// precedence at the call site.
    pub fn stream_seed(&self, stream: u64) -> u64 {
        mix(self.seed ^ mix(stream))
    }

    /// Checks every field the pipeline will use.
    pub fn validate(&self, pipeline: Pipeline) -> Result<(), ConfigError> {
        let mut errs = Vec::new();
        if let Some(p) = self.pipeline {
            if p != pipeline {
                errs.push(format!("pipeline: config is for `{}`, not `{}`", p.name(), pipeline.name()));
            }
        }
        if pipeline.needs_model() {
            match &self.model {
                None => errs.push(format!("model: required for {}", pipeline.name())),
                Some(m) => validate_model(m, &mut errs),
            }
        }
        if pipeline.needs_state() {
            match &self.state {
                None => errs.push(format!("state: required for {}", pipeline.name())),
                Some(s) => validate_state(s, self.model.as_ref(), &mut errs),
            }
        } else if let (Some(s), Pipeline::Model | Pipeline::Genericity) = (&self.state, pipeline) {
            validate_state(s, self.model.as_ref(), &mut errs);
        }
        if pipeline.needs_observable() {
            match &self.observable {
                None => errs.push(format!("observable: required for {}", pipeline.name())),
                Some(o) => validate_observable(o, self.model.as_ref(), &mut errs),
            }
        }
        if pipeline == Pipeline::Fig1 && !matches!(self.model, Some(ModelSpec::SpinChain(_)) | None) {
            errs.push("model: fig1 needs a spin_chain model".into());
        }
        let s = &self.sampling;
        if let Some(h) = s.horizon {
            positive("sampling.horizon", h, &mut errs);
        }
        if s.n_samples < 2 {
            errs.push("sampling.n_samples: need at least 2 samples".into());
        }
        if s.bins == 0 {
            errs.push("sampling.bins: must be at least 1".into());
        }
        match pipeline {
            Pipeline::Moments => {
                orders("moments.orders", &self.moments.orders, 1, 4, &mut errs);
                if let Some(t) = self.moments.tolerance {
                    positive("moments.tolerance", t, &mut errs);
                }
                nonempty("moments.quantities", &self.moments.quantities, &mut errs);
            }
            Pipeline::Recur => {
                validate_recurrence("recurrence", &self.recurrence, &mut errs);
                nonempty("recurrence.quantities", &self.recurrence.quantities, &mut errs);
            }
            Pipeline::Tails => {
                if self.tails.points == 0 {
                    errs.push("tails.points: must be at least 1".into());
                }
                nonempty("tails.quantities", &self.tails.quantities, &mut errs);
            }
            Pipeline::Quench => {
                positive("series.t_max", self.series.t_max, &mut errs);
                if self.series.points < 2 {
                    errs.push("series.points: need at least 2 points".into());
                }
            }
            Pipeline::Genericity => {
                if !(1..=3).contains(&self.genericity.q_max) {
                    errs.push(format!("genericity.q_max: {} is outside 1..=3", self.genericity.q_max));
                }
                if let Some(t) = self.genericity.tolerance {
                    positive("genericity.tolerance", t, &mut errs);
                }
                if self.genericity.populated_only && self.state.is_none() {
                    errs.push("state: required when genericity.populated_only is set".into());
                }
            }
            Pipeline::Fig1 => {
                for (i, &t) in self.fig1.horizons.iter().enumerate() {
                    positive(&format!("fig1.horizons[{i}]"), t, &mut errs);
                }
                if self.fig1.horizons.is_empty() && !self.fig1.include_default {
                    errs.push("fig1.horizons: no horizons requested".into());
                }
            }
            Pipeline::Fig2 => {
                nonempty("fig2.sizes", &self.fig2.sizes, &mut errs);
                for (i, &l) in self.fig2.sizes.iter().enumerate() {
                    if !(4..=14).contains(&l) {
                        errs.push(format!("fig2.sizes[{i}]: L = {l} is outside 4..=14"));
                    }
                }
                if let Some(m) = &self.model {
                    if !matches!(m, ModelSpec::SpinChain(_)) {
                        errs.push("model: fig2 takes its couplings from a spin_chain model".into());
                    }
                }
            }
            Pipeline::Bounds => {
                let b = &self.bounds;
                if b.setups == 0 {
                    errs.push("bounds.setups: must be at least 1".into());
                }
                nonempty("bounds.dims", &b.dims, &mut errs);
                for (i, &d) in b.dims.iter().enumerate() {
                    if !(2..=128).contains(&d) {
                        errs.push(format!("bounds.dims[{i}]: D = {d} is outside 2..=128"));
                    }
                }
                orders("bounds.orders", &b.orders, 1, 4, &mut errs);
                // the inequality can fail at q = 1 (A = identity)
                orders("bounds.trace_orders", &b.trace_orders, 2, 12, &mut errs);
            }
            Pipeline::Fermion => match &self.fermion {
                None => errs.push("fermion: required for fermion".into()),
                Some(f) => validate_fermion(f, &mut errs),
            },
            Pipeline::Model => {}
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(ConfigError(errs))
        }
    }
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn positive(field: &str, x: f64, errs: &mut Vec<String>) {
    if !(x > 0.0 && x.is_finite()) {
        errs.push(format!("{field}: {x} must be positive and finite"));
    }
}

fn nonempty<T>(field: &str, xs: &[T], errs: &mut Vec<String>) {
    if xs.is_empty() {
        errs.push(format!("{field}: must not be empty"));
    }
}

fn orders(field: &str, qs: &[usize], lo: usize, hi: usize, errs: &mut Vec<String>) {
    nonempty(field, qs, errs);
    for (i, &q) in qs.iter().enumerate() {
        if !(lo..=hi).contains(&q) {
            errs.push(format!("{field}[{i}]: q = {q} is outside {lo}..={hi}"));
        }
    }
}

/// Dimension of the model, when it can be known without building it.
pub fn model_dim(m: &ModelSpec) -> usize {
    match m {
        ModelSpec::SpinChain(c) => c.spec().sector_dim(),
        ModelSpec::Gue { dim, .. } => *dim,
        ModelSpec::Levels { levels } => levels.len(),
    }
}

fn validate_model(m: &ModelSpec, errs: &mut Vec<String>) {
    match m {
        ModelSpec::SpinChain(c) => {
            if !(2..=16).contains(&c.sites) {
                errs.push(format!("model.L: {} is outside 2..=16", c.sites));
                return;
            }
            if let Err(e) = c.spec().validate() {
                errs.push(format!("model: {e}"));
            } else if c.spec().sector_dim() > 3432 {
                errs.push(format!("model: sector dimension {} exceeds the dense solver budget 3432", c.spec().sector_dim()));
            }
        }
        ModelSpec::Gue { dim, .. } => {
            if !(1..=1024).contains(dim) {
                errs.push(format!("model.dim: {dim} is outside 1..=1024"));
            }
        }
        ModelSpec::Levels { levels } => {
            if levels.is_empty() {
                errs.push("model.levels: must not be empty".into());
            }
            if levels.iter().any(|x| !x.is_finite()) {
                errs.push("model.levels: values must be finite".into());
            }
            if levels.windows(2).any(|w| w[0] > w[1]) {
                errs.push("model.levels: must be non-decreasing".into());
            }
        }
    }
}

fn validate_state(s: &StateSpec, model: Option<&ModelSpec>, errs: &mut Vec<String>) {
    let dim = model.map(model_dim);
    if let Some(kind) = s.chain_kind() {
        match model {
            Some(ModelSpec::SpinChain(c)) => {
                let spec = c.spec();
                if matches!(kind, StateKind::Neel | StateKind::NeelSymmetric) && (spec.sites % 2 != 0 || 2 * spec.n_up != spec.sites) {
                    errs.push(format!("state: {} needs even L at half filling (L = {}, n_up = {})", kind.name(), spec.sites, spec.n_up));
                }
            }
            Some(_) => errs.push(format!("state: {} needs a spin_chain model", kind.name())),
            None => {}
        }
        return;
    }
    match (s, dim) {
        (StateSpec::Basis { index }, Some(d)) | (StateSpec::Eigenstate { index }, Some(d)) if *index >= d => {
            errs.push(format!("state.index: {index} is out of range for dimension {d}"));
        }
        (StateSpec::Amplitudes { re, im }, _) => {
            if let Some(d) = dim {
                if re.len() != d {
                    errs.push(format!("state.re: length {} does not match dimension {d}", re.len()));
                }
            }
            if let Some(im) = im {
                if im.len() != re.len() {
                    errs.push("state.im: length differs from state.re".into());
                }
            }
            let norm: f64 = re.iter().chain(im.iter().flatten()).map(|x| x * x).sum();
            if !(norm > 0.0 && norm.is_finite()) {
                errs.push("state: amplitudes must be finite and not all zero".into());
            }
        }
        _ => {}
    }
}

fn validate_observable(o: &ObservableSpec, model: Option<&ModelSpec>, errs: &mut Vec<String>) {
    match o {
        ObservableSpec::SigmaZ { site } => match model {
            Some(ModelSpec::SpinChain(c)) => {
                if *site == 0 || *site > c.sites {
                    errs.push(format!("observable.site: {site} is outside 1..={}", c.sites));
                }
            }
            Some(_) => errs.push("observable: sigma_z needs a spin_chain model".into()),
            None => {}
        },
        ObservableSpec::Matrix { re, im } => {
            let d = re.len();
            if let Some(dim) = model.map(model_dim) {
                if d != dim {
                    errs.push(format!("observable.re: {d} rows, model dimension is {dim}"));
                }
            }
            if re.iter().any(|r| r.len() != d) {
                errs.push("observable.re: matrix must be square".into());
            }
            if let Some(im) = im {
                if im.len() != d || im.iter().any(|r| r.len() != d) {
                    errs.push("observable.im: shape differs from observable.re".into());
                }
            }
        }
        _ => {}
    }
}

fn validate_recurrence(field: &str, r: &RecurrenceConfig, errs: &mut Vec<String>) {
    positive(&format!("{field}.u"), r.u, errs);
    positive(&format!("{field}.delta"), r.delta, errs);
    positive(&format!("{field}.t_max"), r.t_max, errs);
    if let Some(dt) = r.dt {
        positive(&format!("{field}.dt"), dt, errs);
    }
}

fn validate_fermion(f: &FermionConfig, errs: &mut Vec<String>) {
    let l = f.model.sites();
    match &f.model {
        FermionModelSpec::Dense { hopping } => {
            if l == 0 {
                errs.push("fermion.model.M: must not be empty".into());
            }
            if hopping.iter().any(|r| r.len() != l) {
                errs.push("fermion.model.M: matrix must be square".into());
            }
        }
        FermionModelSpec::Generic { sites, .. } => {
            if !(2..=256).contains(sites) {
                errs.push(format!("fermion.model.L: {sites} is outside 2..=256"));
            }
        }
    }
    if l == 0 {
        return;
    }
    match &f.state {
        FermionStateSpec::RandomSlater { particles, .. } => {
            if let Some(n) = particles {
                if *n > l {
                    errs.push(format!("fermion.state.particles: {n} exceeds L = {l}"));
                }
            }
        }
        FermionStateSpec::Sites { sites: list } | FermionStateSpec::Modes { modes: list } => {
            if let Some(bad) = list.iter().find(|&&s| s >= l) {
                errs.push(format!("fermion.state: index {bad} is outside 0..{l}"));
            }
            let mut sorted = list.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                errs.push("fermion.state: indices must be distinct".into());
            }
        }
    }
    for (i, &(m, n)) in f.resolved_pairs().iter().enumerate() {
        if m >= l || n >= l {
            errs.push(format!("fermion.pairs[{i}]: ({m}, {n}) is outside 0..{l}"));
        }
    }
    orders("fermion.orders", &f.orders, 1, 4, errs);
    positive("fermion.extensivity_threshold", f.extensivity_threshold, errs);
    if let Some(r) = &f.recurrence {
        validate_recurrence("fermion.recurrence", r, errs);
    }
}
