use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid sector: n_up = {n_up} with L = {sites}")]
    EmptySector { sites: usize, n_up: usize },

    #[error("degenerate geometry: L = {sites} is too small for next-nearest-neighbour couplings")]
    DegenerateGeometry { sites: usize },

    #[error("state {kind} is incompatible with L = {sites}, n_up = {n_up}")]
    IncompatibleState { kind: &'static str, sites: usize, n_up: usize },

    #[error("site {site} out of range 1..={sites}")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("imaginary part {imag:e} exceeds the allowed residue {limit:e}")]
    ImaginaryResidue { imag: f64, limit: f64 },

    #[error("genericity check supports q <= 3, got {0}")]
    GenericityOrder(usize),

    #[error("exact moments support q in 1..=4, got {0}")]
    MomentOrder(usize),

    #[error("odd moments are only defined for real-valued dynamics")]
    ComplexOddMoment,

    #[error("cost envelope exceeded: {tuples} tuples for q = {q} (limit {limit})")]
    CostEnvelope { q: usize, tuples: u128, limit: u128 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("could not draw a generic spectrum in {0} attempts")]
    RejectionCap(usize),
}
