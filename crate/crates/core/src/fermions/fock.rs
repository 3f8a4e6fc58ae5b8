//! Many-body Fock-space versions of the quadratic model, for checking the
//! single-particle formulas on small lattices.
//!
//! Bit `j` of a basis index is the occupation of site `j`, and
//! `f_j = (Π_{i<j} (-1)^{n_i}) σ⁻_j`, so `|s⟩ = f†_{j_1} … f†_{j_N}|0⟩` with
//! `j_1 < … < j_N` carries amplitude `+1`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::lattice::{BasisState, HermitianOperator};
use crate::math;
use crate::matrix::CMatrix;
use crate::{Error, Result};

/// Largest lattice the Fock-space builders accept.
pub const MAX_FOCK_SITES: usize = 12;

fn check_sites(sites: usize) -> Result<()> {
    if sites == 0 || sites > MAX_FOCK_SITES {
        return Err(Error::InvalidParameter(alloc::format!("Fock builds need 1 <= L <= {MAX_FOCK_SITES}, got {sites}")));
    }
    Ok(())
}

fn parity_below(state: usize, site: usize) -> f64 {
    if (state & ((1usize << site) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `f_m† f_n |state⟩ = sign |out⟩`, or `None` if it vanishes.
pub fn hop(state: usize, m: usize, n: usize) -> Option<(usize, f64)> {
    if state & (1 << n) == 0 {
        return None;
    }
    let removed = state & !(1 << n);
    if removed & (1 << m) != 0 {
        return None;
    }
    let sign = parity_below(state, n) * parity_below(removed, m);
    Some((removed | (1 << m), sign))
}

/// Matrix of `f_m† f_n` on the `2^L` Fock space.
pub fn hopping_operator(sites: usize, m: usize, n: usize) -> Result<CMatrix> {
    check_sites(sites)?;
    for s in [m, n] {
        if s >= sites {
            return Err(Error::SiteOutOfRange { site: s, sites });
        }
    }
    let dim = 1usize << sites;
    let mut out = CMatrix::zeros(dim, dim);
    for state in 0..dim {
        if let Some((to, sign)) = hop(state, m, n) {
            out[(to, state)] += Complex64::new(sign, 0.0);
        }
    }
    Ok(out)
}

/// `H = Σ_mn M_mn f_m† f_n` for a real symmetric row-major `M`.
pub fn fock_hamiltonian(hopping: &[f64], sites: usize) -> Result<HermitianOperator> {
    check_sites(sites)?;
    if hopping.len() != sites * sites {
        return Err(Error::DimensionMismatch { expected: sites * sites, found: hopping.len() });
    }
    let dim = 1usize << sites;
    let mut h = CMatrix::zeros(dim, dim);
    for state in 0..dim {
        for m in 0..sites {
            for n in 0..sites {
                let amp = hopping[m * sites + n];
                if amp == 0.0 {
                    continue;
                }
                if let Some((to, sign)) = hop(state, m, n) {
                    h[(to, state)] += Complex64::new(sign * amp, 0.0);
                }
            }
        }
    }
    HermitianOperator::new(h)
}

/// Hermitian parts `X = (f_m†f_n + h.c.)/2` and `Y = (f_m†f_n - h.c.)/(2i)`,
/// so that `⟨f_m† f_n⟩ = ⟨X⟩ + i⟨Y⟩`.
pub fn correlator_observables(sites: usize, m: usize, n: usize) -> Result<(HermitianOperator, HermitianOperator)> {
    let c = hopping_operator(sites, m, n)?;
    let cd = c.adjoint();
    let dim = c.rows();
    let x = CMatrix::from_fn(dim, dim, |i, j| (c[(i, j)] + cd[(i, j)]) * 0.5);
    let y = CMatrix::from_fn(dim, dim, |i, j| (c[(i, j)] - cd[(i, j)]) * Complex64::new(0.0, -0.5));
    Ok((HermitianOperator::new(x)?, HermitianOperator::new(y)?))
}

fn determinant(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| math::abs_c(a[i * n + col]).total_cmp(&math::abs_c(a[j * n + col]))).unwrap();
        if math::abs_c(a[pivot * n + col]) == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for r in col + 1..n {
            let factor = a[r * n + col] / p;
            for k in col..n {
                let v = a[col * n + k];
                a[r * n + k] -= factor * v;
            }
        }
    }
    det
}

/// `Π_i (Σ_j φ_i(j) f_j†)|0⟩` for orthonormal site orbitals: the amplitude of
/// the configuration with occupied sites `j_1 < … < j_N` is `det[φ_i(j_k)]`.
pub fn slater_fock_state(sites: usize, orbitals: &[Vec<Complex64>]) -> Result<BasisState> {
    check_sites(sites)?;
    let n = orbitals.len();
    if n > sites {
        return Err(Error::InvalidParameter(alloc::format!("{n} orbitals on {sites} sites")));
    }
    for phi in orbitals {
        if phi.len() != sites {
            return Err(Error::DimensionMismatch { expected: sites, found: phi.len() });
        }
    }
    let dim = 1usize << sites;
    let mut amps = alloc::vec![Complex64::new(0.0, 0.0); dim];
    for (state, amp) in amps.iter_mut().enumerate() {
        if state.count_ones() as usize != n {
            continue;
        }
        let occupied: Vec<usize> = (0..sites).filter(|&j| state & (1 << j) != 0).collect();
        let mat: Vec<Complex64> = (0..n * n).map(|idx| orbitals[idx / n][occupied[idx % n]]).collect();
        *amp = determinant(mat, n);
    }
    BasisState::new(amps)
}
