//! Seeded random ensembles.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::math;
use crate::matrix::CMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: real and imaginary parts independent `N(0, 1)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `(G + G^†) / 2` for a matrix `G` of independent standard complex Gaussians.
pub fn gue_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(g[(i, i)].re, 0.0)
        } else {
            (g[(i, j)] + g[(j, i)].conj()) * 0.5
        }
    })
}

/// Uniformly (Haar) distributed unit vector in `C^dim`.
pub fn haar_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// Orthonormal set of `count` Haar-random vectors in `C^dim` (Gram-Schmidt on
/// Gaussian draws).
pub fn haar_orbitals<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Vec<Vec<Complex64>> {
    assert!(count <= dim);
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(count);
    while out.len() < count {
        let mut v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        for _ in 0..2 {
            for u in &out {
                let overlap: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= overlap * y;
                }
            }
        }
        let norm = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        if norm < 1e-8 {
            continue;
        }
        for z in &mut v {
            *z /= norm;
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gue_is_hermitian_and_seeded() {
        let a = gue_matrix(6, &mut rng(3));
        let b = gue_matrix(6, &mut rng(3));
        assert_eq!(a, b);
        assert_eq!(a.hermiticity_deviation(), 0.0);
    }

    #[test]
    fn orbitals_are_orthonormal() {
        let orb = haar_orbitals(5, 3, &mut rng(1));
        for i in 0..3 {
            for j in 0..3 {
                let ip: Complex64 = orb[i].iter().zip(&orb[j]).map(|(a, b)| a.conj() * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expect).norm_sqr() < 1e-26);
            }
        }
    }
}
