//! Dense Hermitian eigendecomposition by cyclic Jacobi rotations.
//!
//! Real symmetric input is rotated directly. Complex Hermitian input `H` is
//! embedded as the real symmetric `[[Re H, -Im H], [Im H, Re H]]`, whose
//! spectrum is that of `H` with every level doubled; each doubled cluster is
//! folded back to complex eigenvectors by pivoted Gram-Schmidt.
//!
//! Output conventions: eigenvalues ascending, and in every eigenvector the
//! first component of (near-)maximal magnitude is real and positive.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::lattice::HermitianOperator;
use crate::math;
use crate::matrix::CMatrix;
use crate::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
/// Sweeps stop once the off-diagonal Frobenius norm is below this fraction of
/// the full Frobenius norm.
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    /// Column `k` holds the eigenvector of `eigenvalues[k]`.
    eigenvectors: CMatrix,
}

impl Spectrum {
    /// Builds a spectrum from explicit levels with the computational basis as
    /// eigenbasis. Levels must be sorted ascending.
    pub fn from_levels(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter("levels must be non-decreasing".into()));
        }
        let dim = eigenvalues.len();
        Ok(Self { eigenvalues, eigenvectors: CMatrix::identity(dim) })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    /// `max |E_k|`, the operator norm of the diagonalized matrix.
    pub fn norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    /// `max_k ||H v_k - E_k v_k||`.
    pub fn max_residual(&self, h: &CMatrix) -> f64 {
        (0..self.dim())
            .map(|k| {
                let v = self.vector(k);
                let hv = h.matvec(&v);
                math::sqrt(hv.iter().zip(&v).map(|(a, b)| (a - b * self.eigenvalues[k]).norm_sqr()).sum())
            })
            .fold(0.0, f64::max)
    }

    /// `max |V^† V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let v = &self.eigenvectors;
        v.adjoint().matmul(v).sub(&CMatrix::identity(self.dim())).max_abs()
    }

    /// `V diag(E) V^†`.
    pub fn reconstruct(&self) -> CMatrix {
        let v = &self.eigenvectors;
        let scaled = CMatrix::from_fn(self.dim(), self.dim(), |i, k| v[(i, k)] * self.eigenvalues[k]);
        scaled.matmul(&v.adjoint())
    }
}

/// Full eigendecomposition of a Hermitian operator.
pub fn diagonalize(h: &HermitianOperator) -> Result<Spectrum> {
    diagonalize_matrix(h.matrix())
}

fn check_hermitian(h: &CMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch { expected: h.rows(), found: h.cols() });
    }
    let deviation = h.hermiticity_deviation();
    if deviation > 1e-12 * h.max_abs() {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

pub fn diagonalize_matrix(h: &CMatrix) -> Result<Spectrum> {
    check_hermitian(h)?;
    let n = h.rows();
    if h.is_real() {
        let a: Vec<f64> = h.as_slice().iter().map(|z| z.re).collect();
        let (values, vt) = jacobi_symmetric(a, n, true)?;
        let vt = vt.expect("vectors requested");
        let mut pairs: Vec<(f64, Vec<Complex64>)> = values
            .into_iter()
            .enumerate()
            .map(|(k, e)| (e, vt[k * n..(k + 1) * n].iter().map(|&x| Complex64::new(x, 0.0)).collect()))
            .collect();
        finish(&mut pairs, n)
    } else {
        diagonalize_complex(h)
    }
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(h: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    let n = h.rows();
    let mut values = if h.is_real() {
        let a: Vec<f64> = h.as_slice().iter().map(|z| z.re).collect();
        jacobi_symmetric(a, n, false)?.0
    } else {
        let (values, _) = jacobi_symmetric(real_embedding(h), 2 * n, false)?;
        let mut values = values;
        values.sort_by(f64::total_cmp);
        // every level appears twice in the embedding
        values.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
    };
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Largest singular value of a Hermitian operator, `max |λ|`.
pub fn operator_norm(a: &HermitianOperator) -> Result<f64> {
    let m = a.matrix();
    let n = m.rows();
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == Complex64::new(0.0, 0.0)));
    if diagonal {
        return Ok((0..n).map(|i| m[(i, i)].re.abs()).fold(0.0, f64::max));
    }
    Ok(eigenvalues(m)?.iter().fold(0.0, |acc: f64, e| acc.max(e.abs())))
}

fn real_embedding(h: &CMatrix) -> Vec<f64> {
    let n = h.rows();
    let m = 2 * n;
    let mut b = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            b[i * m + j] = z.re;
            b[i * m + n + j] = -z.im;
            b[(n + i) * m + j] = z.im;
            b[(n + i) * m + n + j] = z.re;
        }
    }
    b
}

fn diagonalize_complex(h: &CMatrix) -> Result<Spectrum> {
    let n = h.rows();
    let m = 2 * n;
    let (values, vt) = jacobi_symmetric(real_embedding(h), m, true)?;
    let vt = vt.expect("vectors requested");

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    let scale = values.iter().fold(0.0, |acc: f64, e| acc.max(e.abs()));
    let cluster_tol = 1e-9 * scale.max(f64::MIN_POSITIVE);

    let mut pairs: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(n);
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && values[order[end]] - values[order[end - 1]] <= cluster_tol {
            end += 1;
        }
        let size = end - start;
        if size % 2 != 0 {
            return Err(Error::InvalidParameter("real embedding produced an unpaired eigenvalue".into()));
        }
        let candidates: Vec<Vec<Complex64>> = order[start..end]
            .iter()
            .map(|&k| {
                let row = &vt[k * m..(k + 1) * m];
                (0..n).map(|i| Complex64::new(row[i], row[n + i])).collect()
            })
            .collect();
        for v in fold_cluster(&candidates, size / 2) {
            let hv = h.matvec(&v);
            let rayleigh: Complex64 = v.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
            pairs.push((rayleigh.re, v));
        }
        start = end;
    }
    finish(&mut pairs, n)
}

/// Picks `count` orthonormal complex vectors spanning the complex span of the
/// candidates, always taking the candidate with the largest residual next.
fn fold_cluster(candidates: &[Vec<Complex64>], count: usize) -> Vec<Vec<Complex64>> {
    let mut kept: Vec<Vec<Complex64>> = Vec::with_capacity(count);
    while kept.len() < count {
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for z in candidates {
            let mut r = z.clone();
            for _ in 0..2 {
                for u in &kept {
                    let overlap: Complex64 = u.iter().zip(&r).map(|(a, b)| a.conj() * b).sum();
                    for (x, y) in r.iter_mut().zip(u) {
                        *x -= overlap * y;
                    }
                }
            }
            let norm2: f64 = r.iter().map(|x| x.norm_sqr()).sum();
            if best.as_ref().is_none_or(|(b, _)| norm2 > *b) {
                best = Some((norm2, r));
            }
        }
        let (norm2, mut r) = best.expect("cluster is non-empty");
        let norm = math::sqrt(norm2);
        for x in &mut r {
            *x /= norm;
        }
        kept.push(r);
    }
    kept
}

fn apply_phase_convention(v: &mut [Complex64]) {
    let max = v.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v.iter().position(|z| z.norm_sqr() >= max * (1.0 - 1e-9)).expect("max exists");
    let p = v[pivot];
    let phase = p.conj() / math::abs_c(p);
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[pivot] = Complex64::new(v[pivot].re, 0.0);
}

fn finish(pairs: &mut [(f64, Vec<Complex64>)], n: usize) -> Result<Spectrum> {
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&a, &b| pairs[a].0.total_cmp(&pairs[b].0).then(a.cmp(&b)));
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let (e, v) = &mut pairs[k];
        apply_phase_convention(v);
        eigenvalues.push(*e);
        for (i, &x) in v.iter().enumerate() {
            eigenvectors[(i, col)] = x;
        }
    }
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// Cyclic Jacobi on a real symmetric row-major `n x n` matrix. Returns the
/// (unsorted) diagonal and, if requested, the eigenvectors as rows of a
/// row-major matrix (`vt[k * n + i]` is component `i` of vector `k`).
pub fn jacobi_symmetric(mut a: Vec<f64>, n: usize, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    assert_eq!(a.len(), n * n);
    let mut vt = if want_vectors {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        Some(v)
    } else {
        None
    };

    let total = math::sqrt(a.iter().map(|x| x * x).sum());
    let target = OFF_DIAGONAL_TOLERANCE * total;
    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        math::sqrt(s)
    };

    let mut sweep = 0;
    loop {
        let off = off_norm(&a);
        if off <= target {
            break;
        }
        if sweep == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps: sweep, off_norm: off });
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = {
                    let t = 1.0 / (theta.abs() + math::sqrt(theta * theta + 1.0));
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                let tau = s / (1.0 + c);
                rotate(&mut a, n, p, q, s, tau);
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = vt.as_mut() {
                    let (head, tail) = v.split_at_mut(q * n);
                    let vp = &mut head[p * n..(p + 1) * n];
                    let vq = &mut tail[..n];
                    for (x, y) in vp.iter_mut().zip(vq.iter_mut()) {
                        let g = *x;
                        let h = *y;
                        *x = g - s * (h + g * tau);
                        *y = h + s * (g - h * tau);
                    }
                }
            }
        }
        sweep += 1;
    }
    let diag = (0..n).map(|i| a[i * n + i]).collect();
    Ok((diag, vt))
}

/// Applies the rotation in the `(p, q)` plane to rows and columns `p`, `q`
/// other than the `2 x 2` pivot block.
#[inline]
fn rotate(a: &mut [f64], n: usize, p: usize, q: usize, s: f64, tau: f64) {
    let (head, tail) = a.split_at_mut(q * n);
    let row_p = &mut head[p * n..(p + 1) * n];
    let row_q = &mut tail[..n];
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let g = row_p[r];
        let h = row_q[r];
        row_p[r] = g - s * (h + g * tau);
        row_q[r] = h + s * (g - h * tau);
    }
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let gp = a[p * n + r];
        let gq = a[q * n + r];
        a[r * n + p] = gp;
        a[r * n + q] = gq;
    }
}
