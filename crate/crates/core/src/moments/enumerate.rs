//! Exact infinite-time moments by meet-in-the-middle over gap tuples.
//!
//! `μ_q = lim (1/T)∫ (f - f̄)^⌈q/2⌉ conj(f - f̄)^⌊q/2⌋ dt` is the sum, over
//! tuples of table entries whose gaps cancel, of the product of their weights.
//! The `⌊q/2⌋` conjugated factors are enumerated, sorted by partial gap sum and
//! stored; the `⌈q/2⌉` plain factors are streamed, and each looks up the
//! stored sums inside the half-open window `[-s - q·tol, -s + q·tol)`.
//! For even `q` the plain tuples are the stored ones with negated sums and
//! conjugated weights, so a single sorted list is swept with two pointers.
//! Nothing here assumes a generic spectrum.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::gaps::GapTable;
use crate::math::ComplexSum;
use crate::par;
use crate::{Error, Result};

/// Largest number of stored partial tuples.
pub const STORED_LIMIT: u128 = 25_000_000;
/// Largest number of streamed tuples.
pub const STREAM_LIMIT: u128 = 250_000_000;

const NONE: u32 = u32::MAX;

struct Stored {
    sums: Vec<f64>,
    index: Vec<(u32, u32)>,
}

fn tuple_count(n: usize, k: usize) -> u128 {
    (n as u128).pow(k as u32)
}

fn build_stored(gaps: &[f64], k: usize) -> Stored {
    let n = gaps.len();
    let mut items: Vec<(f64, u32, u32)> = match k {
        0 => alloc::vec![(0.0, NONE, NONE)],
        1 => (0..n).map(|a| (gaps[a], a as u32, NONE)).collect(),
        _ => {
            let mut v = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    v.push((gaps[a] + gaps[b], a as u32, b as u32));
                }
            }
            v
        }
    };
    sort_items(&mut items);
    Stored { sums: items.iter().map(|x| x.0).collect(), index: items.iter().map(|x| (x.1, x.2)).collect() }
}

#[cfg(feature = "std")]
fn sort_items(items: &mut [(f64, u32, u32)]) {
    use rayon::slice::ParallelSliceMut;
    items.par_sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
}

#[cfg(not(feature = "std"))]
fn sort_items(items: &mut [(f64, u32, u32)]) {
    items.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
}

/// Exact `μ_q` for `q` in `1..=4`.
pub fn exact_moment(table: &GapTable, q: usize) -> Result<f64> {
    let z = exact_moment_complex(table, q)?;
    let limit = 1e-8 * libm::pow(table.scale.max(f64::MIN_POSITIVE), q as f64);
    if z.im.abs() > limit {
        return Err(Error::ImaginaryResidue { imag: z.im, limit });
    }
    Ok(z.re)
}

/// The enumeration before the imaginary residue is checked and dropped.
pub fn exact_moment_complex(table: &GapTable, q: usize) -> Result<Complex64> {
    if q == 0 || q > 4 {
        return Err(Error::MomentOrder(q));
    }
    if q % 2 == 1 && !table.real_valued {
        return Err(Error::ComplexOddMoment);
    }
    let plus = q.div_ceil(2);
    let minus = q / 2;
    let n = table.len();
    let stored_count = tuple_count(n, minus);
    let streamed_count = tuple_count(n, plus);
    if stored_count > STORED_LIMIT {
        return Err(Error::CostEnvelope { q, tuples: stored_count, limit: STORED_LIMIT });
    }
    if streamed_count > STREAM_LIMIT {
        return Err(Error::CostEnvelope { q, tuples: streamed_count, limit: STREAM_LIMIT });
    }
    if n == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }

    let plus_gaps: Vec<f64> = table.entries.iter().map(|e| e.gap).collect();
    let plus_weights: Vec<Complex64> = table.entries.iter().map(|e| e.weight).collect();
    let minus_gaps: Vec<f64> = plus_gaps.iter().map(|g| -g).collect();
    let minus_weights: Vec<Complex64> = plus_weights.iter().map(|w| w.conj()).collect();

    let stored = build_stored(&minus_gaps, minus);
    let stored_weight = |(a, b): (u32, u32)| -> Complex64 {
        let mut w = Complex64::new(1.0, 0.0);
        if a != NONE {
            w *= minus_weights[a as usize];
        }
        if b != NONE {
            w *= minus_weights[b as usize];
        }
        w
    };
    let window = q as f64 * table.tolerance;

    let partials = if plus == minus {
        // plain tuple i has sum -σ_i and weight conj(w_i); its partners are
        // the stored sums in [σ_i - W, σ_i + W), monotone in i
        let len = stored.sums.len();
        par::map_chunks(len, 1 << 14, |range| {
            let mut acc = ComplexSum::new();
            let first = stored.sums[range.start];
            let mut lo = stored.sums.partition_point(|&x| x < first - window);
            let mut hi = stored.sums.partition_point(|&x| x < first + window);
            for i in range {
                let sigma = stored.sums[i];
                while lo < len && stored.sums[lo] < sigma - window {
                    lo += 1;
                }
                while hi < len && stored.sums[hi] < sigma + window {
                    hi += 1;
                }
                let mut inner = Complex64::new(0.0, 0.0);
                for &idx in &stored.index[lo..hi] {
                    inner += stored_weight(idx);
                }
                acc.add(stored_weight(stored.index[i]).conj() * inner);
            }
            acc.value()
        })
    } else {
        let lookup = |s: f64, acc: &mut ComplexSum, w: Complex64| {
            let lo = stored.sums.partition_point(|&x| x < -s - window);
            let hi = stored.sums.partition_point(|&x| x < -s + window);
            if lo < hi {
                let mut inner = Complex64::new(0.0, 0.0);
                for &idx in &stored.index[lo..hi] {
                    inner += stored_weight(idx);
                }
                acc.add(w * inner);
            }
        };
        // stream the plain side, chunked over its first entry
        par::map_chunks(n, 64, |range| {
            let mut acc = ComplexSum::new();
            for a in range {
                let (ga, wa) = (plus_gaps[a], plus_weights[a]);
                if plus == 1 {
                    lookup(ga, &mut acc, wa);
                } else {
                    for b in 0..n {
                        lookup(ga + plus_gaps[b], &mut acc, wa * plus_weights[b]);
                    }
                }
            }
            acc.value()
        })
    };
    let mut total = ComplexSum::new();
    for p in partials {
        total.add(p);
    }
    Ok(total.value())
}
