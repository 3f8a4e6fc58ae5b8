//! Uniform random-time sampling of dynamical quantities.
//!
//! Sample `i` draws its time from word position `2 i` of a ChaCha8 stream
//! seeded with the run seed, so any sample can be regenerated on its own and
//! chunked evaluation gives the same values for any worker count.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math::{self, KahanSum};
use crate::par;
use crate::{Error, Result};

const CHUNK: usize = 4096;

/// A function of time that can be sampled: `⟨A(t)⟩`, `F(t)`, a correlator…
pub trait Dynamics: Sync {
    fn value_at(&self, t: f64) -> Complex64;

    /// Whether `value_at` is real for every `t`.
    fn is_real(&self) -> bool {
        true
    }
}

impl<F: Fn(f64) -> f64 + Sync> Dynamics for F {
    fn value_at(&self, t: f64) -> Complex64 {
        Complex64::new(self(t), 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SamplingParams {
    /// Times are uniform on `[0, horizon]`.
    pub horizon: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl SamplingParams {
    pub fn new(horizon: f64, n_samples: usize, seed: u64) -> Self {
        Self { horizon, n_samples, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("horizon T = {} must be positive", self.horizon)));
        }
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
        }
        Ok(())
    }
}

/// Default horizon `10^4 · 2π / g_min`.
pub fn default_horizon(g_min: f64) -> f64 {
    1e4 * math::TAU / g_min
}

fn stream_at(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(2 * index as u128);
    rng
}

/// The uniform `[0, 1)` variate of sample `index`.
pub fn unit_variate(seed: u64, index: usize) -> f64 {
    stream_at(seed, index).random::<f64>()
}

/// Sample times in index order.
pub fn sample_times(params: &SamplingParams) -> Vec<f64> {
    par::map_chunks(params.n_samples, CHUNK, |range| {
        let mut rng = stream_at(params.seed, range.start);
        range.map(|_| params.horizon * rng.random::<f64>()).collect::<Vec<_>>()
    })
    .concat()
}

/// `f(t_i)` for every sample time, in index order.
pub fn sample_values<D: Dynamics + ?Sized>(dynamics: &D, params: &SamplingParams) -> Result<Vec<Complex64>> {
    params.validate()?;
    Ok(par::map_chunks(params.n_samples, CHUNK, |range| {
        let mut rng = stream_at(params.seed, range.start);
        range
            .map(|_| dynamics.value_at(params.horizon * rng.random::<f64>()))
            .collect::<Vec<_>>()
    })
    .concat())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Estimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`.
    pub stderr: f64,
}

/// Mean and standard error of a list of observations.
pub fn estimate(xs: &[f64]) -> Estimate {
    let n = xs.len();
    if n == 0 {
        return Estimate { mean: f64::NAN, stderr: f64::NAN };
    }
    let mut sum = KahanSum::new();
    xs.iter().for_each(|&x| sum.add(x));
    let mean = sum.value() / n as f64;
    if n == 1 {
        return Estimate { mean, stderr: 0.0 };
    }
    let mut ss = KahanSum::new();
    xs.iter().for_each(|&x| ss.add((x - mean) * (x - mean)));
    let var = ss.value() / (n - 1) as f64;
    Estimate { mean, stderr: math::sqrt(var / n as f64) }
}

/// Sample variance around the sample mean.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let e = estimate(xs);
    e.stderr * e.stderr * xs.len() as f64
}

/// `(z)^p · conj(z)^r` for the deviation `z = f - f̄`. For real `z` this is
/// `z^(p + r)`; for complex `z` and `p == r` it is `|z|^(2p)`.
pub fn mixed_power(z: Complex64, plus: usize, minus: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..plus {
        acc *= z;
    }
    for _ in 0..minus {
        acc *= z.conj();
    }
    acc
}
