//! Seeded generation of correlated complex Gaussian pairs, their intensities,
//! Gamma pairs built as sums of `k` intensity pairs, and `D` realizations.
//!
//! Generators are ChaCha8 streams. A [`SeedSpec`] selects the key (`seed`) and
//! the 64-bit stream; batch generation further splits a stream into chunks at
//! fixed word offsets, so output depends only on `(seed, stream_id, count)`
//! and never on how many worker threads ran.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::dist::{FieldParams, GammaPairParams};
use crate::error::{Error, Result};

pub type StreamRng = ChaCha8Rng;

/// Samples per chunk in batch generation. Part of the reproducibility
/// contract: changing it changes every batch.
pub const CHUNK_SIZE: usize = 1 << 16;

/// Each chunk owns 2^40 32-bit words of its stream.
const CHUNK_WORD_SHIFT: u32 = 40;

/// Default cap on a single materialized batch.
pub const DEFAULT_MAX_COUNT: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SeedSpec {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn with_stream(self, stream_id: u64) -> Self {
        Self { stream_id, ..self }
    }

    /// Generator positioned at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        self.chunk_rng(0)
    }

    /// Generator positioned at the start of chunk `index` of this stream.
    pub fn chunk_rng(&self, index: u64) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng.set_word_pos(u128::from(index) << CHUNK_WORD_SHIFT);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexPair {
    pub z1_re: f64,
    pub z1_im: f64,
    pub z2_re: f64,
    pub z2_im: f64,
}

impl ComplexPair {
    pub fn intensities(&self) -> IntensityPair {
        IntensityPair {
            x1: self.z1_re * self.z1_re + self.z1_im * self.z1_im,
            x2: self.z2_re * self.z2_re + self.z2_im * self.z2_im,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntensityPair {
    pub x1: f64,
    pub x2: f64,
}

impl IntensityPair {
    /// `|x1 - x2| / (x1 + x2)`, or `None` when both are zero.
    pub fn ndr(&self) -> Option<f64> {
        ndr_value(self.x1, self.x2)
    }

    /// `x1 / x2`, or `None` when `x2` is zero.
    pub fn ratio(&self) -> Option<f64> {
        (self.x2 > 0.0).then(|| self.x1 / self.x2)
    }
}

pub fn ndr_value(x1: f64, x2: f64) -> Option<f64> {
    let total = x1 + x2;
    (total > 0.0).then(|| (x1 - x2).abs() / total)
}

/// `Z1` circular Gaussian with per-component deviation `sigma_z`;
/// `Z2 = rho_z Z1 + sqrt(1 - rho_z^2) W` with `W` an independent copy.
pub fn sample_complex_pair<R: Rng + ?Sized>(fp: &FieldParams, rng: &mut R) -> ComplexPair {
    let s = fp.sigma_z();
    let rho = fp.rho_z();
    let mix = (1.0 - rho * rho).sqrt();
    let z1_re = s * rng.sample::<f64, _>(StandardNormal);
    let z1_im = s * rng.sample::<f64, _>(StandardNormal);
    let w_re = s * rng.sample::<f64, _>(StandardNormal);
    let w_im = s * rng.sample::<f64, _>(StandardNormal);
    ComplexPair {
        z1_re,
        z1_im,
        z2_re: rho * z1_re + mix * w_re,
        z2_im: rho * z1_im + mix * w_im,
    }
}

pub fn sample_intensity_pair<R: Rng + ?Sized>(fp: &FieldParams, rng: &mut R) -> IntensityPair {
    sample_complex_pair(fp, rng).intensities()
}

/// Validated sampler for Gamma pairs: sums `k` independent intensity pairs
/// drawn at `sigma_z = sqrt(sigma/2)`, `rho_z = sqrt(rho)`.
#[derive(Debug, Clone, Copy)]
pub struct GammaPairSampler {
    field: FieldParams,
    k: u32,
}

impl GammaPairSampler {
    pub fn new(p: &GammaPairParams) -> Result<Self> {
        let k = p.integer_shape()?;
        if k == 0 {
            return Err(Error::domain("sampling needs k >= 1"));
        }
        Ok(Self { field: p.field(), k })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> IntensityPair {
        let mut acc = IntensityPair { x1: 0.0, x2: 0.0 };
        for _ in 0..self.k {
            let pair = sample_intensity_pair(&self.field, rng);
            acc.x1 += pair.x1;
            acc.x2 += pair.x2;
        }
        acc
    }

    /// One `D` realization; the probability-zero draw `x1 + x2 = 0` is redrawn.
    pub fn sample_ndr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            if let Some(d) = self.sample(rng).ndr() {
                return d;
            }
        }
    }
}

pub fn sample_gamma_pair<R: Rng + ?Sized>(p: &GammaPairParams, rng: &mut R) -> Result<IntensityPair> {
    Ok(GammaPairSampler::new(p)?.sample(rng))
}

pub fn sample_ndr<R: Rng + ?Sized>(p: &GammaPairParams, rng: &mut R) -> Result<f64> {
    Ok(GammaPairSampler::new(p)?.sample_ndr(rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    /// Complex field pair at `p.field()`; `k` is ignored.
    Complex,
    /// Single intensity pair at `p.field()`; `k` is ignored.
    Intensity,
    Gamma,
    Ndr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleBatch {
    Complex(Vec<ComplexPair>),
    Intensity(Vec<IntensityPair>),
    Gamma(Vec<IntensityPair>),
    Ndr(Vec<f64>),
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        match self {
            SampleBatch::Complex(v) => v.len(),
            SampleBatch::Intensity(v) | SampleBatch::Gamma(v) => v.len(),
            SampleBatch::Ndr(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BatchOptions {
    pub max_count: usize,
}

impl Default for BatchOptions {
    fn default() -> Self {
        Self {
            max_count: DEFAULT_MAX_COUNT,
        }
    }
}

/// Runs `f(rng, len)` once per chunk of `count` samples, in parallel, and
/// returns the results in chunk order. Chunk `i` always sees the same
/// generator state, whatever the thread count.
pub fn map_chunks<T, F>(count: usize, seed: SeedSpec, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng, usize) -> T + Sync,
{
    map_chunk_range(count, seed, 0..chunk_count(count), f)
}

/// Number of chunks a batch of `count` samples splits into.
pub fn chunk_count(count: usize) -> usize {
    count.div_ceil(CHUNK_SIZE)
}

/// [`map_chunks`] restricted to the chunks in `range`, for writing a large
/// batch piece by piece. Concatenating consecutive ranges gives the same
/// results as one call over all chunks.
pub fn map_chunk_range<T, F>(count: usize, seed: SeedSpec, range: std::ops::Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng, usize) -> T + Sync,
{
    let end = range.end.min(chunk_count(count));
    (range.start.min(end)..end)
        .into_par_iter()
        .map(|i| {
            let len = CHUNK_SIZE.min(count - i * CHUNK_SIZE);
            let mut rng = seed.chunk_rng(i as u64);
            f(&mut rng, len)
        })
        .collect()
}

fn collect_chunks<T, F>(count: usize, seed: SeedSpec, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync,
{
    let parts = map_chunks(count, seed, |rng, len| (0..len).map(|_| draw(rng)).collect::<Vec<_>>());
    let mut out = Vec::with_capacity(count);
    for part in parts {
        out.extend(part);
    }
    out
}

pub fn sample_batch(
    p: &GammaPairParams,
    count: usize,
    seed: SeedSpec,
    kind: SampleKind,
) -> Result<SampleBatch> {
    sample_batch_with(p, count, seed, kind, &BatchOptions::default())
}

pub fn sample_batch_with(
    p: &GammaPairParams,
    count: usize,
    seed: SeedSpec,
    kind: SampleKind,
    opts: &BatchOptions,
) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::domain("sample count must be at least 1"));
    }
    if count > opts.max_count {
        return Err(Error::TooLarge {
            requested: count,
            cap: opts.max_count,
        });
    }
    let field = p.field();
    Ok(match kind {
        SampleKind::Complex => {
            SampleBatch::Complex(collect_chunks(count, seed, |rng| sample_complex_pair(&field, rng)))
        }
        SampleKind::Intensity => SampleBatch::Intensity(collect_chunks(count, seed, |rng| {
            sample_intensity_pair(&field, rng)
        })),
        SampleKind::Gamma => {
            let sampler = GammaPairSampler::new(p)?;
            SampleBatch::Gamma(collect_chunks(count, seed, |rng| sampler.sample(rng)))
        }
        SampleKind::Ndr => {
            let sampler = GammaPairSampler::new(p)?;
            SampleBatch::Ndr(collect_chunks(count, seed, |rng| sampler.sample_ndr(rng)))
        }
    })
}
