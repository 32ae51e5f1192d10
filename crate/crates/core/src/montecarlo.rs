//! Seeded simulation of the no-repeat uniform draw and empirical run statistics.
//!
//! # Reproducibility
//!
//! The generator is ChaCha8 (`rand_chacha`), whose output stream for a given
//! 64-bit seed is fixed by its specification and identical on every platform.
//! Replications are cut into chunks of [`CHUNK_SAMPLES`]; chunk `c` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` with stream id `c`
//! (see [`substream`]). Chunks may run on any number of threads; their
//! histograms are merged in chunk order, so output depends only on the
//! configuration.
//!
//! Bounded integers use one 64-bit draw each: `floor(x * k / 2^64)`. The bias
//! of this map is below `k / 2^64`, far outside anything a test can see, and
//! it keeps exactly one draw per symbol.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::oracle::{decompose_runs, ColorSequence};

/// Replications per independent substream.
pub const CHUNK_SAMPLES: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub m: usize,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(m: usize, n: usize, samples: u64, seed: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid(format!(
                "alphabet size m must be >= 2, got {m}"
            )));
        }
        if n < 1 {
            return Err(Error::invalid("sequence length n must be >= 1"));
        }
        if samples < 1 {
            return Err(Error::invalid("samples must be >= 1"));
        }
        Ok(Self {
            m,
            n,
            samples,
            seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalRunStats {
    pub m: usize,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    /// `counts[r-1]` = number of replications with `M_n = r`, `r = 1..=min(m, n)`.
    pub counts: Vec<u64>,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`; zero for one sample.
    pub stderr: f64,
}

impl EmpiricalRunStats {
    pub fn probability(&self, r: usize) -> f64 {
        self.counts
            .get(r.wrapping_sub(1))
            .map_or(0.0, |&c| c as f64 / self.samples as f64)
    }
}

/// Generator for chunk `chunk` of a run seeded with `seed`.
pub fn substream(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

#[inline]
fn bounded<R: RngCore + ?Sized>(rng: &mut R, k: usize) -> usize {
    ((rng.next_u64() as u128 * k as u128) >> 64) as usize
}

/// Draws `x_1..x_n`: `x_1` uniform on `1..=m`, then each value uniform on the
/// `m - 1` colors different from its predecessor (index shift: draw `u` in
/// `1..m`, keep it if `u < prev`, else use `u + 1`).
pub fn sample_sequence<R: RngCore + ?Sized>(m: usize, n: usize, rng: &mut R) -> ColorSequence {
    let mut values = Vec::with_capacity(n);
    let mut prev = bounded(rng, m) + 1;
    values.push(prev);
    for _ in 1..n {
        let u = bounded(rng, m - 1) + 1;
        prev = if u < prev { u } else { u + 1 };
        values.push(prev);
    }
    ColorSequence::new(values, Some(m)).expect("index-shift sampling never repeats")
}

fn chunk_ranges(samples: u64) -> Vec<(u64, u64)> {
    (0..samples.div_ceil(CHUNK_SAMPLES))
        .map(|c| (c, CHUNK_SAMPLES.min(samples - c * CHUNK_SAMPLES)))
        .collect()
}

pub fn estimate(config: &SimConfig) -> Result<EmpiricalRunStats> {
    let SimConfig {
        m,
        n,
        samples,
        seed,
    } = SimConfig::new(config.m, config.n, config.samples, config.seed)?;
    let rmax = m.min(n);

    let partial: Vec<Vec<u64>> = chunk_ranges(samples)
        .into_par_iter()
        .map(|(chunk, size)| {
            let mut rng = substream(seed, chunk);
            let mut counts = vec![0u64; rmax];
            for _ in 0..size {
                let seq = sample_sequence(m, n, &mut rng);
                counts[decompose_runs(&seq).max_len - 1] += 1;
            }
            counts
        })
        .collect();

    let mut counts = vec![0u64; rmax];
    for part in &partial {
        for (acc, c) in counts.iter_mut().zip(part) {
            *acc += c;
        }
    }

    let total = samples as f64;
    let mean = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| (k + 1) as f64 * c as f64)
        .sum::<f64>()
        / total;
    let stderr = if samples > 1 {
        let ss: f64 = counts
            .iter()
            .enumerate()
            .map(|(k, &c)| c as f64 * ((k + 1) as f64 - mean).powi(2))
            .sum();
        (ss / (total - 1.0)).sqrt() / total.sqrt()
    } else {
        0.0
    };

    Ok(EmpiricalRunStats {
        m,
        n,
        samples,
        seed,
        counts,
        mean,
        stderr,
    })
}

/// Pearson chi-square test of `P(X_k = i) = 1/m` at one position.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareResult {
    pub position: usize,
    pub counts: Vec<u64>,
    pub statistic: f64,
    pub p_value: f64,
}

/// Tests marginal uniformity of `X_k` for each requested 1-based position.
pub fn marginal_uniformity(
    config: &SimConfig,
    positions: &[usize],
) -> Result<Vec<ChiSquareResult>> {
    let SimConfig {
        m,
        n,
        samples,
        seed,
    } = *config;
    if let Some(&bad) = positions.iter().find(|&&k| k == 0 || k > n) {
        return Err(Error::invalid(format!("position {bad} outside 1..={n}")));
    }

    let partial: Vec<Vec<Vec<u64>>> = chunk_ranges(samples)
        .into_par_iter()
        .map(|(chunk, size)| {
            let mut rng = substream(seed, chunk);
            let mut counts = vec![vec![0u64; m]; positions.len()];
            for _ in 0..size {
                let seq = sample_sequence(m, n, &mut rng);
                for (slot, &k) in positions.iter().enumerate() {
                    counts[slot][seq.values()[k - 1] - 1] += 1;
                }
            }
            counts
        })
        .collect();

    let dist = ChiSquared::new((m - 1) as f64).map_err(|e| Error::invalid(e.to_string()))?;
    let expected = samples as f64 / m as f64;
    Ok(positions
        .iter()
        .enumerate()
        .map(|(slot, &position)| {
            let counts: Vec<u64> = (0..m)
                .map(|v| partial.iter().map(|p| p[slot][v]).sum())
                .collect();
            let statistic = counts
                .iter()
                .map(|&c| (c as f64 - expected).powi(2) / expected)
                .sum();
            ChiSquareResult {
                position,
                p_value: dist.sf(statistic),
                counts,
                statistic,
            }
        })
        .collect())
}
