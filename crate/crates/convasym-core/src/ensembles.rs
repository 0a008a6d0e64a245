//! Monte Carlo for the zero set 𝔷 = {0} ∪ {t ∈ [n] : walk(s) at 0 at time 2t}:
//! uniform bridge and Dyck-path samplers, joint zero counts across m
//! independent bridges, and batched statistics that are bit-reproducible for
//! a fixed seed regardless of how batches are scheduled. The exact finite-n
//! tail exponent (for comparing against the rate functions) lives here too.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sequences::{return_distribution_exact, SequenceSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleEnsemble {
    /// Uniform Dyck paths of length 2n.
    Dyck,
    /// m ≥ 1 independent uniform bridges; zeros must coincide to count.
    Srwb(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    pub ensemble: SampleEnsemble,
    /// Half-length n.
    pub n: usize,
    pub num_samples: u64,
    pub seed: u64,
}

/// Fixed batch granularity. Batch b draws from ChaCha8 stream b of the run's
/// seed, so any scheduling of batches reproduces the same numbers; results
/// are merged in batch order because float addition is not associative.
pub const BATCH_SAMPLES: u64 = 1024;

pub const RNG_ALGORITHM: &str = "chacha8";

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::OutOfDomain { what: "half-length n", value: 0.0 });
        }
        if self.num_samples == 0 {
            return Err(Error::OutOfDomain { what: "num_samples", value: 0.0 });
        }
        if let SampleEnsemble::Srwb(0) = self.ensemble {
            return Err(Error::OutOfDomain { what: "bridge count m", value: 0.0 });
        }
        Ok(())
    }

    /// Scale applied to |𝔷| before taking moments: the limit laws live on
    /// different magnitudes (√n bridges, ln n/π joint pairs, O(1) the rest).
    pub fn moment_scale(&self) -> f64 {
        match self.ensemble {
            SampleEnsemble::Srwb(1) => 1.0 / libm::sqrt(self.n as f64),
            SampleEnsemble::Srwb(2) => PI / libm::log(self.n as f64),
            _ => 1.0,
        }
    }

    pub fn num_batches(&self) -> u64 {
        self.num_samples.div_ceil(BATCH_SAMPLES)
    }
}

/// Uniform over the binom(2n, n) bridges: Fisher–Yates on n ups + n downs.
pub fn sample_bridge(n: usize, rng: &mut impl Rng) -> Vec<i8> {
    let mut steps = vec![1i8; n];
    steps.extend(core::iter::repeat(-1).take(n));
    steps.shuffle(rng);
    steps
}

/// Uniform over the C_n Dyck paths by the cycle lemma: shuffle n ups and n+1
/// downs, rotate to start just after the first prefix-sum minimum (the unique
/// rotation whose proper prefixes stay > −1), drop the final forced down-step.
pub fn sample_dyck(n: usize, rng: &mut impl Rng) -> Vec<i8> {
    let mut steps = vec![1i8; n];
    steps.extend(core::iter::repeat(-1).take(n + 1));
    steps.shuffle(rng);
    let start = rotation_start(&steps);
    let len = steps.len();
    (0..2 * n).map(|i| steps[(start + i) % len]).collect()
}

/// Index right after the first prefix-sum minimum.
fn rotation_start(steps: &[i8]) -> usize {
    let mut sum = 0i64;
    let mut min = i64::MAX;
    let mut pos = 0;
    for (i, st) in steps.iter().enumerate() {
        sum += *st as i64;
        if sum < min {
            min = sum;
            pos = i + 1;
        }
    }
    pos % steps.len()
}

/// |{0} ∪ {t ∈ [n] : every walk is at 0 at time 2t}|.
pub fn joint_zero_count(paths: &[Vec<i8>], n: usize) -> Result<usize> {
    for p in paths {
        if p.len() != 2 * n {
            return Err(Error::LengthMismatch { expected: 2 * n, got: p.len() });
        }
    }
    let mut heights = vec![0i64; paths.len()];
    let mut count = 1usize;
    for t in 1..=n {
        let mut all_zero = true;
        for (h, p) in heights.iter_mut().zip(paths) {
            *h += (p[2 * t - 2] + p[2 * t - 1]) as i64;
            all_zero &= *h == 0;
        }
        if all_zero && !paths.is_empty() {
            count += 1;
        }
    }
    Ok(count)
}

/// Zeros of one walk at even times, as a bitset over t ∈ [1, n]. Odd-time
/// heights have odd parity and are skipped exactly, not approximately.
fn zero_bitset(steps: &[i8], out: &mut [u64]) {
    for w in out.iter_mut() {
        *w = 0;
    }
    let n = steps.len() / 2;
    let mut h = 0i32;
    for t in 1..=n {
        h += (steps[2 * t - 2] + steps[2 * t - 1]) as i32;
        if h == 0 {
            out[(t - 1) / 64] |= 1 << ((t - 1) % 64);
        }
    }
}

/// Empirical (or, elsewhere, exact) distribution of |𝔷|.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnHistogram {
    pub n: usize,
    /// zero-set size → number of samples.
    pub counts: BTreeMap<usize, u64>,
    pub total: u64,
}

impl ReturnHistogram {
    pub fn prob(&self, size: usize) -> f64 {
        *self.counts.get(&size).unwrap_or(&0) as f64 / self.total as f64
    }

    /// Binomial standard error of `prob(size)`.
    pub fn prob_se(&self, size: usize) -> f64 {
        let p = self.prob(size);
        libm::sqrt(p * (1.0 - p) / self.total as f64)
    }
}

/// One batch's accumulators: histogram counts plus power sums of the scaled
/// zero count, Σ z^p for p = 1..8 (orders 1..4 and their variance partners).
#[derive(Debug, Clone, PartialEq)]
pub struct BatchStats {
    pub counts: BTreeMap<usize, u64>,
    pub power_sums: [f64; 8],
    pub samples: u64,
}

impl BatchStats {
    fn new() -> Self {
        Self { counts: BTreeMap::new(), power_sums: [0.0; 8], samples: 0 }
    }

    fn record(&mut self, size: usize, scale: f64) {
        *self.counts.entry(size).or_insert(0) += 1;
        let z = size as f64 * scale;
        let mut zp = 1.0;
        for slot in self.power_sums.iter_mut() {
            zp *= z;
            *slot += zp;
        }
        self.samples += 1;
    }

    pub fn merge(&mut self, other: &BatchStats) {
        for (size, c) in &other.counts {
            *self.counts.entry(*size).or_insert(0) += c;
        }
        for (a, b) in self.power_sums.iter_mut().zip(other.power_sums) {
            *a += b;
        }
        self.samples += other.samples;
    }
}

/// Draws batch `batch_index` of `cfg` (the final batch may be short). Pure
/// function of (cfg, batch_index) — this is the parallelism unit.
pub fn run_batch(cfg: &SampleConfig, batch_index: u64) -> Result<BatchStats> {
    cfg.validate()?;
    let first = batch_index * BATCH_SAMPLES;
    if first >= cfg.num_samples {
        return Err(Error::IndexOutOfRange {
            index: batch_index as usize,
            len: cfg.num_batches() as usize,
        });
    }
    let todo = BATCH_SAMPLES.min(cfg.num_samples - first);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(batch_index);
    let scale = cfg.moment_scale();
    let mut stats = BatchStats::new();
    let n = cfg.n;
    match cfg.ensemble {
        SampleEnsemble::Dyck => {
            let mut steps = vec![1i8; n];
            steps.extend(core::iter::repeat(-1).take(n + 1));
            let len = steps.len();
            for _ in 0..todo {
                // reshuffling the previous arrangement is still uniform
                steps.shuffle(&mut rng);
                let start = rotation_start(&steps);
                let mut h = 0i32;
                let mut size = 1usize;
                for t in 1..=n {
                    h += (steps[(start + 2 * t - 2) % len] + steps[(start + 2 * t - 1) % len])
                        as i32;
                    if h == 0 {
                        size += 1;
                    }
                }
                debug_assert_eq!(h, 0);
                stats.record(size, scale);
            }
        }
        SampleEnsemble::Srwb(m) => {
            let mut steps = vec![1i8; n];
            steps.extend(core::iter::repeat(-1).take(n));
            let words = n.div_ceil(64);
            let mut joint = vec![0u64; words];
            let mut walk = vec![0u64; words];
            for _ in 0..todo {
                for w in joint.iter_mut() {
                    *w = u64::MAX;
                }
                for _ in 0..m {
                    steps.shuffle(&mut rng);
                    zero_bitset(&steps, &mut walk);
                    for (j, w) in joint.iter_mut().zip(&walk) {
                        *j &= w;
                    }
                }
                let size = 1 + joint.iter().map(|w| w.count_ones() as usize).sum::<usize>();
                stats.record(size, scale);
            }
        }
    }
    Ok(stats)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMoment {
    pub order: u32,
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub histogram: ReturnHistogram,
    /// Moments of moment_scale()·|𝔷|, orders 1..=4, with standard errors.
    pub moments: Vec<ScaledMoment>,
    pub scale: f64,
    pub rng_algorithm: &'static str,
}

/// Sequential reference evaluation: all batches in index order. A parallel
/// driver that folds batch results in the same order produces byte-identical
/// summaries.
pub fn monte_carlo_stats(cfg: &SampleConfig) -> Result<MonteCarloSummary> {
    cfg.validate()?;
    let mut acc = BatchStats::new();
    for b in 0..cfg.num_batches() {
        acc.merge(&run_batch(cfg, b)?);
    }
    summarize(cfg, acc)
}

pub fn summarize(cfg: &SampleConfig, acc: BatchStats) -> Result<MonteCarloSummary> {
    if acc.samples != cfg.num_samples {
        return Err(Error::LengthMismatch {
            expected: cfg.num_samples as usize,
            got: acc.samples as usize,
        });
    }
    let nf = acc.samples as f64;
    let moments = (1..=4u32)
        .map(|order| {
            let value = acc.power_sums[order as usize - 1] / nf;
            let second = acc.power_sums[2 * order as usize - 1] / nf;
            let var = (second - value * value).max(0.0);
            ScaledMoment { order, value, std_error: libm::sqrt(var / nf) }
        })
        .collect();
    Ok(MonteCarloSummary {
        histogram: ReturnHistogram { n: cfg.n, counts: acc.counts, total: acc.samples },
        moments,
        scale: cfg.moment_scale(),
        rng_algorithm: RNG_ALGORITHM,
    })
}

/// −(1/n)·ln P(|𝔷_n| − 1 ≥ n·x), exactly (big rationals, one log at the end).
pub fn ldp_tail_exact(spec: &SequenceSpec, n: usize, x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::OutOfDomain { what: "tail threshold x", value: x });
    }
    if (n as f64) * x < 1.0 {
        return Err(Error::OutOfDomain { what: "tail index n·x", value: n as f64 * x });
    }
    let r0 = libm::ceil(n as f64 * x) as usize;
    let dist = return_distribution_exact(spec, n)?;
    let mut tail_weight = num_bigint::BigInt::zero();
    for (size, w) in dist.weights.range(r0 + 1..) {
        debug_assert!(*size >= r0 + 1);
        tail_weight += w;
    }
    if tail_weight.is_zero() {
        return Err(Error::ZeroProbability);
    }
    let ln_p = crate::sequences::ln_bigint(&tail_weight)? - crate::sequences::ln_bigint(&dist.total)?;
    Ok(-ln_p / n as f64)
}
