//! Monte Carlo tree oracle, independent of the simplex recursion.
//!
//! A Galton-Watson tree of height `m` is sampled depth-first (never
//! materialized); leaves draw i.i.d. opinions from the leaf law and each
//! internal node applies the spreading rules to its children: undecided
//! children are ignored, a strict plurality wins, a tie (or an entirely
//! undecided brood) leaves the node undecided.
//!
//! Reproducibility: sample batches use ChaCha8 sub-streams derived from
//! the seed (stream = batch index), so results are bit-identical for a
//! fixed `(seed, samples, parallel_batches)` regardless of scheduling,
//! and identical between the parallel and sequential drivers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::offspring::OffspringDistribution;
use crate::simplex::ProbabilityVector;
use crate::{Error, Result};

const MAX_HEIGHT: usize = 64;
const Z_99: f64 = 2.5758293035489004;

#[derive(Debug, Clone, Serialize)]
pub struct SimConfig {
    #[serde(serialize_with = "dist_as_spec")]
    pub dist: OffspringDistribution,
    pub height: usize,
    pub leaf_probs: ProbabilityVector,
    pub samples: u64,
    pub seed: u64,
    pub parallel_batches: usize,
}

fn dist_as_spec<S: Serializer>(d: &OffspringDistribution, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&d.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub counts: Vec<u64>,
    pub estimates: Vec<f64>,
    /// Half-width of the 99% normal-approximation confidence interval
    /// per coordinate.
    pub radii: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
    /// pmf mass folded into the largest retained child count when the
    /// support was truncated (sampling bias is bounded by it).
    pub folded_tail: f64,
}

/// Offspring sampling table: inverse CDF over the truncated support with
/// the tail folded into the largest retained `n`.
struct SamplingTable {
    cumulative: Vec<(usize, f64)>,
    folded_tail: f64,
}

impl SamplingTable {
    fn new(dist: &OffspringDistribution) -> Self {
        let (support, tail) = dist.support_truncated();
        let mut cumulative = Vec::with_capacity(support.len());
        let mut acc = 0.0;
        for &(n, q) in &support {
            acc += q;
            cumulative.push((n, acc));
        }
        if let Some(last) = cumulative.last_mut() {
            last.1 = 1.0;
        }
        SamplingTable { cumulative, folded_tail: tail }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        for &(n, c) in &self.cumulative {
            if u < c {
                return n;
            }
        }
        self.cumulative.last().unwrap().0
    }
}

fn draw_leaf<R: Rng>(leaf: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in leaf.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    leaf.len() - 1
}

fn sample_node<R: Rng>(table: &SamplingTable, m: usize, leaf: &[f64], rng: &mut R) -> usize {
    if m == 0 {
        return draw_leaf(leaf, rng);
    }
    let children = table.draw(rng);
    let k = leaf.len() - 1;
    // fixed scratch: the artifact targets k <= 6 opinions
    debug_assert!(k < 16);
    let mut tally = [0u32; 16];
    let tally = &mut tally[..k + 1];
    for _ in 0..children {
        tally[sample_node(table, m - 1, leaf, rng)] += 1;
    }
    let top = *tally[1..].iter().max().unwrap_or(&0);
    if top == 0 {
        return 0; // every child undecided
    }
    let mut winner = 0;
    let mut ties = 0;
    for (i, &c) in tally.iter().enumerate().skip(1) {
        if c == top {
            ties += 1;
            winner = i;
        }
    }
    if ties >= 2 {
        0
    } else {
        winner
    }
}

/// Opinion of the root of one sampled height-`m` tree.
pub fn sample_root<R: Rng>(
    dist: &OffspringDistribution,
    m: usize,
    leaf_probs: &ProbabilityVector,
    rng: &mut R,
) -> Result<usize> {
    if m > MAX_HEIGHT {
        return Err(Error::Domain(format!("height {m} exceeds the recursion cap {MAX_HEIGHT}")));
    }
    if leaf_probs.opinion_count() >= 16 {
        return Err(Error::Domain("more than 15 opinions are not supported".into()));
    }
    let table = SamplingTable::new(dist);
    Ok(sample_node(&table, m, leaf_probs.entries(), rng))
}

fn batch_sizes(samples: u64, batches: usize) -> Vec<u64> {
    let b = batches.max(1) as u64;
    (0..b).map(|i| samples / b + u64::from(i < samples % b)).collect()
}

fn run_batch(
    table: &SamplingTable,
    config: &SimConfig,
    batch: u64,
    size: u64,
) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(batch);
    let k = config.leaf_probs.opinion_count();
    let mut counts = vec![0u64; k + 1];
    for _ in 0..size {
        counts[sample_node(table, config.height, config.leaf_probs.entries(), &mut rng)] += 1;
    }
    counts
}

fn finalize(config: &SimConfig, counts: Vec<u64>, folded_tail: f64) -> SimResult {
    let total = config.samples as f64;
    let estimates: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let radii = estimates
        .iter()
        .map(|&p| Z_99 * (p * (1.0 - p) / total).sqrt())
        .collect();
    SimResult {
        counts,
        estimates,
        radii,
        samples: config.samples,
        seed: config.seed,
        folded_tail,
    }
}

fn validate(config: &SimConfig) -> Result<()> {
    if config.samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    if config.height > MAX_HEIGHT {
        return Err(Error::Domain(format!(
            "height {} exceeds the recursion cap {MAX_HEIGHT}",
            config.height
        )));
    }
    if config.leaf_probs.opinion_count() >= 16 {
        return Err(Error::Domain("more than 15 opinions are not supported".into()));
    }
    Ok(())
}

/// Sequential driver; always available and used as the baseline in the
/// benchmark suite.
pub fn estimate_sequential(config: &SimConfig) -> Result<SimResult> {
    validate(config)?;
    let table = SamplingTable::new(&config.dist);
    let k = config.leaf_probs.opinion_count();
    let mut counts = vec![0u64; k + 1];
    for (batch, size) in batch_sizes(config.samples, config.parallel_batches)
        .into_iter()
        .enumerate()
    {
        for (i, c) in run_batch(&table, config, batch as u64, size).into_iter().enumerate() {
            counts[i] += c;
        }
    }
    Ok(finalize(config, counts, table.folded_tail))
}

/// Batch-parallel driver (identical output to [`estimate_sequential`]).
#[cfg(feature = "parallel")]
pub fn estimate(config: &SimConfig) -> Result<SimResult> {
    use rayon::prelude::*;
    validate(config)?;
    let table = SamplingTable::new(&config.dist);
    let k = config.leaf_probs.opinion_count();
    let counts = batch_sizes(config.samples, config.parallel_batches)
        .into_par_iter()
        .enumerate()
        .map(|(batch, size)| run_batch(&table, config, batch as u64, size))
        .reduce(
            || vec![0u64; k + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(finalize(config, counts, table.folded_tail))
}

#[cfg(not(feature = "parallel"))]
pub fn estimate(config: &SimConfig) -> Result<SimResult> {
    estimate_sequential(config)
}
