//! Test-only reference implementations.
//!
//! Nothing here touches the engine: patterns are plain `Vec<u8>` bit vectors
//! and the oracle keeps the full training history, recomputing every neuron
//! lookup from scratch on each query.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub type Bits = Vec<u8>;

/// Address of `tuple` in `bits`, built by spelling the bits out as a binary
/// string and parsing it.
pub fn naive_address(bits: &[u8], tuple: &[usize]) -> u64 {
    if tuple.is_empty() {
        return 0;
    }
    let text: String = tuple
        .iter()
        .map(|&p| if bits[p] == 1 { '1' } else { '0' })
        .collect();
    u64::from_str_radix(&text, 2).unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NaiveDecision {
    Label(String),
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveOutcome {
    pub decision: NaiveDecision,
    pub final_bleach: u64,
    pub scores: BTreeMap<String, usize>,
    pub tie_broken: bool,
    pub visited: Vec<u64>,
}

/// Bleaching WiSARD that stores raw training examples instead of counters.
#[derive(Debug, Clone, Default)]
pub struct NaiveWisard {
    pub tuples: Vec<Vec<usize>>,
    pub history: BTreeMap<String, Vec<Bits>>,
}

impl NaiveWisard {
    pub fn new(tuples: Vec<Vec<usize>>) -> Self {
        Self {
            tuples,
            history: BTreeMap::new(),
        }
    }

    pub fn train(&mut self, bits: &[u8], label: &str) {
        self.history
            .entry(label.to_owned())
            .or_default()
            .push(bits.to_vec());
    }

    /// Neurons of `label` where at least `bleach` training examples produced
    /// the same address as `probe`.
    pub fn score(&self, label: &str, probe: &[u8], bleach: u64) -> usize {
        let examples = &self.history[label];
        self.tuples
            .iter()
            .filter(|t| {
                let want = naive_address(probe, t);
                let hits = examples
                    .iter()
                    .filter(|ex| naive_address(ex, t) == want)
                    .count() as u64;
                hits >= bleach
            })
            .count()
    }

    pub fn scores(&self, probe: &[u8], bleach: u64) -> BTreeMap<String, usize> {
        self.history
            .keys()
            .map(|l| (l.clone(), self.score(l, probe, bleach)))
            .collect()
    }

    /// Original 0/1 WiSARD adder: a neuron fires if any training example ever
    /// wrote its addressed position.
    pub fn binary_score(&self, label: &str, probe: &[u8]) -> usize {
        let written: HashSet<(usize, u64)> = self.history[label]
            .iter()
            .flat_map(|ex| {
                self.tuples
                    .iter()
                    .enumerate()
                    .map(move |(i, t)| (i, naive_address(ex, t)))
            })
            .collect();
        self.tuples
            .iter()
            .enumerate()
            .filter(|(i, t)| written.contains(&(*i, naive_address(probe, t))))
            .count()
    }

    /// Reference classification: Unknown when nothing fires at bleach 1;
    /// otherwise raise bleach while the top is shared, falling back to the
    /// alphabetically first tied label once every score would hit zero.
    pub fn classify(&self, probe: &[u8]) -> NaiveOutcome {
        let mut bleach = 1;
        let mut scores = self.scores(probe, bleach);
        let mut visited = vec![1];
        let top = scores.values().max().copied().unwrap_or(0);
        if top == 0 {
            return NaiveOutcome {
                decision: NaiveDecision::Unknown,
                final_bleach: 1,
                scores,
                tie_broken: false,
                visited,
            };
        }
        loop {
            let top = *scores.values().max().unwrap();
            let mut tied: Vec<&String> = scores
                .iter()
                .filter(|(_, s)| **s == top)
                .map(|(l, _)| l)
                .collect();
            tied.sort();
            if tied.len() == 1 {
                return NaiveOutcome {
                    decision: NaiveDecision::Label(tied[0].clone()),
                    final_bleach: bleach,
                    scores,
                    tie_broken: false,
                    visited,
                };
            }
            let next = self.scores(probe, bleach + 1);
            visited.push(bleach + 1);
            if next.values().all(|s| *s == 0) {
                return NaiveOutcome {
                    decision: NaiveDecision::Label(tied[0].clone()),
                    final_bleach: bleach,
                    scores,
                    tie_broken: true,
                    visited,
                };
            }
            bleach += 1;
            scores = next;
        }
    }

    /// Elementwise sum of every training bitmap of `label`.
    pub fn pixel_sums(&self, label: &str, num_pixels: usize) -> Vec<u64> {
        let mut sums = vec![0u64; num_pixels];
        for ex in &self.history[label] {
            for (s, &b) in sums.iter_mut().zip(ex) {
                *s += b as u64;
            }
        }
        sums
    }
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn random_bits<R: Rng>(rng: &mut R, len: usize) -> Bits {
    (0..len).map(|_| rng.random_range(0..=1u8)).collect()
}

/// `k` distinct pixel indices below `len`.
pub fn distinct_indices<R: Rng>(rng: &mut R, len: usize, k: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..len).collect();
    all.shuffle(rng);
    all.truncate(k);
    all
}

/// An independent random partition of `0..num_pixels` into chunks of
/// `tuple_size` (the last one shorter when it does not divide evenly).
pub fn random_partition<R: Rng>(rng: &mut R, num_pixels: usize, tuple_size: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<usize> = (0..num_pixels).collect();
    all.shuffle(rng);
    all.chunks(tuple_size).map(|c| c.to_vec()).collect()
}

pub fn flip(bits: &[u8], indices: &[usize]) -> Bits {
    let mut out = bits.to_vec();
    for &i in indices {
        out[i] ^= 1;
    }
    out
}
