//! Pseudo-random partition of retina pixels into ordered tuples.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WisardError, MAX_TUPLE_SIZE};
use crate::pattern::BinaryPattern;

/// Partition of `0..num_pixels` into tuples of `tuple_size` pixels.
///
/// The last tuple is shorter when `num_pixels` is not a multiple of
/// `tuple_size`; its neuron then has `2^(num_pixels % tuple_size)` addresses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleMapping {
    num_pixels: usize,
    tuple_size: usize,
    seed: u64,
    tuples: Vec<Vec<usize>>,
}

pub(crate) fn check_geometry(num_pixels: usize, tuple_size: usize) -> Result<()> {
    if !(1..=MAX_TUPLE_SIZE).contains(&tuple_size) {
        return Err(WisardError::TupleSizeOutOfRange(tuple_size));
    }
    if num_pixels == 0 {
        return Err(WisardError::EmptyRetina);
    }
    Ok(())
}

impl TupleMapping {
    /// Shuffles `0..num_pixels` with a ChaCha8 stream seeded from `seed`,
    /// then chunks the permutation into tuples.
    pub fn generate(num_pixels: usize, tuple_size: usize, seed: u64) -> Result<Self> {
        check_geometry(num_pixels, tuple_size)?;
        let mut order: Vec<usize> = (0..num_pixels).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        let tuples = order.chunks(tuple_size).map(<[usize]>::to_vec).collect();
        Ok(Self {
            num_pixels,
            tuple_size,
            seed,
            tuples,
        })
    }

    /// Builds a mapping from explicit tuples, e.g. a hand-written fixture or
    /// a mapping read back from a model file.
    pub fn from_tuples(
        num_pixels: usize,
        tuple_size: usize,
        seed: u64,
        tuples: Vec<Vec<usize>>,
    ) -> Result<Self> {
        check_geometry(num_pixels, tuple_size)?;
        let last = tuples.len().saturating_sub(1);
        for (i, tuple) in tuples.iter().enumerate() {
            let ok = if i == last {
                !tuple.is_empty() && tuple.len() <= tuple_size
            } else {
                tuple.len() == tuple_size
            };
            if !ok {
                return Err(WisardError::InvalidMapping(format!(
                    "tuple {i} has {} pixels, tuple size is {tuple_size}",
                    tuple.len()
                )));
            }
        }
        let expected_last = match num_pixels % tuple_size {
            0 => tuple_size,
            r => r,
        };
        if tuples.last().map(Vec::len) != Some(expected_last) {
            return Err(WisardError::InvalidMapping(format!(
                "last tuple must have {expected_last} pixels"
            )));
        }

        let mut seen = vec![false; num_pixels];
        for &p in tuples.iter().flatten() {
            match seen.get_mut(p) {
                None => {
                    return Err(WisardError::InvalidMapping(format!(
                        "pixel {p} is outside a {num_pixels}-pixel retina"
                    )))
                }
                Some(true) => {
                    return Err(WisardError::InvalidMapping(format!(
                        "pixel {p} appears in more than one tuple"
                    )))
                }
                Some(slot) => *slot = true,
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(WisardError::InvalidMapping(format!(
                "pixel {missing} is not covered by any tuple"
            )));
        }

        Ok(Self {
            num_pixels,
            tuple_size,
            seed,
            tuples,
        })
    }

    pub fn num_pixels(&self) -> usize {
        self.num_pixels
    }

    pub fn tuple_size(&self) -> usize {
        self.tuple_size
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn num_tuples(&self) -> usize {
        self.tuples.len()
    }

    /// Addresses of `pattern` for every tuple, in tuple order.
    pub fn addresses(&self, pattern: &BinaryPattern) -> Result<Vec<u32>> {
        self.tuples.iter().map(|t| address_of(pattern, t)).collect()
    }
}

/// Reads the bits of `pattern` selected by `tuple`, first pixel as the most
/// significant bit.
pub fn address_of(pattern: &BinaryPattern, tuple: &[usize]) -> Result<u32> {
    if tuple.len() > MAX_TUPLE_SIZE {
        return Err(WisardError::TupleSizeOutOfRange(tuple.len()));
    }
    let bits = pattern.bits();
    tuple.iter().try_fold(0u32, |addr, &p| {
        let bit = *bits.get(p).ok_or(WisardError::IndexOutOfBounds {
            index: p,
            len: bits.len(),
        })?;
        Ok((addr << 1) | bit as u32)
    })
}
