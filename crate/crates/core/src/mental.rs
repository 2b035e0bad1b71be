//! DRASiW read-out: projecting a discriminator's counters back onto a retina.

use serde::Serialize;

use crate::error::{Result, WisardError};
use crate::model::WisardModel;

/// Per-pixel accumulated counters for one label, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MentalImage {
    pub width: usize,
    pub height: usize,
    pub counts: Vec<u64>,
    pub max_count: u64,
}

impl MentalImage {
    pub fn count_at(&self, x: usize, y: usize) -> Option<u64> {
        (x < self.width && y < self.height).then(|| self.counts[y * self.width + x])
    }
}

impl WisardModel {
    /// Adds every stored counter to the retina pixels whose tuple bit is 1 in
    /// the counter's address.
    pub fn mental_image(&self, label: &str) -> Result<MentalImage> {
        let disc = self
            .discriminator(label)
            .ok_or_else(|| WisardError::UnknownLabel(label.to_owned()))?;
        let mut counts = vec![0u64; self.width() * self.height()];
        for (tuple, neuron) in self.mapping().tuples().iter().zip(disc.neurons()) {
            let width = tuple.len();
            for (&address, &counter) in neuron {
                for (pos, &pixel) in tuple.iter().enumerate() {
                    if address >> (width - 1 - pos) & 1 == 1 {
                        counts[pixel] += counter;
                    }
                }
            }
        }
        let max_count = counts.iter().copied().max().unwrap_or(0);
        Ok(MentalImage {
            width: self.width(),
            height: self.height(),
            counts,
            max_count,
        })
    }
}
