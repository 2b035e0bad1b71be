use std::collections::{BTreeMap, HashMap};

/// One class's RAM neurons, one sparse counter table per tuple.
///
/// Absent addresses read as 0; stored counters are always at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discriminator {
    label: String,
    neurons: Vec<HashMap<u32, u64>>,
    examples_trained: u64,
}

impl Discriminator {
    pub fn new(label: impl Into<String>, num_tuples: usize) -> Self {
        Self {
            label: label.into(),
            neurons: vec![HashMap::new(); num_tuples],
            examples_trained: 0,
        }
    }

    pub(crate) fn from_parts(
        label: String,
        neurons: Vec<HashMap<u32, u64>>,
        examples_trained: u64,
    ) -> Self {
        Self {
            label,
            neurons,
            examples_trained,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn examples_trained(&self) -> u64 {
        self.examples_trained
    }

    pub fn num_neurons(&self) -> usize {
        self.neurons.len()
    }

    /// Counter at `address` of neuron `neuron`, 0 when never written.
    pub fn counter(&self, neuron: usize, address: u32) -> u64 {
        self.neurons
            .get(neuron)
            .and_then(|n| n.get(&address))
            .copied()
            .unwrap_or(0)
    }

    /// Stored (address, counter) pairs of one neuron in ascending address order.
    pub fn neuron_entries(&self, neuron: usize) -> BTreeMap<u32, u64> {
        self.neurons
            .get(neuron)
            .map(|n| n.iter().map(|(&a, &c)| (a, c)).collect())
            .unwrap_or_default()
    }

    pub(crate) fn neurons(&self) -> &[HashMap<u32, u64>] {
        &self.neurons
    }

    /// Sum of every stored counter.
    pub fn counter_mass(&self) -> u64 {
        self.neurons.iter().flat_map(|n| n.values()).sum()
    }

    /// Largest stored counter, 0 for an untrained discriminator.
    pub fn max_counter(&self) -> u64 {
        self.neurons
            .iter()
            .flat_map(|n| n.values())
            .copied()
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn write(&mut self, addresses: &[u32]) {
        debug_assert_eq!(addresses.len(), self.neurons.len());
        for (neuron, &addr) in self.neurons.iter_mut().zip(addresses) {
            *neuron.entry(addr).or_insert(0) += 1;
        }
        self.examples_trained += 1;
    }

    /// Number of neurons whose addressed counter is at least `bleach`.
    pub(crate) fn score(&self, addresses: &[u32], bleach: u64) -> usize {
        self.neurons
            .iter()
            .zip(addresses)
            .filter(|(neuron, addr)| neuron.get(addr).is_some_and(|&c| c >= bleach))
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn write_increments_and_counts_examples() {
        let mut d = Discriminator::new("E", 3);
        d.write(&[1, 2, 3]);
        d.write(&[1, 0, 3]);
        assert_eq!(d.examples_trained(), 2);
        assert_eq!(d.counter(0, 1), 2);
        assert_eq!(d.counter(1, 2), 1);
        assert_eq!(d.counter(1, 0), 1);
        assert_eq!(d.counter(1, 7), 0);
        assert_eq!(d.counter_mass(), 6);
        assert_eq!(d.max_counter(), 2);
    }

    #[test]
    fn score_respects_bleach() {
        let mut d = Discriminator::new("E", 2);
        d.write(&[1, 1]);
        d.write(&[1, 2]);
        assert_eq!(d.score(&[1, 1], 1), 2);
        assert_eq!(d.score(&[1, 1], 2), 1);
        assert_eq!(d.score(&[1, 1], 3), 0);
        assert_eq!(d.score(&[0, 0], 1), 0);
    }
}
