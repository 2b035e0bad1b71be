use std::collections::BTreeMap;

use serde::Serialize;

use crate::discriminator::Discriminator;
use crate::error::{Result, WisardError};
use crate::mapping::{check_geometry, TupleMapping};
use crate::pattern::BinaryPattern;

pub const FORMAT_VERSION: u64 = 1;

/// A WiSARD with bleaching counters: one retina, one shared mapping, and one
/// discriminator per known label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WisardModel {
    width: usize,
    height: usize,
    mapping: TupleMapping,
    discriminators: BTreeMap<String, Discriminator>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Decision {
    Label(String),
    Unknown,
}

impl Decision {
    pub fn label(&self) -> Option<&str> {
        match self {
            Decision::Label(l) => Some(l),
            Decision::Unknown => None,
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Decision::Unknown)
    }

    /// The label, or `"unknown"`.
    pub fn as_str(&self) -> &str {
        self.label().unwrap_or("unknown")
    }
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BleachStep {
    pub bleach: u64,
    pub scores: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationOutcome {
    pub decision: Decision,
    pub final_bleach: u64,
    /// Adder value of every discriminator at `final_bleach`.
    pub scores: BTreeMap<String, usize>,
    pub tie_broken: bool,
    /// Every bleach level visited, in order.
    pub trace: Vec<BleachStep>,
}

/// JSON shape of a [`ClassificationOutcome`] used by the CLI and the service.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutcomeReport {
    pub decision: String,
    pub unknown: bool,
    pub final_bleach: u64,
    pub scores: BTreeMap<String, usize>,
    pub tie_broken: bool,
    pub trace: Vec<BleachStep>,
}

impl ClassificationOutcome {
    pub fn report(&self) -> OutcomeReport {
        OutcomeReport {
            decision: self.decision.as_str().to_owned(),
            unknown: self.decision.is_unknown(),
            final_bleach: self.final_bleach,
            scores: self.scores.clone(),
            tie_broken: self.tie_broken,
            trace: self.trace.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Answers Unknown when the best adder at bleach 1 is below this value.
    /// Zero scores are always Unknown.
    pub min_score: usize,
}

impl WisardModel {
    pub fn new(width: usize, height: usize, tuple_size: usize, seed: u64) -> Result<Self> {
        check_geometry(width * height, tuple_size)?;
        let mapping = TupleMapping::generate(width * height, tuple_size, seed)?;
        Self::with_mapping(width, height, mapping)
    }

    pub fn with_mapping(width: usize, height: usize, mapping: TupleMapping) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(WisardError::EmptyRetina);
        }
        if mapping.num_pixels() != width * height {
            return Err(WisardError::InvalidMapping(format!(
                "mapping covers {} pixels but the retina has {}",
                mapping.num_pixels(),
                width * height
            )));
        }
        Ok(Self {
            width,
            height,
            mapping,
            discriminators: BTreeMap::new(),
        })
    }

    pub(crate) fn from_parts(
        width: usize,
        height: usize,
        mapping: TupleMapping,
        discriminators: BTreeMap<String, Discriminator>,
    ) -> Self {
        Self {
            width,
            height,
            mapping,
            discriminators,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn mapping(&self) -> &TupleMapping {
        &self.mapping
    }

    pub fn tuple_size(&self) -> usize {
        self.mapping.tuple_size()
    }

    pub fn seed(&self) -> u64 {
        self.mapping.seed()
    }

    pub fn num_tuples(&self) -> usize {
        self.mapping.num_tuples()
    }

    pub fn format_version(&self) -> u64 {
        FORMAT_VERSION
    }

    /// Labels in lexicographic order.
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.discriminators.keys().map(String::as_str)
    }

    pub fn discriminator(&self, label: &str) -> Option<&Discriminator> {
        self.discriminators.get(label)
    }

    pub fn discriminators(&self) -> impl Iterator<Item = &Discriminator> {
        self.discriminators.values()
    }

    pub fn examples_per_label(&self) -> BTreeMap<String, u64> {
        self.discriminators
            .iter()
            .map(|(l, d)| (l.clone(), d.examples_trained()))
            .collect()
    }

    fn check_dims(&self, pattern: &BinaryPattern) -> Result<()> {
        if pattern.same_dims(self.width, self.height) {
            Ok(())
        } else {
            Err(WisardError::DimensionMismatch {
                width: self.width,
                height: self.height,
                actual_width: pattern.width(),
                actual_height: pattern.height(),
            })
        }
    }

    /// Registers `label` with an untrained discriminator if it is new.
    pub fn add_label(&mut self, label: &str) -> Result<()> {
        if label.is_empty() {
            return Err(WisardError::EmptyLabel);
        }
        let tuples = self.num_tuples();
        self.discriminators
            .entry(label.to_owned())
            .or_insert_with(|| Discriminator::new(label, tuples));
        Ok(())
    }

    /// Writes one example: each neuron of `label`'s discriminator increments
    /// the counter at the address formed by its tuple.
    pub fn train(&mut self, pattern: &BinaryPattern, label: &str) -> Result<()> {
        if label.is_empty() {
            return Err(WisardError::EmptyLabel);
        }
        self.check_dims(pattern)?;
        let addresses = self.mapping.addresses(pattern)?;
        let tuples = self.num_tuples();
        self.discriminators
            .entry(label.to_owned())
            .or_insert_with(|| Discriminator::new(label, tuples))
            .write(&addresses);
        Ok(())
    }

    /// Adder value of every discriminator: how many neurons hold a counter of
    /// at least `bleach` at the addressed position.
    pub fn responses(&self, pattern: &BinaryPattern, bleach: u64) -> Result<BTreeMap<String, usize>> {
        if bleach == 0 {
            return Err(WisardError::InvalidBleach);
        }
        self.check_dims(pattern)?;
        let addresses = self.mapping.addresses(pattern)?;
        Ok(self.scores_at(&addresses, bleach))
    }

    fn scores_at(&self, addresses: &[u32], bleach: u64) -> BTreeMap<String, usize> {
        self.discriminators
            .iter()
            .map(|(l, d)| (l.clone(), d.score(addresses, bleach)))
            .collect()
    }

    pub fn classify(&self, pattern: &BinaryPattern) -> Result<ClassificationOutcome> {
        self.classify_with(pattern, ClassifyOptions::default())
    }

    /// Bleaching classification.
    ///
    /// Starts at bleach 1 and raises it by one while the best adder value is
    /// shared by several labels. When raising it would zero every
    /// discriminator, the previous level is kept and the lexicographically
    /// smallest tied label wins with `tie_broken` set.
    pub fn classify_with(
        &self,
        pattern: &BinaryPattern,
        options: ClassifyOptions,
    ) -> Result<ClassificationOutcome> {
        self.check_dims(pattern)?;
        let addresses = self.mapping.addresses(pattern)?;

        let mut bleach = 1;
        let mut scores = self.scores_at(&addresses, bleach);
        let mut trace = vec![BleachStep {
            bleach,
            scores: scores.clone(),
        }];

        let top = scores.values().copied().max().unwrap_or(0);
        if top == 0 || top < options.min_score {
            return Ok(ClassificationOutcome {
                decision: Decision::Unknown,
                final_bleach: bleach,
                scores,
                tie_broken: false,
                trace,
            });
        }

        loop {
            let top = scores.values().copied().max().unwrap_or(0);
            let mut tied = scores.iter().filter(|(_, &s)| s == top).map(|(l, _)| l);
            // BTreeMap order: the first tied label is the lexicographically smallest.
            let first = tied.next().expect("top score belongs to some label").clone();
            if tied.next().is_none() {
                return Ok(ClassificationOutcome {
                    decision: Decision::Label(first),
                    final_bleach: bleach,
                    scores,
                    tie_broken: false,
                    trace,
                });
            }

            let next_scores = self.scores_at(&addresses, bleach + 1);
            trace.push(BleachStep {
                bleach: bleach + 1,
                scores: next_scores.clone(),
            });
            if next_scores.values().all(|&s| s == 0) {
                return Ok(ClassificationOutcome {
                    decision: Decision::Label(first),
                    final_bleach: bleach,
                    scores,
                    tie_broken: true,
                    trace,
                });
            }
            bleach += 1;
            scores = next_scores;
        }
    }

    /// Drops `label` and its discriminator.
    pub fn remove_label(&mut self, label: &str) -> Result<Discriminator> {
        self.discriminators
            .remove(label)
            .ok_or_else(|| WisardError::UnknownLabel(label.to_owned()))
    }
}
