//! WiSARD weightless neural network engine.
//!
//! Training writes access counters into sparse RAM neurons, classification
//! sums neuron outputs per class and escalates a bleaching threshold to
//! break ties, and each class can be read back as a grayscale mental image.
//!
//! ```
//! use wisard_core::{fixtures, WisardModel};
//!
//! let mut model = WisardModel::with_mapping(3, 5, fixtures::worked_example_mapping()).unwrap();
//! model.train(&fixtures::letter_e(), "E").unwrap();
//! model.train(&fixtures::letter_t(), "T").unwrap();
//! let outcome = model.classify(&fixtures::letter_e()).unwrap();
//! assert_eq!(outcome.decision.as_str(), "E");
//! ```

mod discriminator;
mod error;
pub mod fixtures;
mod format;
pub mod imaging;
mod mapping;
mod mental;
mod model;
mod pattern;

pub use discriminator::Discriminator;
pub use error::{Result, WisardError, MAX_TUPLE_SIZE};
pub use format::{deserialize_model, serialize_model};
pub use imaging::{binarize, render_mental_image, BinarizeConfig, GrayImage, ImageError};
pub use mapping::{address_of, TupleMapping};
pub use mental::MentalImage;
pub use model::{
    BleachStep, ClassificationOutcome, ClassifyOptions, Decision, OutcomeReport, WisardModel,
    FORMAT_VERSION,
};
pub use pattern::BinaryPattern;
