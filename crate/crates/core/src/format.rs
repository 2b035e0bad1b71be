//! Versioned JSON model files.
//!
//! The mapping is written out explicitly so a file stays loadable no matter
//! how a reader generates mappings. Field order is fixed and every map is
//! sorted, which makes serialization byte-stable.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::discriminator::Discriminator;
use crate::error::{Result, WisardError};
use crate::mapping::TupleMapping;
use crate::model::{WisardModel, FORMAT_VERSION};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDocument {
    format_version: u64,
    width: usize,
    height: usize,
    tuple_size: usize,
    seed: u64,
    mapping: Vec<Vec<usize>>,
    discriminators: BTreeMap<String, DiscriminatorDocument>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscriminatorDocument {
    examples_trained: u64,
    /// address (decimal string key) -> counter, one map per tuple.
    neurons: Vec<BTreeMap<u32, u64>>,
}

pub fn serialize_model(model: &WisardModel) -> Vec<u8> {
    let doc = ModelDocument {
        format_version: FORMAT_VERSION,
        width: model.width(),
        height: model.height(),
        tuple_size: model.tuple_size(),
        seed: model.seed(),
        mapping: model.mapping().tuples().to_vec(),
        discriminators: model
            .discriminators()
            .map(|d| {
                let neurons = (0..d.num_neurons()).map(|n| d.neuron_entries(n)).collect();
                (
                    d.label().to_owned(),
                    DiscriminatorDocument {
                        examples_trained: d.examples_trained(),
                        neurons,
                    },
                )
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("model document serializes");
    out.push(b'\n');
    out
}

pub fn deserialize_model(bytes: &[u8]) -> Result<WisardModel> {
    let value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| WisardError::Malformed(e.to_string()))?;
    let version = value
        .get("format_version")
        .ok_or_else(|| WisardError::Malformed("missing format_version".into()))?
        .as_u64()
        .ok_or_else(|| WisardError::Malformed("format_version is not an integer".into()))?;
    if version != FORMAT_VERSION {
        return Err(WisardError::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let doc: ModelDocument =
        serde_json::from_value(value).map_err(|e| WisardError::Malformed(e.to_string()))?;

    let num_pixels = doc
        .width
        .checked_mul(doc.height)
        .ok_or_else(|| WisardError::InvariantViolation("retina size overflows".into()))?;
    let mapping = TupleMapping::from_tuples(num_pixels, doc.tuple_size, doc.seed, doc.mapping)
        .map_err(|e| WisardError::InvariantViolation(e.to_string()))?;
    let tuples = mapping.num_tuples();

    let mut discriminators = BTreeMap::new();
    for (label, d) in doc.discriminators {
        if label.is_empty() {
            return Err(WisardError::InvariantViolation("empty label".into()));
        }
        if d.neurons.len() != tuples {
            return Err(WisardError::InvariantViolation(format!(
                "label {label:?} has {} neurons, mapping has {tuples} tuples",
                d.neurons.len()
            )));
        }
        let mut neurons = Vec::with_capacity(tuples);
        let mut mass: u64 = 0;
        for (i, (neuron, tuple)) in d.neurons.into_iter().zip(mapping.tuples()).enumerate() {
            let limit = 1u64 << tuple.len();
            let mut table = HashMap::with_capacity(neuron.len());
            for (address, counter) in neuron {
                if u64::from(address) >= limit {
                    return Err(WisardError::InvariantViolation(format!(
                        "label {label:?} neuron {i}: address {address} needs more than {} bits",
                        tuple.len()
                    )));
                }
                if counter == 0 {
                    return Err(WisardError::InvariantViolation(format!(
                        "label {label:?} neuron {i}: zero counter stored at address {address}"
                    )));
                }
                mass = mass.checked_add(counter).ok_or_else(|| {
                    WisardError::InvariantViolation("counter mass overflows".into())
                })?;
                table.insert(address, counter);
            }
            neurons.push(table);
        }
        let expected = d.examples_trained.checked_mul(tuples as u64);
        if expected != Some(mass) {
            return Err(WisardError::InvariantViolation(format!(
                "label {label:?}: counters sum to {mass}, expected {} examples x {tuples} tuples",
                d.examples_trained
            )));
        }
        discriminators.insert(
            label.clone(),
            Discriminator::from_parts(label, neurons, d.examples_trained),
        );
    }

    Ok(WisardModel::from_parts(
        doc.width,
        doc.height,
        mapping,
        discriminators,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{letter_e, letter_t, worked_example_mapping};

    fn et_model() -> WisardModel {
        let mut m = WisardModel::with_mapping(3, 5, worked_example_mapping()).unwrap();
        m.train(&letter_e(), "E").unwrap();
        m.train(&letter_t(), "T").unwrap();
        m
    }

    #[test]
    fn document_layout() {
        let text = String::from_utf8(serialize_model(&et_model())).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["format_version"], 1);
        assert_eq!(v["mapping"][0], serde_json::json!([9, 4, 2]));
        assert_eq!(v["discriminators"]["E"]["neurons"][0], serde_json::json!({"5": 1}));
        assert_eq!(v["discriminators"]["T"]["examples_trained"], 1);
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        // serde_json's default map sorts keys; check the text order instead.
        assert_eq!(keys.len(), 7);
        let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
        assert!(pos("format_version") < pos("width"));
        assert!(pos("seed") < pos("mapping"));
        assert!(pos("mapping") < pos("discriminators"));
    }

    #[test]
    fn round_trip_and_stability() {
        let m = et_model();
        let bytes = serialize_model(&m);
        let back = deserialize_model(&bytes).unwrap();
        assert_eq!(back, m);
        assert_eq!(serialize_model(&back), bytes);
    }

    #[test]
    fn empty_model_round_trip() {
        let m = WisardModel::new(4, 4, 3, 77).unwrap();
        let back = deserialize_model(&serialize_model(&m)).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.labels().count(), 0);
    }

    fn doc_with(edit: impl FnOnce(&mut serde_json::Value)) -> Vec<u8> {
        let mut v: serde_json::Value = serde_json::from_slice(&serialize_model(&et_model())).unwrap();
        edit(&mut v);
        serde_json::to_vec(&v).unwrap()
    }

    #[test]
    fn version_mismatch() {
        let bytes = doc_with(|v| v["format_version"] = 999.into());
        assert_eq!(
            deserialize_model(&bytes).unwrap_err(),
            WisardError::VersionMismatch { found: 999, expected: 1 }
        );
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(deserialize_model(b"{not json"), Err(WisardError::Malformed(_))));
        assert!(matches!(deserialize_model(b"{}"), Err(WisardError::Malformed(_))));
        let bytes = doc_with(|v| {
            v.as_object_mut().unwrap().remove("width");
        });
        assert!(matches!(deserialize_model(&bytes), Err(WisardError::Malformed(_))));
        let bytes = doc_with(|v| v["discriminators"]["E"]["neurons"][0] = serde_json::json!({"x": 1}));
        assert!(matches!(deserialize_model(&bytes), Err(WisardError::Malformed(_))));
    }

    #[test]
    fn invariant_violations() {
        let cases: Vec<Box<dyn FnOnce(&mut serde_json::Value)>> = vec![
            // address needs 4 bits on a 3-pixel tuple
            Box::new(|v| v["discriminators"]["E"]["neurons"][0] = serde_json::json!({"8": 1})),
            Box::new(|v| v["discriminators"]["E"]["neurons"][0] = serde_json::json!({"5": 0, "4": 1})),
            Box::new(|v| v["discriminators"]["E"]["examples_trained"] = 2.into()),
            Box::new(|v| v["mapping"][0] = serde_json::json!([9, 4, 4])),
            Box::new(|v| v["width"] = 4.into()),
            Box::new(|v| {
                v["discriminators"]["E"]["neurons"].as_array_mut().unwrap().pop();
            }),
        ];
        for (i, edit) in cases.into_iter().enumerate() {
            let err = deserialize_model(&doc_with(edit)).unwrap_err();
            assert!(matches!(err, WisardError::InvariantViolation(_)), "case {i}: {err:?}");
        }
    }
}
