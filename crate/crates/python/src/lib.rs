//! Python bindings: `import wisard`.
//!
//! Patterns are lists of rows of 0/1 ints; the retina size is fixed by the
//! model.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use wisard_core::imaging::{load_pattern, write_pgm};
use wisard_core::{
    deserialize_model, render_mental_image, serialize_model, BinarizeConfig, BinaryPattern,
    ClassifyOptions, WisardModel,
};

create_exception!(wisard, WisardError, PyException);

fn err(e: impl std::fmt::Display) -> PyErr {
    WisardError::new_err(e.to_string())
}

fn pattern(rows: Vec<Vec<u8>>) -> PyResult<BinaryPattern> {
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(err("rows must all have the same length"));
    }
    BinaryPattern::new(width, rows.len(), rows.concat()).map_err(err)
}

// Vec<u8> would become `bytes` on the Python side.
fn rows(p: &BinaryPattern) -> Vec<Vec<u32>> {
    p.bits()
        .chunks(p.width())
        .map(|r| r.iter().map(|&b| u32::from(b)).collect())
        .collect()
}

/// Result of `Model.classify`.
#[pyclass(frozen, get_all, skip_from_py_object, module = "wisard")]
#[derive(Debug, Clone)]
pub struct Outcome {
    /// The winning label, or `"unknown"`.
    decision: String,
    unknown: bool,
    final_bleach: u64,
    scores: BTreeMap<String, usize>,
    tie_broken: bool,
    /// `(bleach, scores)` for every bleach level visited.
    trace: Vec<(u64, BTreeMap<String, usize>)>,
}

#[pymethods]
impl Outcome {
    fn __repr__(&self) -> String {
        format!(
            "Outcome(decision={:?}, final_bleach={}, scores={:?}, tie_broken={})",
            self.decision, self.final_bleach, self.scores, self.tie_broken
        )
    }
}

#[pyclass(skip_from_py_object, module = "wisard")]
#[derive(Debug, Clone)]
pub struct Model {
    inner: WisardModel,
}

#[pymethods]
impl Model {
    #[new]
    #[pyo3(signature = (width, height, tuple_size, seed = 0))]
    fn new(width: usize, height: usize, tuple_size: usize, seed: u64) -> PyResult<Self> {
        WisardModel::new(width, height, tuple_size, seed)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    #[getter]
    fn tuple_size(&self) -> usize {
        self.inner.tuple_size()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    #[getter]
    fn mapping(&self) -> Vec<Vec<usize>> {
        self.inner.mapping().tuples().to_vec()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().map(str::to_owned).collect()
    }

    fn examples_per_label(&self) -> BTreeMap<String, u64> {
        self.inner.examples_per_label()
    }

    fn train(&mut self, pattern_rows: Vec<Vec<u8>>, label: &str) -> PyResult<()> {
        self.inner.train(&pattern(pattern_rows)?, label).map_err(err)
    }

    #[pyo3(signature = (pattern_rows, bleach = 1))]
    fn responses(&self, pattern_rows: Vec<Vec<u8>>, bleach: u64) -> PyResult<BTreeMap<String, usize>> {
        self.inner.responses(&pattern(pattern_rows)?, bleach).map_err(err)
    }

    #[pyo3(signature = (pattern_rows, min_score = 0))]
    fn classify(&self, pattern_rows: Vec<Vec<u8>>, min_score: usize) -> PyResult<Outcome> {
        let out = self
            .inner
            .classify_with(&pattern(pattern_rows)?, ClassifyOptions { min_score })
            .map_err(err)?;
        Ok(Outcome {
            decision: out.decision.as_str().to_owned(),
            unknown: out.decision.is_unknown(),
            final_bleach: out.final_bleach,
            scores: out.scores,
            tie_broken: out.tie_broken,
            trace: out.trace.into_iter().map(|s| (s.bleach, s.scores)).collect(),
        })
    }

    /// Per-pixel counter sums for `label`, as rows.
    fn mental_image(&self, label: &str) -> PyResult<Vec<Vec<u64>>> {
        let mi = self.inner.mental_image(label).map_err(err)?;
        Ok(mi.counts.chunks(mi.width).map(<[u64]>::to_vec).collect())
    }

    /// The mental image rendered as binary PGM bytes.
    fn mental_image_pgm(&self, label: &str) -> PyResult<Vec<u8>> {
        let mi = self.inner.mental_image(label).map_err(err)?;
        Ok(write_pgm(&render_mental_image(&mi)))
    }

    /// Neuron tables for `label`: one `{address: counter}` dict per tuple,
    /// addresses as binary strings.
    fn neurons(&self, label: &str) -> PyResult<Vec<BTreeMap<String, u64>>> {
        let disc = self
            .inner
            .discriminator(label)
            .ok_or_else(|| err(format!("unknown label {label:?}")))?;
        Ok(self
            .inner
            .mapping()
            .tuples()
            .iter()
            .enumerate()
            .map(|(i, t)| {
                disc.neuron_entries(i)
                    .into_iter()
                    .map(|(a, c)| (format!("{a:0w$b}", w = t.len()), c))
                    .collect()
            })
            .collect())
    }

    fn to_json(&self) -> String {
        String::from_utf8(serialize_model(&self.inner)).expect("model files are UTF-8")
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        deserialize_model(text.as_bytes())
            .map(|inner| Self { inner })
            .map_err(err)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        std::fs::write(path, serialize_model(&self.inner)).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let bytes = std::fs::read(path).map_err(err)?;
        deserialize_model(&bytes)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(width={}, height={}, tuple_size={}, seed={}, labels={:?})",
            self.inner.width(),
            self.inner.height(),
            self.inner.tuple_size(),
            self.inner.seed(),
            self.labels()
        )
    }
}

/// Loads a PGM file and binarizes it to `width` x `height` rows.
#[pyfunction]
#[pyo3(signature = (path, width, height, threshold = 128))]
fn load_pgm_pattern(path: &str, width: usize, height: usize, threshold: u8) -> PyResult<Vec<Vec<u32>>> {
    let cfg = BinarizeConfig::new(width, height, threshold).map_err(err)?;
    load_pattern(std::path::Path::new(path), &cfg)
        .map(|p| rows(&p))
        .map_err(err)
}

#[pymodule]
fn wisard(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_class::<Outcome>()?;
    m.add_function(wrap_pyfunction!(load_pgm_pattern, m)?)?;
    m.add("WisardError", m.py().get_type::<WisardError>())?;
    m.add("MAX_TUPLE_SIZE", wisard_core::MAX_TUPLE_SIZE)?;
    Ok(())
}
