use std::collections::BTreeMap;

use axum::extract::{FromRequest, Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use serde::{Deserialize, Serialize};
use wisard_core::imaging::load_pgm;
use wisard_core::{
    binarize, deserialize_model, render_mental_image, BinaryPattern, ClassifyOptions, OutcomeReport,
    WisardModel,
};

use crate::error::ApiError;
use crate::registry::{read_entry, read_lock, valid_id, write_lock, Entry, ModelMeta};
use crate::AppState;

/// `Json` whose rejections use the service's error body.
#[derive(FromRequest)]
#[from_request(via(Json), rejection(ApiError))]
pub struct ApiJson<T>(pub T);

impl<T: Serialize> IntoResponse for ApiJson<T> {
    fn into_response(self) -> Response {
        Json(self.0).into_response()
    }
}

type ApiResult<T> = Result<ApiJson<T>, ApiError>;

/// An image in a request: a base64 PGM, which is binarized to the model's
/// retina, or rows of raw 0/1 bits, used as-is.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct ImageInput {
    pub pgm: Option<String>,
    pub bits: Option<Vec<Vec<u8>>>,
}

impl ImageInput {
    fn to_pattern(&self, entry: &Entry) -> Result<BinaryPattern, ApiError> {
        match (&self.pgm, &self.bits) {
            (Some(pgm), None) => {
                let bytes = BASE64.decode(pgm.trim()).map_err(|e| {
                    ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "BAD_IMAGE", format!("pgm is not valid base64: {e}"))
                })?;
                Ok(binarize(&load_pgm(&bytes)?, &entry.binarize_config()))
            }
            (None, Some(rows)) => {
                let width = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|r| r.len() != width) {
                    return Err(ApiError::new(
                        StatusCode::UNPROCESSABLE_ENTITY,
                        "INVALID_PATTERN",
                        "bit rows must all have the same length",
                    ));
                }
                let pattern = BinaryPattern::new(width, rows.len(), rows.concat())?;
                if !pattern.same_dims(entry.model.width(), entry.model.height()) {
                    return Err(wisard_core::WisardError::DimensionMismatch {
                        width: entry.model.width(),
                        height: entry.model.height(),
                        actual_width: width,
                        actual_height: rows.len(),
                    }
                    .into());
                }
                Ok(pattern)
            }
            _ => Err(ApiError::bad_request("exactly one of `pgm` or `bits` is required")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelInfo {
    pub id: String,
    pub name: String,
    pub created_at: u64,
    pub width: usize,
    pub height: usize,
    pub tuple_size: usize,
    pub num_tuples: usize,
    pub seed: u64,
    pub threshold: u8,
    pub labels: Vec<String>,
    pub examples_per_label: BTreeMap<String, u64>,
}

impl ModelInfo {
    fn of(id: &str, entry: &Entry) -> Self {
        let m = &entry.model;
        Self {
            id: id.to_owned(),
            name: entry.meta.name.clone(),
            created_at: entry.meta.created_at,
            width: m.width(),
            height: m.height(),
            tuple_size: m.tuple_size(),
            num_tuples: m.num_tuples(),
            seed: m.seed(),
            threshold: entry.meta.threshold,
            labels: m.labels().map(str::to_owned).collect(),
            examples_per_label: m.examples_per_label(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ModelDetail {
    #[serde(flatten)]
    pub info: ModelInfo,
    pub mapping: Vec<Vec<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    pub name: Option<String>,
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub tuple_size: Option<usize>,
    pub seed: Option<u64>,
    pub threshold: Option<u8>,
}

pub async fn create_model(
    State(state): State<AppState>,
    ApiJson(req): ApiJson<CreateRequest>,
) -> Result<(StatusCode, ApiJson<ModelInfo>), ApiError> {
    let d = &state.defaults;
    let model = WisardModel::new(
        req.width.unwrap_or(d.width),
        req.height.unwrap_or(d.height),
        req.tuple_size.unwrap_or(d.tuple_size),
        req.seed.unwrap_or_else(rand::random),
    )?;
    let entry = Entry {
        model,
        meta: ModelMeta::new(req.name.unwrap_or_else(|| "untitled".into()), req.threshold.unwrap_or(d.threshold)),
    };
    let info_entry = entry.clone();
    let id = state.registry.insert(entry);
    Ok((StatusCode::CREATED, ApiJson(ModelInfo::of(&id, &info_entry))))
}

pub async fn list_models(State(state): State<AppState>) -> ApiJson<Vec<ModelInfo>> {
    ApiJson(
        state
            .registry
            .list()
            .iter()
            .map(|(id, e)| ModelInfo::of(id, &read_lock(e)))
            .collect(),
    )
}

pub async fn get_model(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<ModelDetail> {
    let entry = state.registry.get(&id)?;
    let entry = read_lock(&entry);
    Ok(ApiJson(ModelDetail {
        info: ModelInfo::of(&id, &entry),
        mapping: entry.model.mapping().tuples().to_vec(),
    }))
}

pub async fn delete_model(State(state): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    state.registry.remove(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Deserialize)]
pub struct TrainRequest {
    pub label: String,
    #[serde(flatten)]
    pub image: ImageInput,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TrainResponse {
    pub label: String,
    pub examples_trained: BTreeMap<String, u64>,
}

pub async fn train(
    State(state): State<AppState>,
    Path(id): Path<String>,
    ApiJson(req): ApiJson<TrainRequest>,
) -> ApiResult<TrainResponse> {
    let entry = state.registry.get(&id)?;
    let mut entry = write_lock(&entry);
    let pattern = req.image.to_pattern(&entry)?;
    entry.model.train(&pattern, &req.label)?;
    Ok(ApiJson(TrainResponse {
        label: req.label,
        examples_trained: entry.model.examples_per_label(),
    }))
}

#[derive(Debug, Deserialize)]
pub struct ClassifyRequest {
    #[serde(default)]
    pub min_score: usize,
    #[serde(flatten)]
    pub image: ImageInput,
}

pub async fn classify(
    State(state): State<AppState>,
    Path(id): Path<String>,
    ApiJson(req): ApiJson<ClassifyRequest>,
) -> ApiResult<OutcomeReport> {
    let entry = state.registry.get(&id)?;
    let entry = read_lock(&entry);
    let pattern = req.image.to_pattern(&entry)?;
    let outcome = entry.model.classify_with(
        &pattern,
        ClassifyOptions {
            min_score: req.min_score,
        },
    )?;
    Ok(ApiJson(outcome.report()))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LabelInfo {
    pub label: String,
    pub examples_trained: u64,
}

pub async fn labels(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Vec<LabelInfo>> {
    let entry = state.registry.get(&id)?;
    let entry = read_lock(&entry);
    Ok(ApiJson(
        entry
            .model
            .discriminators()
            .map(|d| LabelInfo {
                label: d.label().to_owned(),
                examples_trained: d.examples_trained(),
            })
            .collect(),
    ))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MentalImageResponse {
    pub label: String,
    pub width: usize,
    pub height: usize,
    pub counts: Vec<u64>,
    pub max_count: u64,
    /// Base64 binary PGM: darker pixels carry more counter mass.
    pub pgm: String,
}

pub async fn mental_image(
    State(state): State<AppState>,
    Path((id, label)): Path<(String, String)>,
) -> ApiResult<MentalImageResponse> {
    let entry = state.registry.get(&id)?;
    let entry = read_lock(&entry);
    let mi = entry.model.mental_image(&label)?;
    let pgm = BASE64.encode(wisard_core::imaging::write_pgm(&render_mental_image(&mi)));
    Ok(ApiJson(MentalImageResponse {
        label,
        width: mi.width,
        height: mi.height,
        counts: mi.counts,
        max_count: mi.max_count,
        pgm,
    }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NeuronDump {
    pub label: String,
    pub examples_trained: u64,
    pub tuples: Vec<Vec<usize>>,
    /// One map per neuron from binary address (one digit per tuple pixel,
    /// first pixel first) to counter. Unwritten addresses are omitted.
    pub neurons: Vec<BTreeMap<String, u64>>,
}

pub async fn neurons(
    State(state): State<AppState>,
    Path((id, label)): Path<(String, String)>,
) -> ApiResult<NeuronDump> {
    let entry = state.registry.get(&id)?;
    let entry = read_lock(&entry);
    let disc = entry
        .model
        .discriminator(&label)
        .ok_or_else(|| wisard_core::WisardError::UnknownLabel(label.clone()))?;
    let tuples = entry.model.mapping().tuples().to_vec();
    let neurons = tuples
        .iter()
        .enumerate()
        .map(|(n, tuple)| {
            disc.neuron_entries(n)
                .into_iter()
                .map(|(addr, c)| (format!("{addr:0width$b}", width = tuple.len()), c))
                .collect()
        })
        .collect();
    Ok(ApiJson(NeuronDump {
        examples_trained: disc.examples_trained(),
        label,
        tuples,
        neurons,
    }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SaveResponse {
    pub id: String,
    pub path: String,
}

pub async fn save(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<SaveResponse> {
    let path = state.registry.save(&id)?;
    Ok(ApiJson(SaveResponse {
        id,
        path: path.display().to_string(),
    }))
}

/// Either `source` (the id of a file saved in the models directory) or an
/// inline `model` document. The model is registered as `id`, which defaults
/// to `source`, or to a fresh id for inline documents.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadRequest {
    pub source: Option<String>,
    pub model: Option<serde_json::Value>,
    pub id: Option<String>,
    pub name: Option<String>,
    pub threshold: Option<u8>,
}

pub async fn load(
    State(state): State<AppState>,
    ApiJson(req): ApiJson<LoadRequest>,
) -> Result<(StatusCode, ApiJson<ModelInfo>), ApiError> {
    let (mut entry, default_id) = match (&req.source, &req.model) {
        (Some(source), None) => {
            if !valid_id(source) {
                return Err(ApiError::bad_request(format!("invalid model id {source:?}")));
            }
            (read_entry(state.registry.dir(), source)?, Some(source.clone()))
        }
        (None, Some(doc)) => {
            let bytes = serde_json::to_vec(doc).expect("JSON value serializes");
            let model = deserialize_model(&bytes)?;
            let meta = ModelMeta::new("untitled", state.defaults.threshold);
            (Entry { model, meta }, None)
        }
        _ => return Err(ApiError::bad_request("exactly one of `source` or `model` is required")),
    };
    if let Some(name) = req.name {
        entry.meta.name = name;
    }
    if let Some(t) = req.threshold {
        entry.meta.threshold = t;
    }
    let id = match req.id.or(default_id) {
        Some(id) => {
            state.registry.insert_as(&id, entry.clone())?;
            id
        }
        None => state.registry.insert(entry.clone()),
    };
    Ok((StatusCode::CREATED, ApiJson(ModelInfo::of(&id, &entry))))
}
