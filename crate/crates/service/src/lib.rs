//! REST facade over `wisard-core`: create models, teach and query them
//! online, and look inside (neuron tables, mental images).
//!
//! | route | |
//! |---|---|
//! | `POST /models` | create |
//! | `GET /models` | list |
//! | `GET /models/{id}`, `DELETE /models/{id}` | detail, delete |
//! | `POST /models/{id}/train` | `{label, pgm | bits}` |
//! | `POST /models/{id}/classify` | `{pgm | bits, min_score?}` |
//! | `GET /models/{id}/labels` | labels and example counts |
//! | `GET /models/{id}/mental-image/{label}` | counts and rendered PGM |
//! | `GET /models/{id}/neurons/{label}` | sparse counter tables |
//! | `POST /models/{id}/save`, `POST /models/load` | persistence |

pub mod api;
pub mod error;
pub mod registry;

use std::future::Future;
use std::path::PathBuf;
use std::sync::Arc;

use axum::http::HeaderValue;
use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;
use tower_http::cors::{Any, CorsLayer};
use wisard_core::imaging::DEFAULT_THRESHOLD;

pub use error::ApiError;
pub use registry::Registry;

pub const DEFAULT_PORT: u16 = 8080;

/// Settings for models created without explicit geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelDefaults {
    pub width: usize,
    pub height: usize,
    pub tuple_size: usize,
    pub threshold: u8,
}

impl Default for ModelDefaults {
    fn default() -> Self {
        Self {
            width: 32,
            height: 32,
            tuple_size: 16,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub port: u16,
    pub models_dir: PathBuf,
    pub defaults: ModelDefaults,
    /// Origin allowed by CORS; any origin when unset.
    pub cors_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            port: DEFAULT_PORT,
            models_dir: PathBuf::from("models"),
            defaults: ModelDefaults::default(),
            cors_origin: None,
        }
    }
}

fn env_parse<T: std::str::FromStr>(name: &str) -> Result<Option<T>, String> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| format!("{name}={v:?} is not a valid value")),
        Err(_) => Ok(None),
    }
}

impl ServiceConfig {
    /// Reads `WISARD_PORT`, `WISARD_MODELS_DIR`, `WISARD_CORS_ORIGIN` and
    /// `WISARD_DEFAULT_{WIDTH,HEIGHT,TUPLE_SIZE,THRESHOLD}` over the defaults.
    pub fn from_env() -> Result<Self, String> {
        let mut cfg = Self::default();
        if let Some(port) = env_parse("WISARD_PORT")? {
            cfg.port = port;
        }
        if let Ok(dir) = std::env::var("WISARD_MODELS_DIR") {
            cfg.models_dir = dir.into();
        }
        cfg.cors_origin = std::env::var("WISARD_CORS_ORIGIN").ok();
        let d = &mut cfg.defaults;
        if let Some(v) = env_parse("WISARD_DEFAULT_WIDTH")? {
            d.width = v;
        }
        if let Some(v) = env_parse("WISARD_DEFAULT_HEIGHT")? {
            d.height = v;
        }
        if let Some(v) = env_parse("WISARD_DEFAULT_TUPLE_SIZE")? {
            d.tuple_size = v;
        }
        if let Some(v) = env_parse("WISARD_DEFAULT_THRESHOLD")? {
            d.threshold = v;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone)]
pub struct AppState {
    pub registry: Arc<Registry>,
    pub defaults: ModelDefaults,
}

pub fn router(state: AppState, cors_origin: Option<&str>) -> Router {
    let cors = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    let cors = match cors_origin.and_then(|o| HeaderValue::from_str(o).ok()) {
        Some(origin) => cors.allow_origin(origin),
        None => cors.allow_origin(Any),
    };
    Router::new()
        .route("/models", post(api::create_model).get(api::list_models))
        .route("/models/load", post(api::load))
        .route("/models/{id}", get(api::get_model).delete(api::delete_model))
        .route("/models/{id}/train", post(api::train))
        .route("/models/{id}/classify", post(api::classify))
        .route("/models/{id}/labels", get(api::labels))
        .route("/models/{id}/mental-image/{label}", get(api::mental_image))
        .route("/models/{id}/neurons/{label}", get(api::neurons))
        .route("/models/{id}/save", post(api::save))
        .layer(cors)
        .with_state(state)
}

/// Serves on an already-bound listener until `shutdown` resolves, then
/// saves every registered model. Returns the models that failed to save.
pub async fn serve(
    listener: TcpListener,
    registry: Arc<Registry>,
    config: &ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<Vec<ApiError>> {
    let state = AppState {
        registry: registry.clone(),
        defaults: config.defaults,
    };
    axum::serve(listener, router(state, config.cors_origin.as_deref()))
        .with_graceful_shutdown(shutdown)
        .await?;
    Ok(registry.save_all())
}
