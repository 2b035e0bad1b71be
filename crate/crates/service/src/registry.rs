//! In-memory model registry backed by a directory of model files.
//!
//! Each saved model is `<id>.json` (the engine's model format) next to
//! `<id>.meta.json` (name, creation time, binarization threshold).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::http::StatusCode;
use serde::{Deserialize, Serialize};
use wisard_core::imaging::DEFAULT_THRESHOLD;
use wisard_core::{deserialize_model, serialize_model, BinarizeConfig, WisardModel};

use crate::error::ApiError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub name: String,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    pub threshold: u8,
}

impl ModelMeta {
    pub fn new(name: impl Into<String>, threshold: u8) -> Self {
        Self {
            name: name.into(),
            created_at: now(),
            threshold,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub model: WisardModel,
    pub meta: ModelMeta,
}

impl Entry {
    pub fn binarize_config(&self) -> BinarizeConfig {
        BinarizeConfig {
            threshold: self.meta.threshold,
            target_width: self.model.width(),
            target_height: self.model.height(),
        }
    }
}

pub type SharedEntry = Arc<RwLock<Entry>>;

#[derive(Debug)]
pub struct Registry {
    dir: PathBuf,
    models: RwLock<BTreeMap<String, SharedEntry>>,
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Ids double as file stems, so only a conservative character set is allowed.
pub fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 64
        && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

pub fn read_entry(dir: &Path, stem: &str) -> Result<Entry, ApiError> {
    let path = dir.join(format!("{stem}.json"));
    let bytes = match fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(ApiError::new(
                StatusCode::NOT_FOUND,
                "MODEL_FILE_NOT_FOUND",
                format!("no saved model {stem:?} in the models directory"),
            ))
        }
        Err(e) => return Err(ApiError::io(format!("{}: {e}", path.display()))),
    };
    let model = deserialize_model(&bytes)?;
    let meta = fs::read(dir.join(format!("{stem}.meta.json")))
        .ok()
        .and_then(|b| serde_json::from_slice(&b).ok())
        .unwrap_or_else(|| ModelMeta {
            name: stem.to_owned(),
            created_at: 0,
            threshold: DEFAULT_THRESHOLD,
        });
    Ok(Entry { model, meta })
}

pub fn read_lock(entry: &SharedEntry) -> RwLockReadGuard<'_, Entry> {
    entry.read().unwrap_or_else(|e| e.into_inner())
}

pub fn write_lock(entry: &SharedEntry) -> RwLockWriteGuard<'_, Entry> {
    entry.write().unwrap_or_else(|e| e.into_inner())
}

impl Registry {
    /// Opens `dir` (creating it if needed) and registers every readable model
    /// file in it. Returns the registry and one message per skipped file.
    pub fn open(dir: impl Into<PathBuf>) -> std::io::Result<(Self, Vec<String>)> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let mut stems: Vec<String> = fs::read_dir(&dir)?
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().into_string().ok())
            .filter(|n| !n.ends_with(".meta.json"))
            .filter_map(|n| n.strip_suffix(".json").map(str::to_owned))
            .collect();
        stems.sort();

        let mut models = BTreeMap::new();
        let mut skipped = Vec::new();
        for stem in stems {
            if !valid_id(&stem) {
                skipped.push(format!("{stem}.json: file name is not a valid model id"));
                continue;
            }
            match read_entry(&dir, &stem) {
                Ok(entry) => {
                    models.insert(stem, Arc::new(RwLock::new(entry)));
                }
                Err(e) => skipped.push(format!("{stem}.json: {}", e.message)),
            }
        }
        let registry = Self {
            dir,
            models: RwLock::new(models),
        };
        Ok((registry, skipped))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn map(&self) -> RwLockReadGuard<'_, BTreeMap<String, SharedEntry>> {
        self.models.read().unwrap_or_else(|e| e.into_inner())
    }

    fn map_mut(&self) -> RwLockWriteGuard<'_, BTreeMap<String, SharedEntry>> {
        self.models.write().unwrap_or_else(|e| e.into_inner())
    }

    pub fn get(&self, id: &str) -> Result<SharedEntry, ApiError> {
        self.map()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::model_not_found(id))
    }

    pub fn list(&self) -> Vec<(String, SharedEntry)> {
        self.map().iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }

    /// Registers `entry` under a fresh random id.
    pub fn insert(&self, entry: Entry) -> String {
        let mut map = self.map_mut();
        let id = loop {
            let candidate = format!("{:012x}", rand::random::<u64>() >> 16);
            if !map.contains_key(&candidate) {
                break candidate;
            }
        };
        map.insert(id.clone(), Arc::new(RwLock::new(entry)));
        id
    }

    /// Registers `entry` under `id`; 409 if the id is taken.
    pub fn insert_as(&self, id: &str, entry: Entry) -> Result<(), ApiError> {
        if !valid_id(id) {
            return Err(ApiError::bad_request(format!("invalid model id {id:?}")));
        }
        let mut map = self.map_mut();
        if map.contains_key(id) {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "ID_CONFLICT",
                format!("a model with id {id:?} is already registered"),
            ));
        }
        map.insert(id.to_owned(), Arc::new(RwLock::new(entry)));
        Ok(())
    }

    /// Unregisters `id` and deletes its files from the models directory.
    pub fn remove(&self, id: &str) -> Result<(), ApiError> {
        let entry = self
            .map_mut()
            .remove(id)
            .ok_or_else(|| ApiError::model_not_found(id))?;
        // Wait for in-flight readers and writers of this model.
        drop(write_lock(&entry));
        for name in [format!("{id}.json"), format!("{id}.meta.json")] {
            match fs::remove_file(self.dir.join(&name)) {
                Ok(()) => {}
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
                Err(e) => return Err(ApiError::io(format!("{name}: {e}"))),
            }
        }
        Ok(())
    }

    /// Writes `id` to the models directory and returns the model file path.
    pub fn save(&self, id: &str) -> Result<PathBuf, ApiError> {
        let entry = self.get(id)?;
        let guard = read_lock(&entry);
        let path = self.dir.join(format!("{id}.json"));
        let meta = serde_json::to_vec_pretty(&guard.meta).expect("metadata serializes");
        write_atomic(&path, &serialize_model(&guard.model))
            .and_then(|()| write_atomic(&self.dir.join(format!("{id}.meta.json")), &meta))
            .map_err(|e| ApiError::io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }

    /// Saves every registered model; returns the failures.
    pub fn save_all(&self) -> Vec<ApiError> {
        self.list()
            .into_iter()
            .filter_map(|(id, _)| self.save(&id).err())
            .collect()
    }
}
