//! Versioned experiment configs.
//!
//! ```json
//! { "schema": 1, "id": "cross16", "estimator": "crossing",
//!   "params": { "n": 16 }, "seed": 7, "replicas": 10000, "threads": 4,
//!   "out": "results/cross16.csv" }
//! ```
//!
//! Only `estimator` is required. Missing params take the same defaults as the
//! matching subcommand flags; the resolved record is written to the JSON bundle.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::experiments::Experiment;

pub const SCHEMA_VERSION: u64 = 1;

const KEYS: [&str; 8] = ["schema", "id", "estimator", "params", "seed", "replicas", "threads", "out"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub schema: u64,
    pub id: String,
    #[serde(flatten)]
    pub experiment: Experiment,
    pub seed: u64,
    pub replicas: usize,
    /// Worker threads; `None` takes `VORPERC_THREADS`, then the rayon default.
    pub threads: Option<usize>,
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { field: field.into(), message: message.into() }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": "config", "field": self.field, "message": self.message })
    }
}

fn take_u64(obj: &Map<String, Value>, key: &str) -> Result<Option<u64>, ConfigError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v.as_u64().map(Some).ok_or_else(|| ConfigError::new(key, "expected a non-negative integer")),
    }
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, seed: u64, replicas: Option<usize>, out: PathBuf) -> Self {
        ExperimentConfig {
            schema: SCHEMA_VERSION,
            id: experiment.name().to_string(),
            replicas: replicas.unwrap_or_else(|| experiment.default_replicas()),
            experiment,
            seed,
            threads: None,
            out,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let v: Value = serde_json::from_str(text).map_err(|e| ConfigError::new("$", e.to_string()))?;
        let obj = v.as_object().ok_or_else(|| ConfigError::new("$", "config must be a JSON object"))?;
        if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(ConfigError::new(k.as_str(), "unknown field"));
        }
        let schema = take_u64(obj, "schema")?.unwrap_or(SCHEMA_VERSION);
        if schema != SCHEMA_VERSION {
            return Err(ConfigError::new("schema", format!("unsupported schema version {schema}")));
        }
        let name = match obj.get("estimator") {
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(ConfigError::new("estimator", "expected a string")),
            None => return Err(ConfigError::new("estimator", "missing field")),
        };
        if !Experiment::NAMES.contains(&name.as_str()) {
            return Err(ConfigError::new("estimator", format!("unknown estimator `{name}`")));
        }
        let params = match obj.get("params") {
            None | Some(Value::Null) => Value::Object(Map::new()),
            Some(p @ Value::Object(_)) => p.clone(),
            Some(_) => return Err(ConfigError::new("params", "expected an object")),
        };
        let tagged = json!({ "estimator": name, "params": params });
        let experiment: Experiment = serde_path_to_error::deserialize(&tagged).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." || path.is_empty() { "params".to_string() } else { path };
            ConfigError::new(field, e.into_inner().to_string())
        })?;
        experiment.validate().map_err(|(f, m)| ConfigError::new(format!("params.{f}"), m))?;
        let seed = take_u64(obj, "seed")?.unwrap_or(0);
        let replicas = take_u64(obj, "replicas")?.map(|r| r as usize);
        if replicas == Some(0) {
            return Err(ConfigError::new("replicas", "must be positive"));
        }
        let threads = take_u64(obj, "threads")?.map(|t| t as usize);
        if threads == Some(0) {
            return Err(ConfigError::new("threads", "must be positive"));
        }
        let id = match obj.get("id") {
            None | Some(Value::Null) => name.clone(),
            Some(Value::String(s)) if !s.is_empty() => s.clone(),
            Some(_) => return Err(ConfigError::new("id", "expected a non-empty string")),
        };
        let out = match obj.get("out") {
            None | Some(Value::Null) => PathBuf::from(format!("{id}.csv")),
            Some(Value::String(s)) if !s.is_empty() => PathBuf::from(s),
            Some(_) => return Err(ConfigError::new("out", "expected a path string")),
        };
        let mut cfg = ExperimentConfig::new(experiment, seed, replicas, out);
        cfg.id = id;
        cfg.threads = threads;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new("$", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}
