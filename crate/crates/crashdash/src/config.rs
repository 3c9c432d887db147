//! Service and CLI configuration: an optional TOML file, then environment
//! overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ingest::Schema;
use crate::query::Defaults;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub listen_addr: String,
    /// Bearer token for `/admin/reload`; reload is refused when unset.
    pub admin_token: Option<String>,
    pub data_dir: PathBuf,
    pub default_cell_size: f64,
    /// Allowed browser origin for CORS; `None` disables CORS headers.
    pub cors_origin: Option<String>,
    pub page_size: usize,
    pub schema: Schema,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            listen_addr: "127.0.0.1:8080".into(),
            admin_token: None,
            data_dir: PathBuf::from("data"),
            default_cell_size: 0.01,
            cors_origin: None,
            page_size: 5000,
            schema: Schema::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("{name}: {message}")]
    Env { name: &'static str, message: String },
    #[error("{0}")]
    Invalid(String),
}

pub const ENV_VARS: [&str; 5] = ["LISTEN_ADDR", "ADMIN_TOKEN", "DATA_DIR", "DEFAULT_CELL_SIZE", "CORS_ORIGIN"];

impl Config {
    /// Reads `path` when given, then applies overrides from `env`.
    pub fn load(path: Option<&Path>, env: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let mut config = match path {
            None => Config::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Read { path: p.into(), source })?;
                toml::from_str(&text).map_err(|source| ConfigError::Parse { path: p.into(), source })?
            }
        };
        let var = |name: &str| env(name).filter(|v| !v.is_empty());
        if let Some(v) = var("LISTEN_ADDR") {
            config.listen_addr = v;
        }
        if let Some(v) = var("ADMIN_TOKEN") {
            config.admin_token = Some(v);
        }
        if let Some(v) = var("DATA_DIR") {
            config.data_dir = v.into();
        }
        if let Some(v) = var("DEFAULT_CELL_SIZE") {
            config.default_cell_size = v.parse().map_err(|_| ConfigError::Env {
                name: "DEFAULT_CELL_SIZE",
                message: format!("not a number: {v:?}"),
            })?;
        }
        if let Some(v) = var("CORS_ORIGIN") {
            config.cors_origin = Some(v);
        }
        config.validate()?;
        Ok(config)
    }

    /// [`Config::load`] against the process environment.
    pub fn from_env(path: Option<&Path>) -> Result<Self, ConfigError> {
        Self::load(path, |k| std::env::var(k).ok())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.default_cell_size.is_finite() && self.default_cell_size > 0.0) {
            return Err(ConfigError::Invalid(format!("default_cell_size must be positive, got {}", self.default_cell_size)));
        }
        if self.page_size == 0 {
            return Err(ConfigError::Invalid("page_size must be positive".into()));
        }
        Ok(())
    }

    pub fn defaults(&self) -> Defaults {
        Defaults { cell_size: self.default_cell_size, page_size: self.page_size }
    }
}
