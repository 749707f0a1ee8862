use std::net::SocketAddr;
use std::path::PathBuf;

use serde::Deserialize;
use thiserror::Error;

use super::palette::MAX_PALETTE_SIZE;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file: {0}")]
    Parse(String),
    #[error("{key}: {reason}")]
    Invalid { key: String, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServerConfig {
    pub listen: SocketAddr,
    pub store_dir: PathBuf,
    pub dataset_root: PathBuf,
    pub palette_size: usize,
    pub debounce_ms: u64,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            store_dir: PathBuf::from("store"),
            dataset_root: PathBuf::from("datasets"),
            palette_size: MAX_PALETTE_SIZE,
            debounce_ms: 500,
        }
    }
}

/// Keys accepted in a config file; every one optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    listen: Option<String>,
    store_dir: Option<PathBuf>,
    dataset_root: Option<PathBuf>,
    palette_size: Option<i64>,
    debounce_ms: Option<i64>,
}

pub const ENV_PREFIX: &str = "SLICELAB_";

impl ServerConfig {
    /// Applies `key = value` lines (TOML syntax) over the current values.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        let f: FileConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        if let Some(v) = f.listen {
            self.set("listen", &v)?;
        }
        if let Some(v) = f.store_dir {
            self.store_dir = v;
        }
        if let Some(v) = f.dataset_root {
            self.dataset_root = v;
        }
        if let Some(v) = f.palette_size {
            self.set("palette_size", &v.to_string())?;
        }
        if let Some(v) = f.debounce_ms {
            self.set("debounce_ms", &v.to_string())?;
        }
        Ok(())
    }

    /// Applies `SLICELAB_LISTEN`, `SLICELAB_STORE_DIR`, `SLICELAB_DATASET_ROOT`,
    /// `SLICELAB_PALETTE_SIZE` and `SLICELAB_DEBOUNCE_MS`.
    pub fn apply_env<I, K, V>(&mut self, vars: I) -> Result<(), ConfigError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        for (k, v) in vars {
            if let Some(key) = k.as_ref().strip_prefix(ENV_PREFIX) {
                let key = key.to_ascii_lowercase();
                if ["listen", "store_dir", "dataset_root", "palette_size", "debounce_ms"].contains(&key.as_str()) {
                    self.set(&key, v.as_ref())?;
                }
            }
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let invalid = |reason: String| ConfigError::Invalid { key: key.to_string(), reason };
        match key {
            "listen" => self.listen = value.parse().map_err(|e| invalid(format!("{e}")))?,
            "store_dir" => self.store_dir = PathBuf::from(value),
            "dataset_root" => self.dataset_root = PathBuf::from(value),
            "palette_size" => {
                let n: usize = value.parse().map_err(|e| invalid(format!("{e}")))?;
                if n == 0 || n > MAX_PALETTE_SIZE {
                    return Err(invalid(format!("must be 1..={MAX_PALETTE_SIZE}")));
                }
                self.palette_size = n;
            }
            "debounce_ms" => self.debounce_ms = value.parse().map_err(|e| invalid(format!("{e}")))?,
            _ => return Err(invalid("unknown key".into())),
        }
        Ok(())
    }
}
