//! Service configuration: a TOML file with `PLP_`-prefixed environment overrides.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ServiceError;

pub const ENV_PREFIX: &str = "PLP_";
pub const DEFAULT_LISTEN_ADDR: &str = "127.0.0.1:8080";
pub const DEFAULT_DATA_DIR: &str = "plp-data";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub data_dir: PathBuf,
    pub listen_addr: String,
    /// Ontology records (line-delimited) applied at startup.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture_path: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Self { data_dir: DEFAULT_DATA_DIR.into(), listen_addr: DEFAULT_LISTEN_ADDR.into(), fixture_path: None }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    data_dir: Option<PathBuf>,
    listen_addr: Option<String>,
    fixture_path: Option<PathBuf>,
}

impl Config {
    /// Reads `path` (if any), then applies `PLP_DATA_DIR`, `PLP_LISTEN_ADDR`
    /// and `PLP_FIXTURE_PATH` from the process environment.
    pub fn load(path: Option<&Path>) -> Result<Config, ServiceError> {
        Self::load_with(path, |k| std::env::var(k).ok())
    }

    pub fn load_with(path: Option<&Path>, env: impl Fn(&str) -> Option<String>) -> Result<Config, ServiceError> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| ServiceError::ConfigInvalid(format!("{}: {e}", p.display())))?;
                toml::from_str::<PartialConfig>(&text)
                    .map_err(|e| ServiceError::ConfigInvalid(format!("{}: {e}", p.display())))?
            }
            None => PartialConfig::default(),
        };
        let var = |name: &str| env(&format!("{ENV_PREFIX}{name}")).filter(|v| !v.is_empty());
        let defaults = Config::default();
        let config = Config {
            data_dir: var("DATA_DIR").map(PathBuf::from).or(file.data_dir).unwrap_or(defaults.data_dir),
            listen_addr: var("LISTEN_ADDR").or(file.listen_addr).unwrap_or(defaults.listen_addr),
            fixture_path: var("FIXTURE_PATH").map(PathBuf::from).or(file.fixture_path),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ServiceError> {
        if self.data_dir.as_os_str().is_empty() {
            return Err(ServiceError::ConfigInvalid("data_dir is empty".into()));
        }
        if self.data_dir.exists() && !self.data_dir.is_dir() {
            return Err(ServiceError::ConfigInvalid(format!("{} is not a directory", self.data_dir.display())));
        }
        self.socket_addr()?;
        if let Some(f) = &self.fixture_path {
            if !f.is_file() {
                return Err(ServiceError::ConfigInvalid(format!("fixture_path {} is not a file", f.display())));
            }
        }
        Ok(())
    }

    pub fn socket_addr(&self) -> Result<SocketAddr, ServiceError> {
        self.listen_addr
            .parse()
            .map_err(|e| ServiceError::ConfigInvalid(format!("listen_addr {:?}: {e}", self.listen_addr)))
    }
}
