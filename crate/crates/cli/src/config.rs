use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
}

/// Everything a command needs besides its own arguments.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub bits: u32,
    pub n_max: u32,
    pub nodes: usize,
    pub budget: u64,
    pub format: OutputFormat,
    pub cache_dir: Option<PathBuf>,
    pub verify_cache: bool,
    pub data_dir: Option<PathBuf>,
}

#[derive(Debug, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.bits < 64 {
            return Err(ConfigError(format!(
                "--bits must be at least 64, got {}",
                self.bits
            )));
        }
        if self.n_max < 2 {
            return Err(ConfigError(format!(
                "--nmax must be at least 2, got {}",
                self.n_max
            )));
        }
        if self.nodes < 64 || !self.nodes.is_power_of_two() {
            return Err(ConfigError(format!(
                "--nodes must be a power of two and at least 64, got {}",
                self.nodes
            )));
        }
        if self.budget == 0 {
            return Err(ConfigError("--budget must be positive".into()));
        }
        Ok(())
    }
}
