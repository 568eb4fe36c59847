use std::net::{IpAddr, Ipv4Addr};
use std::path::PathBuf;
use std::time::Duration;

use thiserror::Error;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub bind: IpAddr,
    pub port: u16,
    pub docroot: PathBuf,
    pub index_name: String,
    pub remote_timeout: Duration,
    pub remote_relay_enabled: bool,
    pub max_remote_bytes: u64,
    pub archive_cache_capacity: usize,
    /// Concurrent upstream fetches allowed across all relays.
    pub max_relays_in_flight: usize,
    pub access_log: bool,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("document root {0:?} is not a directory")]
    BadDocroot(PathBuf),
    #[error("port must be in 1..=65535")]
    BadPort,
    #[error("remote timeout must be positive")]
    BadTimeout,
    #[error("index name {0:?} is not a plain file name")]
    BadIndexName(String),
    #[error("archive cache capacity must be at least 1")]
    BadCacheCapacity,
}

impl ServerConfig {
    pub fn new(docroot: impl Into<PathBuf>) -> Self {
        Self {
            bind: IpAddr::V4(Ipv4Addr::LOCALHOST),
            port: 8080,
            docroot: docroot.into(),
            index_name: "index.html".into(),
            remote_timeout: Duration::from_secs(10),
            remote_relay_enabled: true,
            max_remote_bytes: 32 << 20,
            archive_cache_capacity: 16,
            max_relays_in_flight: 8,
            access_log: true,
        }
    }

    /// Checks everything except `port`, which only matters when the server
    /// binds its own socket.
    pub fn validate_paths(&self) -> Result<(), ConfigError> {
        if !self.docroot.is_dir() {
            return Err(ConfigError::BadDocroot(self.docroot.clone()));
        }
        if self.remote_timeout.is_zero() {
            return Err(ConfigError::BadTimeout);
        }
        if self.archive_cache_capacity == 0 {
            return Err(ConfigError::BadCacheCapacity);
        }
        if pfs_core::long_name_problem(&self.index_name).is_some() {
            return Err(ConfigError::BadIndexName(self.index_name.clone()));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.port == 0 {
            return Err(ConfigError::BadPort);
        }
        self.validate_paths()
    }
}
