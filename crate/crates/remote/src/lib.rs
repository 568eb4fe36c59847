//! Minimal HTTP fetch client for remote-tagged entries.
//!
//! A fetch is a plain `GET` with a hard end-to-end deadline and a cap on the
//! body size. At most three redirects are followed. Only `http` and `https`
//! URLs are accepted.

use std::io;
use std::time::Duration;

use thiserror::Error;
use ureq::Agent;
use url::Url;

pub const USER_AGENT: &str = "pfswrap/1.0";
pub const MAX_REDIRECTS: u32 = 3;

/// A completed fetch. `body.len()` never exceeds the caller's byte limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchResult {
    pub status: u16,
    pub content_type: Option<String>,
    pub body: Vec<u8>,
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("unsupported URL scheme {0:?}; only http and https are fetched")]
    BadScheme(String),
    #[error("invalid URL {url:?}: {reason}")]
    InvalidUrl { url: String, reason: String },
    #[error("timed out")]
    Timeout,
    #[error("connect failed: {0}")]
    ConnectFailure(String),
    #[error("response body exceeds {limit} bytes")]
    TooLarge { limit: u64 },
    #[error("more than {MAX_REDIRECTS} redirects")]
    RedirectLoop,
    #[error("transport error: {0}")]
    Transport(String),
}

/// Reusable fetch client. Cheap to clone; clones share a connection agent.
#[derive(Clone)]
pub struct Client {
    agent: Agent,
}

impl Default for Client {
    fn default() -> Self {
        Self::new()
    }
}

impl std::fmt::Debug for Client {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Client").finish_non_exhaustive()
    }
}

impl Client {
    pub fn new() -> Self {
        let agent = Agent::config_builder()
            .http_status_as_error(false)
            .max_redirects(MAX_REDIRECTS)
            .max_redirects_will_error(true)
            .user_agent(USER_AGENT)
            .proxy(None)
            .build()
            .into();
        Self { agent }
    }

    /// Fetches `url`, giving up after `timeout` in total and aborting once the
    /// body would exceed `max_bytes`.
    pub fn fetch(
        &self,
        url: &str,
        timeout: Duration,
        max_bytes: u64,
    ) -> Result<FetchResult, FetchError> {
        check_url(url)?;
        let mut response = self
            .agent
            .get(url)
            .header("Accept", "*/*")
            .header("Connection", "close")
            .config()
            .timeout_global(Some(timeout))
            .build()
            .call()
            .map_err(map_error)?;

        let status = response.status().as_u16();
        let content_type = response
            .headers()
            .get("content-type")
            .and_then(|v| v.to_str().ok())
            .map(str::to_string);
        let declared = response
            .headers()
            .get("content-length")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<u64>().ok());
        if declared.is_some_and(|n| n > max_bytes) {
            return Err(FetchError::TooLarge { limit: max_bytes });
        }
        let body = response
            .body_mut()
            .with_config()
            .limit(max_bytes.saturating_add(1))
            .read_to_vec()
            .map_err(|e| match e {
                ureq::Error::BodyExceedsLimit(_) => FetchError::TooLarge { limit: max_bytes },
                other => map_error(other),
            })?;
        if body.len() as u64 > max_bytes {
            return Err(FetchError::TooLarge { limit: max_bytes });
        }
        Ok(FetchResult {
            status,
            content_type,
            body,
        })
    }
}

/// One-shot fetch with a fresh client.
pub fn fetch(url: &str, timeout: Duration, max_bytes: u64) -> Result<FetchResult, FetchError> {
    Client::new().fetch(url, timeout, max_bytes)
}

fn check_url(url: &str) -> Result<(), FetchError> {
    let parsed = Url::parse(url).map_err(|e| FetchError::InvalidUrl {
        url: url.to_string(),
        reason: e.to_string(),
    })?;
    match parsed.scheme() {
        "http" | "https" => {}
        other => return Err(FetchError::BadScheme(other.to_string())),
    }
    if parsed.host_str().map_or(true, str::is_empty) {
        return Err(FetchError::InvalidUrl {
            url: url.to_string(),
            reason: "no host".into(),
        });
    }
    Ok(())
}

fn map_error(e: ureq::Error) -> FetchError {
    match e {
        ureq::Error::Timeout(_) => FetchError::Timeout,
        ureq::Error::TooManyRedirects => FetchError::RedirectLoop,
        ureq::Error::BodyExceedsLimit(n) => FetchError::TooLarge { limit: n },
        ureq::Error::HostNotFound => FetchError::ConnectFailure("host not found".into()),
        ureq::Error::ConnectionFailed => FetchError::ConnectFailure("connection failed".into()),
        ureq::Error::BadUri(reason) => FetchError::InvalidUrl {
            url: String::new(),
            reason,
        },
        ureq::Error::Io(io) => map_io(io),
        other => {
            let text = other.to_string();
            if text.contains("scheme") {
                FetchError::BadScheme(text)
            } else {
                FetchError::Transport(text)
            }
        }
    }
}

fn map_io(io: io::Error) -> FetchError {
    match io.kind() {
        io::ErrorKind::TimedOut | io::ErrorKind::WouldBlock => FetchError::Timeout,
        io::ErrorKind::ConnectionRefused
        | io::ErrorKind::AddrNotAvailable
        | io::ErrorKind::NotConnected => FetchError::ConnectFailure(io.to_string()),
        _ => FetchError::Transport(io.to_string()),
    }
}
