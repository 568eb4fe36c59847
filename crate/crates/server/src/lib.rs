//! Static HTTP server that also serves files out of `.pfs` wrappers.
//!
//! A request path that crosses a `.pfs` file is split at that file: the rest
//! of the path names an entity inside the wrapper. Embedded entities are
//! decoded and served, remote ones are fetched from their origin and relayed.
//! Real files always win over a wrapper interpretation of the same path.

mod cache;
mod config;
mod fsaccess;
mod http;
mod mime;
mod relay;
mod route;
mod server;

pub use cache::{ArchiveCache, CachedArchive, OpenError};
pub use config::{ConfigError, ServerConfig};
pub use fsaccess::{FileAccess, RealFs};
pub use http::{read_request, reason, write_response, Body, ReadError, Request, Response};
pub use mime::mime_for_path;
pub use relay::{RelayGate, RelayPermit};
pub use route::{resolve_route, split_pfs_path, PfsSplit, RouteDecision};
pub use server::{decode_target, RunningServer, Server, NOT_FOUND_BODY};
