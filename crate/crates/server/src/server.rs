use std::io::{self, BufWriter};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use log::{debug, error, warn};
use percent_encoding::percent_decode_str;
use pfs_core::EntityRecord;
use pfs_remote::Client;

use crate::cache::{ArchiveCache, OpenError};
use crate::config::{ConfigError, ServerConfig};
use crate::fsaccess::{FileAccess, RealFs};
use crate::http::{read_request, write_response, Body, ReadError, Request, Response};
use crate::mime::mime_for_path;
use crate::relay::RelayGate;
use crate::route::{resolve_route, RouteDecision};

pub const NOT_FOUND_BODY: &str = "404 Error: not found";

/// Request handling state shared by all connections.
pub struct Server {
    config: ServerConfig,
    root: PathBuf,
    fs: Arc<dyn FileAccess>,
    cache: ArchiveCache,
    gate: RelayGate,
    client: Client,
}

impl Server {
    pub fn new(config: ServerConfig) -> Result<Self, ConfigError> {
        Self::with_fs(config, Arc::new(RealFs))
    }

    pub fn with_fs(config: ServerConfig, fs: Arc<dyn FileAccess>) -> Result<Self, ConfigError> {
        config.validate_paths()?;
        let root = fs
            .canonicalize(&config.docroot)
            .map_err(|_| ConfigError::BadDocroot(config.docroot.clone()))?;
        Ok(Self {
            cache: ArchiveCache::new(config.archive_cache_capacity),
            gate: RelayGate::new(config.max_relays_in_flight),
            client: Client::new(),
            root,
            fs,
            config,
        })
    }

    pub fn config(&self) -> &ServerConfig {
        &self.config
    }

    /// Canonical document root.
    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn cache(&self) -> &ArchiveCache {
        &self.cache
    }

    pub fn route(&self, decoded_path: &str) -> RouteDecision {
        resolve_route(&self.root, &self.config.index_name, &*self.fs, decoded_path)
    }

    /// Produces the full response for one request. HEAD gets the GET
    /// response; the writer drops the body.
    pub fn handle(&self, req: &Request) -> Response {
        if req.method != "GET" && req.method != "HEAD" {
            return Response::text(405, "405 Error: method not allowed")
                .with_header("Allow", "GET, HEAD");
        }
        let path = match decode_target(&req.target) {
            Ok(p) => p,
            Err(why) => return bad_request(&why),
        };
        match self.route(&path) {
            RouteDecision::PlainFile(p) | RouteDecision::WholeWrapper(p) => self.send_file(&p),
            RouteDecision::WrapperEntry(w, interior) => self.send_entry(&w, &interior),
            RouteDecision::NotFound => not_found(),
            RouteDecision::BadRequest(why) => bad_request(&why),
        }
    }

    fn send_file(&self, path: &Path) -> Response {
        let opened = self
            .fs
            .open(path)
            .and_then(|f| f.metadata().map(|m| (f, m.len())));
        match opened {
            Ok((f, len)) => {
                let name = path
                    .file_name()
                    .map(|n| n.to_string_lossy())
                    .unwrap_or_default();
                Response::new(200, mime_for_path(&name), Body::File(f, len))
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => not_found(),
            Err(e) => {
                error!("{}: {e}", path.display());
                internal_error()
            }
        }
    }

    fn send_entry(&self, wrapper: &Path, interior: &str) -> Response {
        let cached = match self.cache.open(&*self.fs, wrapper) {
            Ok(c) => c,
            Err(OpenError::Io(e)) if e.kind() == io::ErrorKind::NotFound => return not_found(),
            Err(e) => {
                error!("{}: {e}", wrapper.display());
                return internal_error();
            }
        };
        let Some((_, entity)) = cached.index.lookup(&cached.archive, interior) else {
            return not_found();
        };
        if !entity.is_embedded() {
            return self.relay(entity);
        }
        let content = self
            .fs
            .open(wrapper)
            .map_err(pfs_core::Error::from)
            .and_then(|f| cached.archive.read_content(&f, entity));
        match content {
            Ok(data) => Response::new(200, mime_for_path(&entity.long_name), Body::Bytes(data)),
            Err(e) => {
                error!("{}: {interior}: {e}", wrapper.display());
                internal_error()
            }
        }
    }

    fn relay(&self, entity: &EntityRecord) -> Response {
        if !self.config.remote_relay_enabled {
            return Response::text(502, "502 Error: remote relay is disabled on this server");
        }
        let url = entity.remote_url.as_deref().unwrap_or_default();
        let _permit = self.gate.acquire();
        match self.client.fetch(
            url,
            self.config.remote_timeout,
            self.config.max_remote_bytes,
        ) {
            Ok(r) if r.status == 200 => {
                let ct = r
                    .content_type
                    .unwrap_or_else(|| mime_for_path(&entity.long_name).to_string());
                Response::new(200, &ct, Body::Bytes(r.body))
            }
            Ok(r) => {
                warn!("{url}: upstream status {}", r.status);
                Response::text(502, format!("502 Error: upstream returned {}", r.status))
            }
            Err(e) => {
                warn!("{url}: {e}");
                Response::text(502, format!("502 Error: upstream fetch failed: {e}"))
            }
        }
    }

    /// Serves one connection: a single request, then close.
    pub fn serve_connection(&self, mut stream: TcpStream) {
        let _ = stream.set_read_timeout(Some(Duration::from_secs(10)));
        let _ = stream.set_write_timeout(Some(Duration::from_secs(30)));
        let start = Instant::now();
        let (req, resp) = match read_request(&mut stream) {
            Ok(req) => {
                let resp = self.handle(&req);
                (req, resp)
            }
            Err(ReadError::Incomplete) => return,
            Err(ReadError::Io(e)) => {
                debug!("read failed: {e}");
                return;
            }
            Err(e) => (Request::new("-", "-"), bad_request(&e.to_string())),
        };
        let status = resp.status;
        let head_only = req.method == "HEAD";
        let sent = match write_response(&mut BufWriter::new(&mut stream), resp, head_only) {
            Ok(n) => n,
            Err(e) => {
                debug!("write failed: {e}");
                0
            }
        };
        if self.config.access_log {
            println!(
                "{} {} {} {} {}",
                req.method,
                req.target,
                status,
                sent,
                start.elapsed().as_millis()
            );
        }
    }

    /// Accepts connections on `listener` in a background thread, one thread
    /// per connection.
    pub fn spawn(self: Arc<Self>, listener: TcpListener) -> io::Result<RunningServer> {
        let addr = listener.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let flag = Arc::clone(&stop);
        let server = Arc::clone(&self);
        let thread = std::thread::spawn(move || {
            for conn in listener.incoming() {
                if flag.load(Ordering::SeqCst) {
                    break;
                }
                match conn {
                    Ok(stream) => {
                        let s = Arc::clone(&server);
                        std::thread::spawn(move || s.serve_connection(stream));
                    }
                    Err(e) => warn!("accept failed: {e}"),
                }
            }
        });
        Ok(RunningServer {
            addr,
            stop,
            thread: Some(thread),
            server: self,
        })
    }

    /// Binds `config.bind:config.port` and serves until the process exits.
    pub fn run(self) -> io::Result<()> {
        let listener = TcpListener::bind((self.config.bind, self.config.port))?;
        let running = Arc::new(self).spawn(listener)?;
        println!("listening on http://{}", running.addr());
        running.wait();
        Ok(())
    }
}

/// Handle to a server started with [`Server::spawn`]. Dropping it stops the
/// accept loop; in-flight connections finish on their own.
pub struct RunningServer {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    thread: Option<JoinHandle<()>>,
    server: Arc<Server>,
}

impl RunningServer {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self, path: &str) -> String {
        format!("http://{}{}", self.addr, path)
    }

    pub fn server(&self) -> &Server {
        &self.server
    }

    fn wait(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }

    pub fn shutdown(mut self) {
        self.stop_now();
    }

    fn stop_now(&mut self) {
        if let Some(t) = self.thread.take() {
            self.stop.store(true, Ordering::SeqCst);
            let _ = TcpStream::connect(self.addr);
            let _ = t.join();
        }
    }
}

impl Drop for RunningServer {
    fn drop(&mut self) {
        self.stop_now();
    }
}

/// Extracts the path from a request target and percent-decodes it once.
/// Query strings and fragments are dropped; `+` stays as is.
pub fn decode_target(target: &str) -> Result<String, String> {
    let mut t = target;
    for scheme in ["http://", "https://"] {
        if t.len() >= scheme.len() && t[..scheme.len()].eq_ignore_ascii_case(scheme) {
            let rest = &t[scheme.len()..];
            t = rest.find('/').map_or("/", |i| &rest[i..]);
            break;
        }
    }
    let t = t.split(['?', '#']).next().unwrap_or_default();
    if !t.starts_with('/') {
        return Err(format!("unsupported request target {target:?}"));
    }
    let bytes: Vec<u8> = percent_decode_str(t).collect();
    String::from_utf8(bytes).map_err(|_| "path is not valid UTF-8".to_string())
}

fn not_found() -> Response {
    Response::text(404, NOT_FOUND_BODY)
}

fn bad_request(why: &str) -> Response {
    Response::text(400, format!("400 Error: bad request ({why})"))
}

fn internal_error() -> Response {
    Response::text(500, "500 Error: internal server error")
}
