#![allow(dead_code)]

use std::fs::{File, Metadata};
use std::io;
use std::net::TcpListener;
use std::path::{Component, Path, PathBuf};
use std::sync::{Arc, Mutex};

use pfs_server::{FileAccess, RealFs, RunningServer, Server, ServerConfig};
use pfs_tool::{cmd_create, BuildOptions, RemoteRule};

/// Records every path handed to the filesystem layer.
#[derive(Default)]
pub struct RecordingFs {
    pub seen: Mutex<Vec<(&'static str, PathBuf)>>,
}

impl RecordingFs {
    fn note(&self, op: &'static str, p: &Path) {
        self.seen.lock().unwrap().push((op, p.to_path_buf()));
    }

    pub fn take(&self) -> Vec<(&'static str, PathBuf)> {
        std::mem::take(&mut *self.seen.lock().unwrap())
    }

    /// Recorded paths that leave `root` lexically, plus metadata and open
    /// calls whose resolved target leaves it.
    pub fn escapes(&self, root: &Path) -> Vec<(&'static str, PathBuf)> {
        self.seen
            .lock()
            .unwrap()
            .iter()
            .filter(|(op, p)| {
                if !lexical_normalize(p).starts_with(root) {
                    return true;
                }
                if *op == "canonicalize" {
                    return false;
                }
                match std::fs::canonicalize(p) {
                    Ok(real) => !real.starts_with(root),
                    Err(_) => false,
                }
            })
            .cloned()
            .collect()
    }

    pub fn opened(&self) -> Vec<PathBuf> {
        self.seen
            .lock()
            .unwrap()
            .iter()
            .filter(|(op, _)| *op == "open")
            .map(|(_, p)| p.clone())
            .collect()
    }
}

fn lexical_normalize(p: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in p.components() {
        match c {
            Component::ParentDir => {
                out.pop();
            }
            Component::CurDir => {}
            other => out.push(other),
        }
    }
    out
}

impl FileAccess for RecordingFs {
    fn metadata(&self, path: &Path) -> io::Result<Metadata> {
        self.note("metadata", path);
        RealFs.metadata(path)
    }

    fn canonicalize(&self, path: &Path) -> io::Result<PathBuf> {
        self.note("canonicalize", path);
        RealFs.canonicalize(path)
    }

    fn open(&self, path: &Path) -> io::Result<File> {
        self.note("open", path);
        RealFs.open(path)
    }
}

pub fn start(config: ServerConfig) -> RunningServer {
    start_with(config, Arc::new(RealFs))
}

pub fn start_with(mut config: ServerConfig, fs: Arc<dyn FileAccess>) -> RunningServer {
    config.access_log = false;
    let server = Arc::new(Server::with_fs(config, fs).unwrap());
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    server.spawn(listener).unwrap()
}

/// Packs `src` into `out` with pfsutil, remote rules given as (glob, base).
pub fn pack(src: &Path, out: &Path, remote: &[(&str, &str)]) {
    let mut o = BuildOptions::new(src);
    o.remote_rules = remote
        .iter()
        .map(|(g, b)| RemoteRule::new(g, b).unwrap())
        .collect();
    cmd_create(&o, out).unwrap();
}
