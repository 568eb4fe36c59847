use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, SystemTime};

use chrono::NaiveDateTime;
use log::warn;
use pfs_core::{normalize_interior_path, EntityRecord, Exec};

use crate::error::{Result, ToolError};
use crate::read_wrapper;

/// Lists skipped remote entities, one `interior-path TAB url` line each.
pub const REMOTE_MANIFEST: &str = "PFS-REMOTE.txt";

#[derive(Debug, Clone)]
pub struct ExtractOptions {
    pub dest: PathBuf,
    pub fetch_remote: bool,
    pub overwrite: bool,
    pub fetch_timeout: Duration,
    pub max_fetch_bytes: u64,
    pub max_in_flight: usize,
    pub exec: Exec,
}

impl ExtractOptions {
    pub fn new(dest: impl Into<PathBuf>) -> Self {
        Self {
            dest: dest.into(),
            fetch_remote: false,
            overwrite: false,
            fetch_timeout: Duration::from_secs(30),
            max_fetch_bytes: 256 << 20,
            max_in_flight: 4,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractSummary {
    pub written: usize,
    pub fetched: usize,
    pub skipped_remote: usize,
    pub warnings: Vec<String>,
}

pub fn cmd_extract(wrapper: &Path, options: &ExtractOptions) -> Result<ExtractSummary> {
    let (bytes, archive) = read_wrapper(wrapper)?;
    let dest = &options.dest;
    fs::create_dir_all(dest).map_err(|e| ToolError::io(dest, e))?;
    let root = fs::canonicalize(dest).map_err(|e| ToolError::io(dest, e))?;

    let mut targets = Vec::with_capacity(archive.len());
    for e in &archive.entities {
        let target = target_path(&root, e)?;
        if !options.overwrite && target.symlink_metadata().is_ok() {
            return Err(ToolError::DestinationCollision(target));
        }
        targets.push(target);
    }
    let manifest = root.join(REMOTE_MANIFEST);
    let has_remote = archive.entities.iter().any(|e| !e.is_embedded());
    if has_remote && !options.overwrite && manifest.symlink_metadata().is_ok() {
        return Err(ToolError::DestinationCollision(manifest));
    }

    let embedded: Vec<usize> = (0..archive.len())
        .filter(|&i| archive.entities[i].is_embedded())
        .collect();
    options.exec.try_map(&embedded, |_, &i| -> Result<()> {
        let e = &archive.entities[i];
        let data = archive.read_content(&bytes, e)?;
        write_file(&root, &targets[i], &data, e.created)
    })?;

    let remote: Vec<usize> = (0..archive.len())
        .filter(|&i| !archive.entities[i].is_embedded())
        .collect();
    let mut summary = ExtractSummary {
        written: embedded.len(),
        ..Default::default()
    };
    let mut skipped: Vec<usize> = Vec::new();
    if options.fetch_remote {
        let outcomes = fetch_all(&archive.entities, &remote, options);
        for (i, outcome) in remote.iter().zip(outcomes) {
            let e = &archive.entities[*i];
            let result = outcome.and_then(|body| {
                if body.len() as u64 != e.length {
                    summary.warnings.push(format!(
                        "{}: fetched {} bytes, expected {}",
                        e.interior_path(),
                        body.len(),
                        e.length
                    ));
                }
                write_file(&root, &targets[*i], &body, e.created).map_err(|x| x.to_string())
            });
            match result {
                Ok(()) => {
                    summary.fetched += 1;
                    summary.written += 1;
                }
                Err(msg) => {
                    summary
                        .warnings
                        .push(format!("{}: {msg}", e.interior_path()));
                    skipped.push(*i);
                }
            }
        }
    } else {
        skipped = remote;
    }
    summary.skipped_remote = skipped.len();
    if !skipped.is_empty() {
        let mut text = String::new();
        for &i in &skipped {
            let e = &archive.entities[i];
            text.push_str(&e.interior_path());
            text.push('\t');
            text.push_str(e.remote_url.as_deref().unwrap_or(""));
            text.push('\n');
        }
        write_file(&root, &manifest, text.as_bytes(), None)?;
    }
    for w in &summary.warnings {
        warn!("{w}");
    }
    Ok(summary)
}

/// Maps an entity to its file under `root`, re-checking the path even though
/// the parser already rejected traversal.
fn target_path(root: &Path, e: &EntityRecord) -> Result<PathBuf> {
    let interior = e.interior_path();
    let clean = normalize_interior_path(&interior)
        .map_err(|_| ToolError::TraversalRejected(interior.clone()))?;
    if clean != interior || clean.is_empty() {
        return Err(ToolError::TraversalRejected(interior));
    }
    let mut path = root.to_path_buf();
    for seg in clean.split('/') {
        if cfg!(windows) && seg.contains(['\\', ':']) {
            return Err(ToolError::TraversalRejected(interior));
        }
        path.push(seg);
    }
    if !path.starts_with(root) {
        return Err(ToolError::TraversalRejected(interior));
    }
    Ok(path)
}

fn write_file(
    root: &Path,
    target: &Path,
    data: &[u8],
    created: Option<NaiveDateTime>,
) -> Result<()> {
    let parent = target.parent().unwrap_or(root);
    fs::create_dir_all(parent).map_err(|e| ToolError::io(parent, e))?;
    // A symlinked directory inside dest must not redirect the write.
    let real = fs::canonicalize(parent).map_err(|e| ToolError::io(parent, e))?;
    if !real.starts_with(root) {
        return Err(ToolError::TraversalRejected(target.display().to_string()));
    }
    match target.symlink_metadata() {
        Ok(m) if m.is_dir() => {
            return Err(ToolError::DestinationCollision(target.to_path_buf()));
        }
        Ok(_) => fs::remove_file(target).map_err(|e| ToolError::io(target, e))?,
        Err(_) => {}
    }
    let mut f = OpenOptions::new()
        .write(true)
        .create_new(true)
        .open(target)
        .map_err(|e| ToolError::io(target, e))?;
    f.write_all(data).map_err(|e| ToolError::io(target, e))?;
    if let Some(t) = created {
        set_mtime(&f, t);
    }
    Ok(())
}

fn set_mtime(f: &File, t: NaiveDateTime) {
    let secs = t.and_utc().timestamp();
    let time = if secs >= 0 {
        SystemTime::UNIX_EPOCH.checked_add(Duration::from_secs(secs as u64))
    } else {
        SystemTime::UNIX_EPOCH.checked_sub(Duration::from_secs(secs.unsigned_abs()))
    };
    if let Some(time) = time {
        let _ = f.set_modified(time);
    }
}

/// Fetches each listed remote entity with at most `max_in_flight` requests
/// outstanding. Results are in `which` order.
type FetchOutcome = Result<Vec<u8>, String>;

fn fetch_all(
    entities: &[EntityRecord],
    which: &[usize],
    options: &ExtractOptions,
) -> Vec<FetchOutcome> {
    let results: Mutex<Vec<Option<FetchOutcome>>> = Mutex::new(vec![None; which.len()]);
    let next = AtomicUsize::new(0);
    let client = pfs_remote::Client::new();
    let workers = options.max_in_flight.max(1).min(which.len());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= which.len() {
                    break;
                }
                let e = &entities[which[k]];
                let url = e.remote_url.as_deref().unwrap_or("");
                let r = match client.fetch(url, options.fetch_timeout, options.max_fetch_bytes) {
                    Ok(res) if res.status == 200 => Ok(res.body),
                    Ok(res) => Err(format!("{url}: upstream status {}", res.status)),
                    Err(err) => Err(format!("{url}: {err}")),
                };
                results.lock().unwrap()[k] = Some(r);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.unwrap_or_else(|| Err("not fetched".into())))
        .collect()
}
