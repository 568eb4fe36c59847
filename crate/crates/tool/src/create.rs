use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use chrono::{DateTime, NaiveDateTime, Utc};
use globset::{Glob, GlobBuilder, GlobMatcher, GlobSet, GlobSetBuilder};
use log::warn;
use pfs_core::{
    remote_url_problem, write_wrapper, Archive, Encoding, EntityRecord, Exec, WrapperHeader,
};
use url::Url;
use walkdir::WalkDir;

use crate::atomic::{no_hook, write_atomically};
use crate::error::{Result, ToolError};

/// Files whose root-relative path matches `pattern` become remote entities at
/// `base` + relative path.
#[derive(Debug, Clone)]
pub struct RemoteRule {
    pattern: String,
    matcher: GlobMatcher,
    base: Url,
}

impl RemoteRule {
    pub fn new(pattern: &str, base: &str) -> Result<Self> {
        let matcher = glob(pattern)
            .map_err(|e| ToolError::BadRule(format!("{pattern:?}: {e}")))?
            .compile_matcher();
        if let Some(problem) = remote_url_problem(base) {
            return Err(ToolError::BadRule(format!("{base:?}: {problem}")));
        }
        let mut base =
            Url::parse(base).map_err(|e| ToolError::BadRule(format!("{base:?}: {e}")))?;
        base.set_query(None);
        base.set_fragment(None);
        Ok(Self {
            pattern: pattern.to_string(),
            matcher,
            base,
        })
    }

    /// Parses the command-line form `GLOB=BASEURL`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (pattern, base) = spec
            .split_once('=')
            .ok_or_else(|| ToolError::BadRule(format!("{spec:?}: expected GLOB=BASEURL")))?;
        Self::new(pattern, base)
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    pub fn matches(&self, rel: &str) -> bool {
        self.matcher.is_match(rel)
    }

    pub fn url_for(&self, rel: &str) -> String {
        let mut url = self.base.clone();
        if let Ok(mut segs) = url.path_segments_mut() {
            segs.pop_if_empty().extend(rel.split('/'));
        }
        url.into()
    }
}

fn glob(pattern: &str) -> std::result::Result<Glob, globset::Error> {
    GlobBuilder::new(pattern).literal_separator(true).build()
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub root: PathBuf,
    /// Empty means every file.
    pub include_globs: Vec<String>,
    pub default_encoding: Encoding,
    pub remote_rules: Vec<RemoteRule>,
    pub origin_tag: String,
    pub overwrite: bool,
    pub exec: Exec,
}

impl BuildOptions {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self {
            root: root.into(),
            include_globs: Vec::new(),
            default_encoding: Encoding::Raw,
            remote_rules: Vec::new(),
            origin_tag: default_origin(),
            overwrite: false,
            exec: Exec::default(),
        }
    }
}

pub fn default_origin() -> String {
    format!(
        "{} pfsutil {}",
        std::env::consts::OS,
        env!("CARGO_PKG_VERSION")
    )
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CreateSummary {
    pub entity_count: usize,
    pub embedded_count: usize,
    pub remote_count: usize,
    pub bytes_written: u64,
    pub warnings: Vec<String>,
}

struct Found {
    rel: String,
    path: PathBuf,
    len: u64,
    modified: Option<SystemTime>,
}

pub fn cmd_create(options: &BuildOptions, output: &Path) -> Result<CreateSummary> {
    let root = &options.root;
    let meta = fs::metadata(root).map_err(|e| ToolError::UnreadableFile {
        path: root.clone(),
        source: e,
    })?;
    if !meta.is_dir() {
        return Err(ToolError::UnreadableFile {
            path: root.clone(),
            source: io::Error::new(io::ErrorKind::InvalidInput, "not a directory"),
        });
    }
    if !options.overwrite && output.exists() {
        return Err(ToolError::OutputExists(output.to_path_buf()));
    }
    let include = include_set(&options.include_globs)?;
    let skip = fs::canonicalize(output).ok();
    let files = walk(root, include.as_ref(), skip.as_deref())?;

    let mut archive = Archive::new(WrapperHeader::new(Utc::now().date_naive()));
    let mut sources = Vec::with_capacity(files.len());
    let mut summary = CreateSummary::default();
    for f in files {
        let (dir, name) = match f.rel.rsplit_once('/') {
            Some((d, n)) => (d, n),
            None => ("", f.rel.as_str()),
        };
        let mut entity = match options.remote_rules.iter().find(|r| r.matches(&f.rel)) {
            Some(rule) => {
                summary.remote_count += 1;
                EntityRecord::remote(dir, name, f.len, &rule.url_for(&f.rel))
            }
            None => {
                summary.embedded_count += 1;
                EntityRecord::embedded(dir, name, f.len, options.default_encoding)
            }
        };
        entity.original_name = Some(f.path.to_string_lossy().into_owned());
        entity.short_name = Some(name.to_string());
        entity.created = f.modified.map(timestamp);
        entity.origin = Some(options.origin_tag.clone()).filter(|s| !s.is_empty());
        archive.entities.push(entity);
        sources.push(f.path);
    }
    summary.entity_count = archive.len();
    if archive.is_empty() {
        let msg = format!(
            "{}: no files found; writing header-only wrapper",
            root.display()
        );
        warn!("{msg}");
        summary.warnings.push(msg);
    }

    let read = |i: usize, e: &EntityRecord| -> io::Result<Vec<u8>> {
        let mut data = Vec::with_capacity(e.length as usize);
        fs::File::open(&sources[i])?.read_to_end(&mut data)?;
        Ok(data)
    };
    let written = write_atomically(output, options.overwrite, &no_hook, |out| {
        write_wrapper(&archive, &read, out, options.exec).map_err(|e| match e {
            pfs_core::Error::Payload { ordinal, source } => ToolError::UnreadableFile {
                path: sources[ordinal].clone(),
                source,
            },
            other => other.into(),
        })
    })?;
    summary.bytes_written = written.source_size;
    Ok(summary)
}

fn include_set(globs: &[String]) -> Result<Option<GlobSet>> {
    if globs.is_empty() {
        return Ok(None);
    }
    let mut b = GlobSetBuilder::new();
    for g in globs {
        b.add(glob(g).map_err(|e| ToolError::BadPattern(format!("{g:?}: {e}")))?);
    }
    b.build()
        .map(Some)
        .map_err(|e| ToolError::BadPattern(e.to_string()))
}

fn walk(root: &Path, include: Option<&GlobSet>, skip: Option<&Path>) -> Result<Vec<Found>> {
    let mut out = Vec::new();
    let walker = WalkDir::new(root)
        .follow_links(true)
        .sort_by_file_name()
        .min_depth(1);
    for entry in walker {
        let entry = entry.map_err(|e| {
            if let Some(ancestor) = e.loop_ancestor() {
                return ToolError::LinkLoop(ancestor.to_path_buf());
            }
            let path = e.path().unwrap_or(root).to_path_buf();
            let source = e
                .into_io_error()
                .unwrap_or_else(|| io::Error::other("directory walk failed"));
            ToolError::UnreadableFile { path, source }
        })?;
        if entry.file_type().is_dir() {
            continue;
        }
        let path = entry.path();
        if skip.is_some() && fs::canonicalize(path).ok().as_deref() == skip {
            continue;
        }
        let rel = relative(root, path)?;
        if include.is_some_and(|set| !set.is_match(&rel)) {
            continue;
        }
        let meta = entry.metadata().map_err(|e| ToolError::UnreadableFile {
            path: path.to_path_buf(),
            source: e
                .into_io_error()
                .unwrap_or_else(|| io::Error::other("metadata")),
        })?;
        out.push(Found {
            rel,
            path: path.to_path_buf(),
            len: meta.len(),
            modified: meta.modified().ok(),
        });
    }
    Ok(out)
}

fn relative(root: &Path, path: &Path) -> Result<String> {
    let rel = path.strip_prefix(root).unwrap_or(path);
    let mut parts = Vec::new();
    for c in rel.components() {
        let s = c
            .as_os_str()
            .to_str()
            .ok_or_else(|| ToolError::BadFileName(format!("{} is not UTF-8", path.display())))?;
        parts.push(s);
    }
    let rel = parts.join("/");
    let (dir, name) = rel.rsplit_once('/').unwrap_or(("", rel.as_str()));
    if let Some(p) = pfs_core::long_name_problem(name).or_else(|| pfs_core::dir_name_problem(dir)) {
        return Err(ToolError::BadFileName(format!("{rel:?}: {p}")));
    }
    Ok(rel)
}

pub(crate) fn timestamp(t: SystemTime) -> NaiveDateTime {
    let dt: DateTime<Utc> = t.into();
    let secs = dt.timestamp();
    DateTime::from_timestamp(secs, 0).unwrap_or(dt).naive_utc()
}
