use std::path::{Path, PathBuf};

use pfs_core::{normalize_interior_path, PathError};

use crate::fsaccess::FileAccess;

/// A request path cut at its first `.pfs` segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PfsSplit {
    /// Docroot-relative path of the wrapper, empty segments dropped.
    pub prefix: String,
    pub wrapper: String,
    /// Everything after the wrapper segment, leading `/` included.
    pub interior: String,
}

/// Finds the first segment ending in `.pfs` (case-sensitive). `None` when
/// there is none.
pub fn split_pfs_path(decoded: &str) -> Result<Option<PfsSplit>, PathError> {
    if decoded.contains('\0') {
        return Err(PathError::IllegalByte);
    }
    let mut offset = 0;
    let mut before: Vec<&str> = Vec::new();
    for seg in decoded.split('/') {
        let end = offset + seg.len();
        if seg.ends_with(".pfs") {
            before.push(seg);
            return Ok(Some(PfsSplit {
                prefix: before.join("/"),
                wrapper: seg.to_string(),
                interior: decoded[end..].to_string(),
            }));
        }
        if !seg.is_empty() {
            before.push(seg);
        }
        offset = end + 1;
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RouteDecision {
    PlainFile(PathBuf),
    WholeWrapper(PathBuf),
    WrapperEntry(PathBuf, String),
    NotFound,
    BadRequest(String),
}

/// Maps a percent-decoded request path to what should be served. `root`
/// must already be canonical.
pub fn resolve_route(
    root: &Path,
    index_name: &str,
    fs: &dyn FileAccess,
    decoded: &str,
) -> RouteDecision {
    if !decoded.starts_with('/') {
        return RouteDecision::BadRequest("path must start with /".into());
    }
    let clean = match normalize_interior_path(decoded) {
        Ok(p) => p,
        Err(e) => return RouteDecision::BadRequest(e.to_string()),
    };
    if cfg!(windows) && clean.contains('\\') {
        return RouteDecision::BadRequest("backslash in path".into());
    }
    // A trailing slash names a directory, never a regular file.
    if !clean.is_empty() && !decoded.ends_with('/') {
        let full = under(root, &clean);
        if regular_file_within(root, fs, &full) {
            return RouteDecision::PlainFile(full);
        }
    }
    let split = match split_pfs_path(decoded) {
        Ok(Some(s)) => s,
        Ok(None) => return RouteDecision::NotFound,
        Err(e) => return RouteDecision::BadRequest(e.to_string()),
    };
    let wrapper = under(root, &split.prefix);
    if !regular_file_within(root, fs, &wrapper) {
        return RouteDecision::NotFound;
    }
    if split.interior.is_empty() {
        return RouteDecision::WholeWrapper(wrapper);
    }
    let mut interior = match normalize_interior_path(&split.interior) {
        Ok(p) => p,
        Err(e) => return RouteDecision::BadRequest(e.to_string()),
    };
    if split.interior.ends_with('/') {
        if !interior.is_empty() {
            interior.push('/');
        }
        interior.push_str(index_name);
    }
    RouteDecision::WrapperEntry(wrapper, interior)
}

fn under(root: &Path, clean: &str) -> PathBuf {
    let mut p = root.to_path_buf();
    p.extend(clean.split('/'));
    p
}

/// Symlinks may point anywhere, so the path is resolved and checked against
/// root before anything is read from it.
fn regular_file_within(root: &Path, fs: &dyn FileAccess, path: &Path) -> bool {
    match fs.canonicalize(path) {
        Ok(real) if real.starts_with(root) => fs.metadata(&real).is_ok_and(|m| m.is_file()),
        _ => false,
    }
}
