//! Interior paths: the part of a request after the wrapper segment, and the
//! `dirname`/`longname` values entities are looked up by.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("path contains a \".\" or \"..\" segment")]
    TraversalRejected,
    #[error("path contains a NUL byte")]
    IllegalByte,
    #[error("path segment {0:?} is a drive designator")]
    AbsoluteRemainder(String),
}

fn is_drive_designator(seg: &str) -> bool {
    let b = seg.as_bytes();
    b.len() == 2 && b[0].is_ascii_alphabetic() && b[1] == b':'
}

fn check_segment(seg: &str) -> Result<(), PathError> {
    if seg == "." || seg == ".." {
        return Err(PathError::TraversalRejected);
    }
    if is_drive_designator(seg) {
        return Err(PathError::AbsoluteRemainder(seg.to_string()));
    }
    Ok(())
}

/// Normalizes a percent-decoded interior path.
///
/// One leading `/` is stripped and empty segments collapse. The result is
/// either `""` (the wrapper root) or `seg(/seg)*`. Backslashes are ordinary
/// name bytes, never separators.
pub fn normalize_interior_path(raw: &str) -> Result<String, PathError> {
    if raw.contains('\0') {
        return Err(PathError::IllegalByte);
    }
    let mut out = String::with_capacity(raw.len());
    for seg in raw.split('/').filter(|s| !s.is_empty()) {
        check_segment(seg)?;
        if !out.is_empty() {
            out.push('/');
        }
        out.push_str(seg);
    }
    Ok(out)
}

/// Problems with an entity's `longname`, or `None` when it is usable.
pub fn long_name_problem(name: &str) -> Option<&'static str> {
    if name.is_empty() {
        Some("longname is empty")
    } else if name.contains('/') {
        Some("longname contains \"/\"")
    } else if name.contains('\0') {
        Some("longname contains NUL")
    } else if name == "." || name == ".." {
        Some("longname is a dot segment")
    } else if is_drive_designator(name) {
        Some("longname is a drive designator")
    } else {
        None
    }
}

/// Problems with an entity's `dirname`, or `None` when it is usable.
/// A usable dirname is already in normalized form.
pub fn dir_name_problem(dir: &str) -> Option<&'static str> {
    if dir.is_empty() {
        return None;
    }
    if dir.contains('\0') {
        return Some("dirname contains NUL");
    }
    if dir.starts_with('/') || dir.ends_with('/') {
        return Some("dirname has a leading or trailing \"/\"");
    }
    for seg in dir.split('/') {
        if seg.is_empty() {
            return Some("dirname has an empty segment");
        }
        if seg == ".." {
            return Some("dirname contains \"..\"");
        }
        if seg == "." {
            return Some("dirname contains \".\"");
        }
        if is_drive_designator(seg) {
            return Some("dirname contains a drive designator");
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_leading_slash() {
        assert_eq!(
            normalize_interior_path("/index.html").unwrap(),
            "index.html"
        );
        assert_eq!(normalize_interior_path("/").unwrap(), "");
        assert_eq!(normalize_interior_path("").unwrap(), "");
    }

    #[test]
    fn collapses_empty_segments() {
        assert_eq!(normalize_interior_path("//a///b/").unwrap(), "a/b");
    }

    #[test]
    fn rejects_traversal() {
        assert_eq!(
            normalize_interior_path("/a/../b"),
            Err(PathError::TraversalRejected)
        );
        assert_eq!(
            normalize_interior_path("/./b"),
            Err(PathError::TraversalRejected)
        );
        assert_eq!(
            normalize_interior_path(".."),
            Err(PathError::TraversalRejected)
        );
    }

    #[test]
    fn rejects_nul_and_drives() {
        assert_eq!(
            normalize_interior_path("/a\0b"),
            Err(PathError::IllegalByte)
        );
        assert!(matches!(
            normalize_interior_path("/C:/windows"),
            Err(PathError::AbsoluteRemainder(_))
        ));
    }

    #[test]
    fn backslash_is_literal() {
        assert_eq!(normalize_interior_path("/a\\..\\b").unwrap(), "a\\..\\b");
        assert_eq!(normalize_interior_path("/...").unwrap(), "...");
    }

    #[test]
    fn name_checks() {
        assert_eq!(long_name_problem("Vendor.txt"), None);
        assert!(long_name_problem("").is_some());
        assert!(long_name_problem("a/b").is_some());
        assert!(long_name_problem("..").is_some());
        assert_eq!(dir_name_problem(""), None);
        assert_eq!(dir_name_problem("Images"), None);
        assert_eq!(dir_name_problem("Dept1/sub"), None);
        for bad in ["/a", "a/", "a//b", "a/../b", "..", ".", "a\0"] {
            assert!(dir_name_problem(bad).is_some(), "{bad:?}");
        }
    }
}
