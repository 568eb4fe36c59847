use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::{Result, ToolError};

/// Called with the finished temp file just before it replaces the target.
/// An error here abandons the write and leaves the target untouched.
pub(crate) type CommitHook<'a> = &'a dyn Fn(&Path) -> io::Result<()>;

pub(crate) fn no_hook(_: &Path) -> io::Result<()> {
    Ok(())
}

/// Writes `target` via a temp file in the same directory and a rename.
pub(crate) fn write_atomically<T>(
    target: &Path,
    overwrite: bool,
    hook: CommitHook<'_>,
    body: impl FnOnce(&mut BufWriter<&File>) -> Result<T>,
) -> Result<T> {
    if !overwrite && target.exists() {
        return Err(ToolError::OutputExists(target.to_path_buf()));
    }
    let dir = match target.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::Builder::new()
        .prefix(".pfsutil-")
        .suffix(".tmp")
        .tempfile_in(dir)
        .map_err(|e| ToolError::io(dir, e))?;
    let value = {
        let mut out = BufWriter::new(tmp.as_file());
        let value = body(&mut out)?;
        out.flush().map_err(|e| ToolError::io(tmp.path(), e))?;
        value
    };
    tmp.as_file()
        .sync_all()
        .map_err(|e| ToolError::io(tmp.path(), e))?;
    hook(tmp.path()).map_err(|e| ToolError::io(tmp.path(), e))?;
    let persisted = if overwrite {
        tmp.persist(target)
    } else {
        tmp.persist_noclobber(target)
    };
    persisted.map_err(|e| {
        if e.error.kind() == io::ErrorKind::AlreadyExists {
            ToolError::OutputExists(target.to_path_buf())
        } else {
            ToolError::io(target, e.error)
        }
    })?;
    Ok(value)
}
