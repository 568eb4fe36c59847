//! Packaging operations behind the `pfsutil` command: build wrappers from
//! directory trees, list, extract, edit, verify and audit them.

mod atomic;
mod audit;
mod create;
mod edit;
mod error;
mod extract;
mod list;
mod verify;

pub use audit::{audit_archive, cmd_audit_links, AuditRecord, AuditReport, LinkClass};
pub use create::{cmd_create, default_origin, BuildOptions, CreateSummary, RemoteRule};
pub use edit::{cmd_edit, cmd_edit_with_hook, EditAction, EditSummary};
pub use error::{Result, ToolError};
pub use extract::{cmd_extract, ExtractOptions, ExtractSummary, REMOTE_MANIFEST};
pub use list::{cmd_list, ListRow};
pub use verify::{cmd_verify, VerifyOutcome};

use std::path::Path;

use pfs_core::Archive;

pub(crate) fn read_wrapper(path: &Path) -> Result<(Vec<u8>, Archive)> {
    let bytes = std::fs::read(path).map_err(|e| ToolError::io(path, e))?;
    let archive = pfs_core::parse_wrapper(&bytes)?;
    Ok((bytes, archive))
}

/// Splits a normalized interior path into `(dirname, longname)`.
pub(crate) fn split_interior(raw: &str) -> Result<(String, String)> {
    let path = pfs_core::normalize_interior_path(raw)
        .map_err(|e| ToolError::BadInterior(format!("{raw:?}: {e}")))?;
    match path.rsplit_once('/') {
        Some((dir, name)) => Ok((dir.to_string(), name.to_string())),
        None if path.is_empty() => Err(ToolError::BadInterior(format!("{raw:?}: empty path"))),
        None => Ok((String::new(), path)),
    }
}
