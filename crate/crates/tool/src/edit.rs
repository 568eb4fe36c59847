use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use pfs_core::{remote_url_problem, write_wrapper, Encoding, EntityRecord, Exec};

use crate::atomic::{no_hook, write_atomically};
use crate::error::{Result, ToolError};
use crate::{read_wrapper, split_interior};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EditAction {
    AddEmbedded {
        file: PathBuf,
        interior: String,
        encoding: Encoding,
    },
    AddRemote {
        url: String,
        interior: String,
        length: u64,
    },
    Remove {
        interior: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditSummary {
    pub entity_count: usize,
    pub bytes_written: u64,
}

/// Applies one add or remove and rewrites the wrapper in place. Existing
/// entities are never modified.
pub fn cmd_edit(wrapper: &Path, action: &EditAction) -> Result<EditSummary> {
    cmd_edit_with_hook(wrapper, action, &no_hook)
}

/// [`cmd_edit`] with a hook that runs after the new wrapper is fully written
/// to its temp file and before it replaces the original. If the hook fails
/// the original is left as it was.
pub fn cmd_edit_with_hook(
    wrapper: &Path,
    action: &EditAction,
    hook: &dyn Fn(&Path) -> io::Result<()>,
) -> Result<EditSummary> {
    let (bytes, mut archive) = read_wrapper(wrapper)?;
    let mut added: Option<Vec<u8>> = None;
    match action {
        EditAction::AddEmbedded {
            file,
            interior,
            encoding,
        } => {
            let (dir, name) = split_interior(interior)?;
            free(&archive.entities, &dir, &name)?;
            let data = fs::read(file).map_err(|e| ToolError::UnreadableFile {
                path: file.clone(),
                source: e,
            })?;
            let mut e = EntityRecord::embedded(&dir, &name, data.len() as u64, *encoding);
            e.original_name = Some(file.to_string_lossy().into_owned());
            e.short_name = Some(name);
            e.created = fs::metadata(file)
                .and_then(|m| m.modified())
                .ok()
                .map(crate::create::timestamp);
            e.origin = Some(crate::default_origin());
            archive.entities.push(e);
            added = Some(data);
        }
        EditAction::AddRemote {
            url,
            interior,
            length,
        } => {
            if let Some(problem) = remote_url_problem(url) {
                return Err(ToolError::BadRule(format!("{url:?}: {problem}")));
            }
            let (dir, name) = split_interior(interior)?;
            free(&archive.entities, &dir, &name)?;
            let mut e = EntityRecord::remote(&dir, &name, *length, url);
            e.short_name = Some(name);
            e.origin = Some(crate::default_origin());
            archive.entities.push(e);
        }
        EditAction::Remove { interior } => {
            let (dir, name) = split_interior(interior)?;
            let pos = archive
                .entities
                .iter()
                .position(|e| e.dir_name == dir && e.long_name == name)
                .ok_or_else(|| ToolError::NotFound(interior.clone()))?;
            archive.entities.remove(pos);
        }
    }

    let last = archive.len().saturating_sub(1);
    let payloads = |i: usize, e: &EntityRecord| -> io::Result<Vec<u8>> {
        if i == last {
            if let Some(data) = &added {
                return Ok(data.clone());
            }
        }
        archive
            .read_content(&bytes[..], e)
            .map_err(|err| io::Error::new(io::ErrorKind::InvalidData, err.to_string()))
    };
    let written = write_atomically(wrapper, true, hook, |out| {
        Ok(write_wrapper(&archive, &payloads, out, Exec::default())?)
    })?;
    Ok(EditSummary {
        entity_count: written.len(),
        bytes_written: written.source_size,
    })
}

fn free(entities: &[EntityRecord], dir: &str, name: &str) -> Result<()> {
    if entities
        .iter()
        .any(|e| e.dir_name == dir && e.long_name == name)
    {
        let path = if dir.is_empty() {
            name.to_string()
        } else {
            format!("{dir}/{name}")
        };
        return Err(ToolError::DuplicatePath(path));
    }
    Ok(())
}
