use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ToolError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot read {}: {source}", path.display())]
    UnreadableFile { path: PathBuf, source: io::Error },
    #[error("{} already exists (use --overwrite)", .0.display())]
    OutputExists(PathBuf),
    #[error("symbolic link loop at {}", .0.display())]
    LinkLoop(PathBuf),
    #[error("file name cannot be stored: {0}")]
    BadFileName(String),
    #[error("bad remote rule {0}")]
    BadRule(String),
    #[error("bad include pattern {0}")]
    BadPattern(String),
    #[error("bad interior path {0}")]
    BadInterior(String),
    #[error("path {0:?} would escape the destination")]
    TraversalRejected(String),
    #[error("{} already exists (use --overwrite)", .0.display())]
    DestinationCollision(PathBuf),
    #[error("no entity at {0:?}")]
    NotFound(String),
    #[error("an entity already exists at {0:?}")]
    DuplicatePath(String),
    #[error(transparent)]
    Format(#[from] pfs_core::Error),
}

impl ToolError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        ToolError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T, E = ToolError> = std::result::Result<T, E>;
