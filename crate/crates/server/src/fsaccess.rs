use std::fs::{self, File, Metadata};
use std::io;
use std::path::{Path, PathBuf};

/// Every filesystem touch the server makes goes through this, so tests can
/// watch which paths are opened.
pub trait FileAccess: Send + Sync {
    fn metadata(&self, path: &Path) -> io::Result<Metadata>;
    fn canonicalize(&self, path: &Path) -> io::Result<PathBuf>;
    fn open(&self, path: &Path) -> io::Result<File>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct RealFs;

impl FileAccess for RealFs {
    fn metadata(&self, path: &Path) -> io::Result<Metadata> {
        fs::metadata(path)
    }

    fn canonicalize(&self, path: &Path) -> io::Result<PathBuf> {
        fs::canonicalize(path)
    }

    fn open(&self, path: &Path) -> io::Result<File> {
        File::open(path)
    }
}
