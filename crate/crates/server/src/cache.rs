use std::io::{self, Read};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::SystemTime;

use lru::LruCache;
use pfs_core::{parse_wrapper, Archive, PathIndex};
use thiserror::Error;

use crate::fsaccess::FileAccess;

/// A parsed wrapper with its lookup index.
#[derive(Debug)]
pub struct CachedArchive {
    pub archive: Archive,
    pub index: PathIndex,
}

#[derive(Debug, Error)]
pub enum OpenError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Format(#[from] pfs_core::Error),
}

type Stamp = (u64, Option<SystemTime>);

/// Parsed wrappers keyed by path, reused while size and modification time
/// are unchanged. Least recently used entries are evicted first.
pub struct ArchiveCache {
    entries: Mutex<LruCache<PathBuf, (Stamp, Arc<CachedArchive>)>>,
    parses: AtomicU64,
}

impl ArchiveCache {
    pub fn new(capacity: usize) -> Self {
        let cap = NonZeroUsize::new(capacity).unwrap_or(NonZeroUsize::MIN);
        Self {
            entries: Mutex::new(LruCache::new(cap)),
            parses: AtomicU64::new(0),
        }
    }

    /// Number of wrapper parses performed so far.
    pub fn parse_count(&self) -> u64 {
        self.parses.load(Ordering::Relaxed)
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Returns the cached archive for `path`, parsing it on a miss or when
    /// the file changed. The lock is not held while parsing, so concurrent
    /// misses may both parse; the later insert wins.
    pub fn open(&self, fs: &dyn FileAccess, path: &Path) -> Result<Arc<CachedArchive>, OpenError> {
        let meta = fs.metadata(path)?;
        let stamp = (meta.len(), meta.modified().ok());
        if let Some((cached, entry)) = self.entries.lock().unwrap().get(path) {
            if *cached == stamp {
                return Ok(Arc::clone(entry));
            }
        }
        let mut bytes = Vec::with_capacity(meta.len() as usize);
        fs.open(path)?.read_to_end(&mut bytes)?;
        self.parses.fetch_add(1, Ordering::Relaxed);
        let archive = parse_wrapper(&bytes)?;
        let index = PathIndex::build(&archive)?;
        let entry = Arc::new(CachedArchive { archive, index });
        self.entries
            .lock()
            .unwrap()
            .put(path.to_path_buf(), (stamp, Arc::clone(&entry)));
        Ok(entry)
    }
}
