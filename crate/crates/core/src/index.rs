//! Interior path lookup: a linear scan over the entity list, and a hashed
//! index built once per archive. Both must always agree.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{Archive, EntityRecord};
use crate::par::Exec;

impl Archive {
    /// Scans entities in order for one whose interior path equals `interior`.
    /// Comparison is case-sensitive and byte-exact.
    pub fn lookup_linear(&self, interior: &str) -> Option<(usize, &EntityRecord)> {
        self.entities
            .iter()
            .enumerate()
            .find(|(_, e)| e.has_interior_path(interior))
    }
}

/// Hashed lookup from normalized interior path to entity ordinal.
#[derive(Debug, Clone, Default)]
pub struct PathIndex {
    slots: HashMap<String, usize>,
}

impl PathIndex {
    pub fn build(archive: &Archive) -> Result<Self> {
        let mut slots = HashMap::with_capacity(archive.entities.len());
        for (i, e) in archive.entities.iter().enumerate() {
            let path = e.interior_path();
            if slots.insert(path.clone(), i).is_some() {
                return Err(Error::DuplicatePath { path });
            }
        }
        Ok(Self { slots })
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn contains(&self, interior: &str) -> bool {
        self.slots.contains_key(interior)
    }

    pub fn ordinal(&self, interior: &str) -> Option<usize> {
        self.slots.get(interior).copied()
    }

    /// Same contract as [`Archive::lookup_linear`]. `archive` must be the one
    /// this index was built from.
    pub fn lookup<'a>(
        &self,
        archive: &'a Archive,
        interior: &str,
    ) -> Option<(usize, &'a EntityRecord)> {
        let i = self.ordinal(interior)?;
        archive.entities.get(i).map(|e| (i, e))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.slots.keys().map(String::as_str)
    }
}

/// Resolves many paths at once; one ordinal (or miss) per input path.
pub fn lookup_batch<S: AsRef<str> + Sync>(
    index: &PathIndex,
    paths: &[S],
    exec: Exec,
) -> Vec<Option<usize>> {
    exec.map(paths, |_, p| index.ordinal(p.as_ref()))
}

/// Linear-scan counterpart of [`lookup_batch`].
pub fn lookup_batch_linear<S: AsRef<str> + Sync>(
    archive: &Archive,
    paths: &[S],
    exec: Exec,
) -> Vec<Option<usize>> {
    exec.map(paths, |_, p| {
        archive.lookup_linear(p.as_ref()).map(|(i, _)| i)
    })
}
