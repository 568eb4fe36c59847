use std::fmt;
use std::path::Path;

use chrono::NaiveDateTime;
use pfs_core::{date, Storage};

use crate::error::Result;
use crate::read_wrapper;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListRow {
    pub interior: String,
    pub storage: Storage,
    pub length: u64,
    pub created: Option<NaiveDateTime>,
    pub remote_url: Option<String>,
}

/// Tab-separated: path, storage, length, created, url. Absent fields are "-".
impl fmt::Display for ListRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let created = self
            .created
            .map(date::format_timestamp)
            .unwrap_or_else(|| "-".into());
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}",
            self.interior,
            self.storage,
            self.length,
            created,
            self.remote_url.as_deref().unwrap_or("-")
        )
    }
}

pub fn cmd_list(wrapper: &Path) -> Result<Vec<ListRow>> {
    let (_, archive) = read_wrapper(wrapper)?;
    Ok(archive
        .entities
        .into_iter()
        .map(|e| ListRow {
            interior: e.interior_path(),
            storage: e.storage,
            length: e.length,
            created: e.created,
            remote_url: e.remote_url,
        })
        .collect())
}
