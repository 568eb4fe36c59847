//! In-memory model of a wrapper: header, entity records and the archive
//! that ties them to the byte layout of a wrapper file.

use std::fmt;
use std::str::FromStr;

use chrono::{NaiveDate, NaiveDateTime};

/// An unrecognized `key=value` tag, kept verbatim for forward compatibility.
pub type Tag = (String, String);

/// Where an entity's content lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Storage {
    Embedded,
    Remote,
}

/// Representation of an embedded payload inside the wrapper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Encoding {
    #[default]
    Raw,
    Uuencode,
}

/// Access mode of an entity. Read-only is the only mode defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum AccessMode {
    #[default]
    ReadOnly,
}

macro_rules! tag_enum {
    ($ty:ty { $($variant:path => $text:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(&self) -> &'static str {
                match self { $($variant => $text),+ }
            }
        }

        impl FromStr for $ty {
            type Err = ();

            fn from_str(s: &str) -> Result<Self, ()> {
                match s {
                    $($text => Ok($variant),)+
                    _ => Err(()),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

tag_enum!(Storage { Storage::Embedded => "embedded", Storage::Remote => "remote" });
tag_enum!(Encoding { Encoding::Raw => "raw", Encoding::Uuencode => "uuencode" });
tag_enum!(AccessMode { AccessMode::ReadOnly => "RO" });

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WrapperHeader {
    pub version: String,
    pub date: NaiveDate,
    pub extra_tags: Vec<Tag>,
}

impl WrapperHeader {
    pub const CURRENT_VERSION: &'static str = "1.0";

    pub fn new(date: NaiveDate) -> Self {
        Self {
            version: Self::CURRENT_VERSION.to_string(),
            date,
            extra_tags: Vec::new(),
        }
    }
}

/// Metadata for one archived file.
///
/// Fields mirror the tag keys of an `[ENTITY]` section. `stored_length` and
/// `payload_offset` describe where an embedded payload sits in the wrapper;
/// the writer recomputes both and the parser fills them in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityRecord {
    /// Informational path the file was packaged from (`originalname`).
    pub original_name: Option<String>,
    /// Lookup name (`longname`), compared byte for byte.
    pub long_name: String,
    pub short_name: Option<String>,
    /// Collapsed directory, `/`-separated, empty for the wrapper root.
    pub dir_name: String,
    pub created: Option<NaiveDateTime>,
    /// Length of the decoded content.
    pub length: u64,
    /// Length of the encoded payload region (embedded only).
    pub stored_length: Option<u64>,
    pub origin: Option<String>,
    pub description: Option<String>,
    /// `remotereadhost`: where a remote entity's content is fetched from.
    pub remote_url: Option<String>,
    pub mode: AccessMode,
    pub storage: Storage,
    pub encoding: Option<Encoding>,
    pub payload_offset: Option<u64>,
    pub extra_tags: Vec<Tag>,
}

impl EntityRecord {
    /// A bare embedded entity; the writer fills in the payload layout.
    pub fn embedded(dir_name: &str, long_name: &str, length: u64, encoding: Encoding) -> Self {
        Self {
            original_name: None,
            long_name: long_name.to_string(),
            short_name: None,
            dir_name: dir_name.to_string(),
            created: None,
            length,
            stored_length: None,
            origin: None,
            description: None,
            remote_url: None,
            mode: AccessMode::ReadOnly,
            storage: Storage::Embedded,
            encoding: Some(encoding),
            payload_offset: None,
            extra_tags: Vec::new(),
        }
    }

    pub fn remote(dir_name: &str, long_name: &str, length: u64, url: &str) -> Self {
        Self {
            storage: Storage::Remote,
            encoding: None,
            remote_url: Some(url.to_string()),
            ..Self::embedded(dir_name, long_name, length, Encoding::Raw)
        }
    }

    pub fn is_embedded(&self) -> bool {
        self.storage == Storage::Embedded
    }

    /// `dirname/longname`, or just `longname` at the wrapper root.
    pub fn interior_path(&self) -> String {
        if self.dir_name.is_empty() {
            self.long_name.clone()
        } else {
            format!("{}/{}", self.dir_name, self.long_name)
        }
    }

    /// Compares [`interior_path`](Self::interior_path) against `path`
    /// without allocating.
    pub fn has_interior_path(&self, path: &str) -> bool {
        if self.dir_name.is_empty() {
            return self.long_name == path;
        }
        path.strip_prefix(self.dir_name.as_str())
            .and_then(|rest| rest.strip_prefix('/'))
            .is_some_and(|name| name == self.long_name)
    }

    /// Byte range of the embedded payload region, when laid out.
    pub fn payload_region(&self) -> Option<(u64, u64)> {
        match (self.storage, self.payload_offset, self.stored_length) {
            (Storage::Embedded, Some(offset), Some(len)) => Some((offset, offset + len)),
            _ => None,
        }
    }
}

/// A parsed wrapper. Immutable once produced by the parser or writer, so it
/// can be shared between any number of readers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Archive {
    pub header: WrapperHeader,
    pub entities: Vec<EntityRecord>,
    /// Total size of the wrapper the archive was read from or written to.
    pub source_size: u64,
}

impl Archive {
    pub fn new(header: WrapperHeader) -> Self {
        Self {
            header,
            entities: Vec::new(),
            source_size: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }
}
