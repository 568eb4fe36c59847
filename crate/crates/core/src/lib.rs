//! The PFS document wrapper: a single file that packages a web directory
//! tree. Each file becomes an `[ENTITY]` record whose content is either
//! embedded (raw or uuencoded) or referenced at a remote URL.
//!
//! ```
//! use pfs_core::{parse_wrapper, serialize_wrapper, Archive, Encoding, EntityRecord, WrapperHeader};
//!
//! let date = chrono::NaiveDate::from_ymd_opt(1997, 6, 25).unwrap();
//! let mut archive = Archive::new(WrapperHeader::new(date));
//! archive.entities.push(EntityRecord::embedded("", "index.html", 5, Encoding::Uuencode));
//!
//! let out = serialize_wrapper(&archive, &|_: usize, _: &EntityRecord| Ok(b"hello".to_vec())).unwrap();
//! let parsed = parse_wrapper(&out.bytes).unwrap();
//! assert_eq!(parsed, out.archive);
//! let (_, entity) = parsed.lookup_linear("index.html").unwrap();
//! assert_eq!(parsed.read_content(&out.bytes, entity).unwrap(), b"hello");
//! ```

mod content;
pub mod date;
mod error;
mod index;
pub mod keys;
mod model;
pub mod par;
mod parse;
mod path;
pub mod uuencode;
mod validate;
mod write;

pub use content::{decode_content, encode_content, ByteSource};
pub use error::{Error, Result};
pub use index::{lookup_batch, lookup_batch_linear, PathIndex};
pub use model::{AccessMode, Archive, Encoding, EntityRecord, Storage, Tag, WrapperHeader};
pub use par::Exec;
pub use parse::parse_wrapper;
pub use path::{dir_name_problem, long_name_problem, normalize_interior_path, PathError};
pub use validate::{
    remote_url_problem, validate, verify_wrapper, Locator, Severity, ValidationIssue,
};
pub use write::{
    serialize_wrapper, serialize_wrapper_with, write_wrapper, NoPayloads, PayloadSource, Serialized,
};
