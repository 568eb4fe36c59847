//! Canonical wrapper writer.
//!
//! Output uses LF line endings, no comments, and a fixed key order. Embedded
//! payloads are encoded per entity and `storedlength` is recomputed, so the
//! returned [`Archive`] describes exactly the bytes written.

use std::collections::HashSet;
use std::io::{self, Write};

use crate::content::encode_content;
use crate::date;
use crate::error::{Error, Result};
use crate::keys;
use crate::model::{Archive, EntityRecord, Storage, Tag};
use crate::par::Exec;
use crate::path::{dir_name_problem, long_name_problem};

/// Supplies the decoded content of embedded entities while writing.
pub trait PayloadSource: Sync {
    fn payload(&self, ordinal: usize, entity: &EntityRecord) -> io::Result<Vec<u8>>;
}

impl<F> PayloadSource for F
where
    F: Fn(usize, &EntityRecord) -> io::Result<Vec<u8>> + Sync,
{
    fn payload(&self, ordinal: usize, entity: &EntityRecord) -> io::Result<Vec<u8>> {
        self(ordinal, entity)
    }
}

/// Payload source for archives with no embedded entities.
pub struct NoPayloads;

impl PayloadSource for NoPayloads {
    fn payload(&self, _: usize, entity: &EntityRecord) -> io::Result<Vec<u8>> {
        Err(io::Error::other(format!(
            "no payload available for {}",
            entity.interior_path()
        )))
    }
}

/// Output of [`serialize_wrapper`]: the wrapper bytes and the archive as laid
/// out in them.
#[derive(Debug, Clone)]
pub struct Serialized {
    pub bytes: Vec<u8>,
    pub archive: Archive,
}

/// Entities encoded concurrently before being written out in order.
const BATCH: usize = 64;

pub fn serialize_wrapper(archive: &Archive, payloads: &dyn PayloadSource) -> Result<Serialized> {
    serialize_wrapper_with(archive, payloads, Exec::default())
}

pub fn serialize_wrapper_with(
    archive: &Archive,
    payloads: &dyn PayloadSource,
    exec: Exec,
) -> Result<Serialized> {
    let mut bytes = Vec::new();
    let archive = write_wrapper(archive, payloads, &mut bytes, exec)?;
    Ok(Serialized { bytes, archive })
}

struct Counting<W> {
    inner: W,
    written: u64,
}

impl<W: Write> Counting<W> {
    fn put(&mut self, buf: &[u8]) -> io::Result<()> {
        self.inner.write_all(buf)?;
        self.written += buf.len() as u64;
        Ok(())
    }
}

fn unrepresentable(entity: &str, key: &str, reason: &'static str) -> Error {
    Error::Unrepresentable {
        entity: entity.to_string(),
        key: key.to_string(),
        reason,
    }
}

fn check_value(locator: &str, key: &str, value: &str) -> Result<()> {
    if value.contains(['\n', '\r']) {
        return Err(unrepresentable(locator, key, "value contains a line break"));
    }
    if value.trim() != value {
        return Err(unrepresentable(
            locator,
            key,
            "value has surrounding whitespace",
        ));
    }
    if value.contains(" ;") || value.contains("\t;") {
        return Err(unrepresentable(
            locator,
            key,
            "value would read back as a comment",
        ));
    }
    Ok(())
}

fn check_extra(locator: &str, (key, value): &Tag, known: &[&str]) -> Result<()> {
    if key.is_empty()
        || key.trim() != key
        || key.contains(['=', '\n', '\r'])
        || key.starts_with(['[', ';'])
    {
        return Err(unrepresentable(locator, key, "not a valid tag key"));
    }
    if known.contains(&key.as_str()) {
        return Err(unrepresentable(
            locator,
            key,
            "extra tag shadows a known key",
        ));
    }
    check_value(locator, key, value)
}

fn tag_line(out: &mut Vec<u8>, key: &str, value: &str) {
    out.extend_from_slice(key.as_bytes());
    out.push(b'=');
    out.extend_from_slice(value.as_bytes());
    out.push(b'\n');
}

fn header_block(archive: &Archive) -> Result<Vec<u8>> {
    let header = &archive.header;
    check_value("header", keys::VERSION, &header.version)?;
    let mut out = Vec::new();
    out.extend_from_slice(keys::MAGIC.as_bytes());
    out.push(b'\n');
    tag_line(&mut out, keys::VERSION, &header.version);
    tag_line(&mut out, keys::DATE, &date::format_date(header.date));
    for tag in &header.extra_tags {
        check_extra("header", tag, &keys::HEADER_KEYS)?;
        tag_line(&mut out, &tag.0, &tag.1);
    }
    Ok(out)
}

/// Tag block for one entity, from `[ENTITY]` through `[DATA]` when embedded.
fn entity_block(e: &EntityRecord, stored_length: Option<u64>) -> Result<Vec<u8>> {
    let loc = e.interior_path();
    let mut out = Vec::with_capacity(256);
    out.extend_from_slice(keys::ENTITY.as_bytes());
    out.push(b'\n');
    let opt = |out: &mut Vec<u8>, key: &str, value: Option<&str>| -> Result<()> {
        if let Some(v) = value {
            check_value(&loc, key, v)?;
            tag_line(out, key, v);
        }
        Ok(())
    };
    opt(&mut out, keys::ORIGINAL_NAME, e.original_name.as_deref())?;
    opt(&mut out, keys::LONG_NAME, Some(&e.long_name))?;
    opt(&mut out, keys::SHORT_NAME, e.short_name.as_deref())?;
    opt(&mut out, keys::DIR_NAME, Some(&e.dir_name))?;
    if let Some(ts) = e.created {
        tag_line(&mut out, keys::CREATED, &date::format_timestamp(ts));
    }
    tag_line(&mut out, keys::LENGTH, &e.length.to_string());
    if let Some(n) = stored_length {
        tag_line(&mut out, keys::STORED_LENGTH, &n.to_string());
    }
    opt(&mut out, keys::ORIGIN, e.origin.as_deref())?;
    opt(&mut out, keys::DESCRIPTION, e.description.as_deref())?;
    opt(&mut out, keys::REMOTE_READ_HOST, e.remote_url.as_deref())?;
    tag_line(&mut out, keys::MODE, e.mode.as_str());
    tag_line(&mut out, keys::STORAGE, e.storage.as_str());
    if let Some(enc) = e.encoding {
        tag_line(&mut out, keys::ENCODING, enc.as_str());
    }
    for tag in &e.extra_tags {
        check_extra(&loc, tag, &keys::ENTITY_KEYS)?;
        tag_line(&mut out, &tag.0, &tag.1);
    }
    if e.is_embedded() {
        out.extend_from_slice(keys::DATA.as_bytes());
        out.push(b'\n');
    }
    Ok(out)
}

fn check_entity(ordinal: usize, e: &EntityRecord) -> Result<()> {
    if let Some(reason) = long_name_problem(&e.long_name).or_else(|| dir_name_problem(&e.dir_name))
    {
        return Err(Error::InvalidName {
            entity: ordinal,
            reason: reason.to_string(),
        });
    }
    if e.storage == Storage::Remote && e.remote_url.is_none() {
        return Err(Error::MissingRequiredKey {
            locator: format!("entity {ordinal}"),
            key: keys::REMOTE_READ_HOST,
        });
    }
    Ok(())
}

/// Loads and encodes one embedded payload.
fn encode_entity(
    ordinal: usize,
    e: &EntityRecord,
    payloads: &dyn PayloadSource,
) -> Result<Option<Vec<u8>>> {
    if !e.is_embedded() {
        return Ok(None);
    }
    let data = payloads
        .payload(ordinal, e)
        .map_err(|source| Error::Payload { ordinal, source })?;
    if data.len() as u64 != e.length {
        return Err(Error::PayloadLengthMismatch {
            ordinal,
            expected: e.length,
            actual: data.len() as u64,
        });
    }
    Ok(Some(encode_content(&data, e.encoding.unwrap_or_default())))
}

/// Streams a canonical wrapper to `out` and returns the archive as written.
///
/// Payloads are loaded and encoded in batches using `exec`; tag blocks and
/// payloads are written sequentially in entity order.
pub fn write_wrapper<W: Write>(
    archive: &Archive,
    payloads: &dyn PayloadSource,
    out: W,
    exec: Exec,
) -> Result<Archive> {
    let mut seen = HashSet::with_capacity(archive.entities.len());
    for (i, e) in archive.entities.iter().enumerate() {
        check_entity(i, e)?;
        let path = e.interior_path();
        if !seen.insert(path.clone()) {
            return Err(Error::DuplicatePath { path });
        }
    }

    let mut out = Counting {
        inner: out,
        written: 0,
    };
    out.put(&header_block(archive)?)?;

    let mut laid_out = Vec::with_capacity(archive.entities.len());
    for (batch_no, batch) in archive.entities.chunks(BATCH).enumerate() {
        let base = batch_no * BATCH;
        let encoded = exec.try_map(batch, |i, e| encode_entity(base + i, e, payloads))?;
        for (e, payload) in batch.iter().zip(encoded) {
            let mut record = e.clone();
            match payload {
                Some(payload) => {
                    record.encoding = Some(e.encoding.unwrap_or_default());
                    record.stored_length = Some(payload.len() as u64);
                    out.put(&entity_block(&record, record.stored_length)?)?;
                    record.payload_offset = Some(out.written);
                    out.put(&payload)?;
                    out.put(b"\n")?;
                }
                None => {
                    record.payload_offset = None;
                    out.put(&entity_block(&record, record.stored_length)?)?;
                }
            }
            laid_out.push(record);
        }
    }
    out.inner.flush()?;

    Ok(Archive {
        header: archive.header.clone(),
        entities: laid_out,
        source_size: out.written,
    })
}
