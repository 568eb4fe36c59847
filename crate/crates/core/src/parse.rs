//! Wrapper parser.
//!
//! ```text
//! wrapper     = magic header-tags entity*
//! magic       = "PFS!" LF
//! header-tags = tagline*
//! entity      = "[ENTITY]" LF tagline* [ "[DATA]" LF payload LF ]
//! tagline     = key "=" value [ WSP ";" comment ] LF
//! ```
//!
//! Payload bytes are located, never decoded. CRLF line endings are accepted,
//! as are blank lines and lines starting with `;`.

use std::collections::HashSet;

use crate::date;
use crate::error::{Error, Result};
use crate::keys;
use crate::model::{AccessMode, Archive, Encoding, EntityRecord, Storage, Tag, WrapperHeader};
use crate::path::{dir_name_problem, long_name_problem};

struct Lines<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Option<(usize, &'a [u8])> {
        if self.pos >= self.bytes.len() {
            return None;
        }
        let rest = &self.bytes[self.pos..];
        let (line, advance) = match rest.iter().position(|&b| b == b'\n') {
            Some(nl) => (&rest[..nl], nl + 1),
            None => (rest, rest.len()),
        };
        self.pos += advance;
        self.line += 1;
        Some((self.line, line.strip_suffix(b"\r").unwrap_or(line)))
    }

    fn remaining(&self) -> u64 {
        (self.bytes.len() - self.pos) as u64
    }
}

/// Splits a tag line into trimmed key and value, dropping any comment. A
/// `;` starts a comment only when preceded by a space or tab.
pub(crate) fn split_tag(line: &str) -> Option<(&str, &str)> {
    let (key, raw) = line.split_once('=')?;
    let bytes = raw.as_bytes();
    let end = (1..bytes.len())
        .find(|&i| bytes[i] == b';' && matches!(bytes[i - 1], b' ' | b'\t'))
        .unwrap_or(bytes.len());
    Some((key.trim(), raw[..end].trim()))
}

fn is_dotted_decimal(s: &str) -> bool {
    !s.is_empty()
        && s.split('.')
            .all(|part| !part.is_empty() && part.bytes().all(|b| b.is_ascii_digit()))
}

#[derive(Default)]
struct HeaderBuilder {
    version: Option<String>,
    date: Option<chrono::NaiveDate>,
    extra_tags: Vec<Tag>,
}

impl HeaderBuilder {
    fn tag(&mut self, line: usize, key: &str, value: &str) -> Result<()> {
        match key {
            keys::VERSION => {
                if !is_dotted_decimal(value) {
                    return Err(bad_value(line, key, value, "expected dotted decimal"));
                }
                set_once(&mut self.version, value.to_string(), line, key)
            }
            keys::DATE => {
                let d = date::parse_date(value).ok_or_else(|| {
                    bad_value(line, key, value, "expected DD-MM-YY or YYYY-MM-DD")
                })?;
                set_once(&mut self.date, d, line, key)
            }
            _ => {
                self.extra_tags.push((key.to_string(), value.to_string()));
                Ok(())
            }
        }
    }

    fn finish(self) -> Result<WrapperHeader> {
        let missing = |key| Error::MissingRequiredKey {
            locator: "header".into(),
            key,
        };
        Ok(WrapperHeader {
            version: self.version.ok_or_else(|| missing(keys::VERSION))?,
            date: self.date.ok_or_else(|| missing(keys::DATE))?,
            extra_tags: self.extra_tags,
        })
    }
}

fn bad_value(line: usize, key: &str, value: &str, reason: &'static str) -> Error {
    Error::BadValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
        reason,
    }
}

fn bad_enum(line: usize, key: &str, value: &str) -> Error {
    Error::BadEnumValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
    }
}

fn set_once<T>(slot: &mut Option<T>, value: T, line: usize, key: &str) -> Result<()> {
    if slot.is_some() {
        return Err(Error::DuplicateKey {
            line,
            key: key.to_string(),
        });
    }
    *slot = Some(value);
    Ok(())
}

fn parse_u64(line: usize, key: &str, value: &str) -> Result<u64> {
    if value.is_empty() || !value.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad_value(line, key, value, "expected a decimal byte count"));
    }
    value
        .parse()
        .map_err(|_| bad_value(line, key, value, "byte count out of range"))
}

struct EntityBuilder {
    ordinal: usize,
    start_line: usize,
    original_name: Option<String>,
    long_name: Option<String>,
    short_name: Option<String>,
    dir_name: Option<String>,
    created: Option<chrono::NaiveDateTime>,
    length: Option<u64>,
    stored_length: Option<u64>,
    origin: Option<String>,
    description: Option<String>,
    remote_url: Option<String>,
    mode: Option<AccessMode>,
    storage: Option<Storage>,
    encoding: Option<Encoding>,
    extra_tags: Vec<Tag>,
}

impl EntityBuilder {
    fn new(ordinal: usize, start_line: usize) -> Self {
        Self {
            ordinal,
            start_line,
            original_name: None,
            long_name: None,
            short_name: None,
            dir_name: None,
            created: None,
            length: None,
            stored_length: None,
            origin: None,
            description: None,
            remote_url: None,
            mode: None,
            storage: None,
            encoding: None,
            extra_tags: Vec::new(),
        }
    }

    fn tag(&mut self, line: usize, key: &str, value: &str) -> Result<()> {
        let text = || value.to_string();
        match key {
            keys::ORIGINAL_NAME => set_once(&mut self.original_name, text(), line, key),
            keys::LONG_NAME => set_once(&mut self.long_name, text(), line, key),
            keys::SHORT_NAME => set_once(&mut self.short_name, text(), line, key),
            keys::DIR_NAME => set_once(&mut self.dir_name, text(), line, key),
            keys::CREATED => {
                let ts = date::parse_timestamp(value).ok_or_else(|| {
                    bad_value(
                        line,
                        key,
                        value,
                        "expected DD-MM-YY H:MM:SS AM/PM or ISO 8601",
                    )
                })?;
                set_once(&mut self.created, ts, line, key)
            }
            keys::LENGTH => set_once(&mut self.length, parse_u64(line, key, value)?, line, key),
            keys::STORED_LENGTH => set_once(
                &mut self.stored_length,
                parse_u64(line, key, value)?,
                line,
                key,
            ),
            keys::ORIGIN => set_once(&mut self.origin, text(), line, key),
            keys::DESCRIPTION => set_once(&mut self.description, text(), line, key),
            keys::REMOTE_READ_HOST => set_once(&mut self.remote_url, text(), line, key),
            keys::MODE => {
                let mode = value.parse().map_err(|_| bad_enum(line, key, value))?;
                set_once(&mut self.mode, mode, line, key)
            }
            keys::STORAGE => {
                let storage = value.parse().map_err(|_| bad_enum(line, key, value))?;
                set_once(&mut self.storage, storage, line, key)
            }
            keys::ENCODING => {
                let encoding = value.parse().map_err(|_| bad_enum(line, key, value))?;
                set_once(&mut self.encoding, encoding, line, key)
            }
            _ => {
                self.extra_tags.push((key.to_string(), value.to_string()));
                Ok(())
            }
        }
    }

    fn missing(&self, key: &'static str) -> Error {
        Error::MissingRequiredKey {
            locator: format!("entity {} (line {})", self.ordinal, self.start_line),
            key,
        }
    }

    fn finish(self, payload_offset: Option<u64>) -> Result<EntityRecord> {
        let long_name = self
            .long_name
            .clone()
            .ok_or_else(|| self.missing(keys::LONG_NAME))?;
        let dir_name = self
            .dir_name
            .clone()
            .ok_or_else(|| self.missing(keys::DIR_NAME))?;
        let length = self.length.ok_or_else(|| self.missing(keys::LENGTH))?;
        let storage = self.storage.ok_or_else(|| self.missing(keys::STORAGE))?;
        let mode = self.mode.ok_or_else(|| self.missing(keys::MODE))?;
        if let Some(reason) = long_name_problem(&long_name).or_else(|| dir_name_problem(&dir_name))
        {
            return Err(Error::InvalidName {
                entity: self.ordinal,
                reason: reason.to_string(),
            });
        }
        let encoding = match storage {
            Storage::Remote => {
                if self.remote_url.is_none() {
                    return Err(self.missing(keys::REMOTE_READ_HOST));
                }
                if payload_offset.is_some() {
                    return Err(Error::UnexpectedDataBlock {
                        entity: self.ordinal,
                    });
                }
                self.encoding
            }
            Storage::Embedded => {
                if self.stored_length.is_none() {
                    return Err(self.missing(keys::STORED_LENGTH));
                }
                if payload_offset.is_none() {
                    return Err(self.missing(keys::DATA));
                }
                Some(self.encoding.unwrap_or_default())
            }
        };
        Ok(EntityRecord {
            original_name: self.original_name,
            long_name,
            short_name: self.short_name,
            dir_name,
            created: self.created,
            length,
            stored_length: self.stored_length,
            origin: self.origin,
            description: self.description,
            remote_url: self.remote_url,
            mode,
            storage,
            encoding,
            payload_offset,
            extra_tags: self.extra_tags,
        })
    }
}

enum State {
    Header(HeaderBuilder),
    Entity(EntityBuilder),
    AfterData,
}

/// Parses a complete wrapper held in memory.
pub fn parse_wrapper(bytes: &[u8]) -> Result<Archive> {
    let mut lines = Lines {
        bytes,
        pos: 0,
        line: 0,
    };
    match lines.next_line() {
        Some((_, line)) if line == keys::MAGIC.as_bytes() => {}
        _ => return Err(Error::MissingMagic),
    }

    let mut header: Option<WrapperHeader> = None;
    let mut entities: Vec<EntityRecord> = Vec::new();
    let mut seen_paths: HashSet<String> = HashSet::new();
    let mut state = State::Header(HeaderBuilder::default());

    let mut push_entity = |entities: &mut Vec<EntityRecord>, entity: EntityRecord| -> Result<()> {
        let path = entity.interior_path();
        if !seen_paths.insert(path.clone()) {
            return Err(Error::DuplicatePath { path });
        }
        entities.push(entity);
        Ok(())
    };

    while let Some((line_no, raw)) = lines.next_line() {
        let text = std::str::from_utf8(raw).map_err(|_| Error::MalformedTagLine {
            line: line_no,
            text: String::from_utf8_lossy(raw).into_owned(),
        })?;
        let trimmed = text.trim();

        if trimmed == keys::ENTITY {
            match std::mem::replace(&mut state, State::AfterData) {
                State::Header(h) => header = Some(h.finish()?),
                State::Entity(e) => push_entity(&mut entities, e.finish(None)?)?,
                State::AfterData => {}
            }
            state = State::Entity(EntityBuilder::new(entities.len(), line_no));
            continue;
        }

        if trimmed == keys::DATA {
            let State::Entity(entity) = std::mem::replace(&mut state, State::AfterData) else {
                return Err(Error::MalformedTagLine {
                    line: line_no,
                    text: text.to_string(),
                });
            };
            let ordinal = entity.ordinal;
            if entity.storage == Some(Storage::Remote) {
                return Err(Error::UnexpectedDataBlock { entity: ordinal });
            }
            let stored = entity
                .stored_length
                .ok_or_else(|| entity.missing(keys::STORED_LENGTH))?;
            let offset = lines.pos as u64;
            if stored > lines.remaining() {
                return Err(Error::PayloadOverrun {
                    entity: ordinal,
                    needed: stored,
                    available: lines.remaining(),
                });
            }
            let end = lines.pos + stored as usize;
            lines.line += bytes[lines.pos..end]
                .iter()
                .filter(|&&b| b == b'\n')
                .count();
            lines.pos = end;
            let rest = &bytes[end..];
            let framing = if rest.starts_with(b"\n") {
                1
            } else if rest.starts_with(b"\r\n") {
                2
            } else if rest.is_empty() {
                return Err(Error::PayloadOverrun {
                    entity: ordinal,
                    needed: stored + 1,
                    available: stored,
                });
            } else {
                return Err(Error::PayloadFraming { entity: ordinal });
            };
            lines.pos += framing;
            push_entity(&mut entities, entity.finish(Some(offset))?)?;
            continue;
        }

        if trimmed.is_empty() || trimmed.starts_with(';') {
            continue;
        }

        let Some((key, value)) = split_tag(text) else {
            return Err(Error::MalformedTagLine {
                line: line_no,
                text: text.to_string(),
            });
        };
        if key.is_empty() {
            return Err(Error::MalformedTagLine {
                line: line_no,
                text: text.to_string(),
            });
        }
        match &mut state {
            State::Header(h) => h.tag(line_no, key, value)?,
            State::Entity(e) => e.tag(line_no, key, value)?,
            State::AfterData => return Err(Error::TagAfterData { line: line_no }),
        }
    }

    match state {
        State::Header(h) => header = Some(h.finish()?),
        State::Entity(e) => push_entity(&mut entities, e.finish(None)?)?,
        State::AfterData => {}
    }

    Ok(Archive {
        header: header.expect("header is finished before the first entity"),
        entities,
        source_size: bytes.len() as u64,
    })
}
