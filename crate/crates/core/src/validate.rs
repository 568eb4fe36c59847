//! Invariant checks over a parsed or hand-built archive.

use std::collections::HashSet;
use std::fmt;

use crate::error::Error;
use crate::model::{Archive, Encoding, Storage};
use crate::par::Exec;
use crate::parse::parse_wrapper;
use crate::path::{dir_name_problem, long_name_problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Locator {
    Header,
    Entity(usize),
}

impl fmt::Display for Locator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locator::Header => f.write_str("header"),
            Locator::Entity(i) => write!(f, "entity {i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    pub severity: Severity,
    pub locator: Locator,
    pub message: String,
}

impl ValidationIssue {
    fn error(locator: Locator, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            locator,
            message: message.into(),
        }
    }

    fn warning(locator: Locator, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            locator,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.severity, self.locator, self.message)
    }
}

/// Checks that `url` is an absolute http or https URL with a host.
pub fn remote_url_problem(url: &str) -> Option<String> {
    match url::Url::parse(url) {
        Ok(u) if !matches!(u.scheme(), "http" | "https") => Some(format!(
            "remotereadhost scheme {:?} is not http or https",
            u.scheme()
        )),
        Ok(u) if u.host_str().map_or(true, str::is_empty) => {
            Some("remotereadhost has no host".to_string())
        }
        Ok(_) => None,
        Err(e) => Some(format!("remotereadhost {url:?} is not a valid URL: {e}")),
    }
}

fn is_dotted_decimal(s: &str) -> bool {
    !s.is_empty()
        && s.split('.')
            .all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()))
}

/// Returns every invariant violation in `archive`. Unrecognized tags are
/// reported as warnings; everything else is an error.
pub fn validate(archive: &Archive) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    let header = &archive.header;
    if !is_dotted_decimal(&header.version) {
        issues.push(ValidationIssue::error(
            Locator::Header,
            format!("version {:?} is not dotted decimal", header.version),
        ));
    }
    for (key, _) in &header.extra_tags {
        issues.push(ValidationIssue::warning(
            Locator::Header,
            format!("unrecognized key {key:?}"),
        ));
    }

    let mut paths = HashSet::new();
    let mut regions = Vec::new();
    for (i, e) in archive.entities.iter().enumerate() {
        let at = Locator::Entity(i);
        if let Some(p) = long_name_problem(&e.long_name) {
            issues.push(ValidationIssue::error(at, p));
        }
        if let Some(p) = dir_name_problem(&e.dir_name) {
            issues.push(ValidationIssue::error(at, p));
        }
        if !paths.insert(e.interior_path()) {
            issues.push(ValidationIssue::error(
                at,
                format!("duplicate interior path {:?}", e.interior_path()),
            ));
        }
        match e.storage {
            Storage::Remote => {
                match &e.remote_url {
                    None => issues.push(ValidationIssue::error(
                        at,
                        "remote entity has no remotereadhost",
                    )),
                    Some(url) => {
                        if let Some(p) = remote_url_problem(url) {
                            issues.push(ValidationIssue::error(at, p));
                        }
                    }
                }
                if e.payload_offset.is_some() {
                    issues.push(ValidationIssue::error(
                        at,
                        "remote entity carries a payload",
                    ));
                }
            }
            Storage::Embedded => {
                if e.encoding.is_none() {
                    issues.push(ValidationIssue::error(
                        at,
                        "embedded entity has no encoding",
                    ));
                }
                match (e.stored_length, e.payload_offset) {
                    (Some(stored), Some(offset)) => {
                        if e.encoding == Some(Encoding::Raw) && stored != e.length {
                            issues.push(ValidationIssue::error(
                                at,
                                format!(
                                    "raw payload stores {stored} bytes but length is {}",
                                    e.length
                                ),
                            ));
                        }
                        match offset.checked_add(stored) {
                            Some(end) if end <= archive.source_size => regions.push((offset, end, i)),
                            _ => issues.push(ValidationIssue::error(
                                at,
                                format!(
                                    "payload region at {offset}+{stored} lies outside the {}-byte wrapper",
                                    archive.source_size
                                ),
                            )),
                        }
                    }
                    (None, _) => issues.push(ValidationIssue::error(
                        at,
                        "embedded entity has no storedlength",
                    )),
                    (_, None) => issues.push(ValidationIssue::error(
                        at,
                        "embedded entity has no payload offset",
                    )),
                }
                if e.remote_url.is_some() {
                    issues.push(ValidationIssue::warning(
                        at,
                        "embedded entity also names a remotereadhost",
                    ));
                }
            }
        }
        for (key, _) in &e.extra_tags {
            issues.push(ValidationIssue::warning(
                at,
                format!("unrecognized key {key:?}"),
            ));
        }
    }

    regions.sort_unstable();
    let mut reach: Option<(u64, usize)> = None;
    for &(start, end, cur) in &regions {
        if let Some((max_end, owner)) = reach {
            if start < max_end {
                issues.push(ValidationIssue::error(
                    Locator::Entity(cur),
                    format!("payload region overlaps entity {owner}"),
                ));
            }
            if end <= max_end {
                continue;
            }
        }
        reach = Some((end, cur));
    }
    issues
}

/// Parses `bytes`, validates the result and decodes every embedded payload.
///
/// A parse failure is reported as a single header-level error. Decoding runs
/// under `exec`.
pub fn verify_wrapper(bytes: &[u8], exec: Exec) -> Vec<ValidationIssue> {
    let archive = match parse_wrapper(bytes) {
        Ok(a) => a,
        Err(e) => return vec![parse_issue(&e)],
    };
    let mut issues = validate(&archive);
    if issues.iter().any(ValidationIssue::is_error) {
        return issues;
    }
    let decoded = exec.map(&archive.entities, |i, e| {
        if !e.is_embedded() {
            return None;
        }
        archive
            .read_content(bytes, e)
            .err()
            .map(|err| ValidationIssue::error(Locator::Entity(i), format!("content: {err}")))
    });
    issues.extend(decoded.into_iter().flatten());
    issues
}

fn parse_issue(e: &Error) -> ValidationIssue {
    let name = match e {
        Error::MissingMagic => "MissingMagic",
        Error::MalformedTagLine { .. } => "MalformedTagLine",
        Error::DuplicateKey { .. } => "DuplicateKey",
        Error::DuplicatePath { .. } => "DuplicatePath",
        Error::PayloadOverrun { .. } => "PayloadOverrun",
        Error::PayloadFraming { .. } => "PayloadFraming",
        Error::MissingRequiredKey { .. } => "MissingRequiredKey",
        Error::BadEnumValue { .. } => "BadEnumValue",
        Error::BadValue { .. } => "BadValue",
        Error::InvalidName { .. } => "InvalidName",
        Error::UnexpectedDataBlock { .. } => "UnexpectedDataBlock",
        Error::TagAfterData { .. } => "TagAfterData",
        _ => "ParseError",
    };
    ValidationIssue::error(Locator::Header, format!("{name}: {e}"))
}
