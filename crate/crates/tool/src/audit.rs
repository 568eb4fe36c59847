use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use pfs_core::Archive;
use regex::bytes::Regex;
use url::Url;

use crate::error::Result;
use crate::read_wrapper;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkClass {
    SameHost,
    ForeignHost,
}

impl fmt::Display for LinkClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinkClass::SameHost => "same-host",
            LinkClass::ForeignHost => "foreign-host",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditRecord {
    pub interior: String,
    /// 1-based.
    pub line: usize,
    pub url: String,
    pub class: LinkClass,
}

impl fmt::Display for AuditRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}\t{}\t{}",
            self.interior, self.line, self.class, self.url
        )
    }
}

pub type AuditReport = Vec<AuditRecord>;

fn attr_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r#"(?i)\b(?:href|src)\s*=\s*(?:"([^"]*)"|'([^']*)'|([^\s"'>]+))"#).unwrap()
    })
}

pub fn cmd_audit_links(wrapper: &Path, site_host: &str) -> Result<AuditReport> {
    let (bytes, archive) = read_wrapper(wrapper)?;
    audit_archive(&archive, &bytes, site_host)
}

/// Scans embedded `.html`/`.htm` entities for absolute http(s) links.
pub fn audit_archive(archive: &Archive, bytes: &[u8], site_host: &str) -> Result<AuditReport> {
    let site = site_host.trim().trim_end_matches('.').to_ascii_lowercase();
    let mut report = Vec::new();
    for e in archive.entities.iter().filter(|e| e.is_embedded()) {
        let lower = e.long_name.to_ascii_lowercase();
        if !(lower.ends_with(".html") || lower.ends_with(".htm")) {
            continue;
        }
        let text = archive.read_content(bytes, e)?;
        let mut line = 1;
        let mut scanned = 0;
        for caps in attr_pattern().captures_iter(&text) {
            let value = caps.get(1).or(caps.get(2)).or(caps.get(3)).unwrap();
            let raw = String::from_utf8_lossy(value.as_bytes());
            let raw = raw.trim();
            let head = raw.get(..8).unwrap_or(raw).to_ascii_lowercase();
            if !(head.starts_with("http://") || head.starts_with("https://")) {
                continue;
            }
            line += text[scanned..value.start()]
                .iter()
                .filter(|&&b| b == b'\n')
                .count();
            scanned = value.start();
            let host = Url::parse(raw).ok().and_then(|u| {
                u.host_str()
                    .map(|h| h.trim_end_matches('.').to_ascii_lowercase())
            });
            let class = if host.as_deref() == Some(site.as_str()) {
                LinkClass::SameHost
            } else {
                LinkClass::ForeignHost
            };
            report.push(AuditRecord {
                interior: e.interior_path(),
                line,
                url: raw.to_string(),
                class,
            });
        }
    }
    Ok(report)
}
