//! Seeded generators for random canonical archives and their payloads.

use std::collections::HashSet;

use chrono::{NaiveDate, NaiveDateTime};
use pfs_core::{Archive, Encoding, EntityRecord, WrapperHeader};
use rand::seq::SliceRandom;
use rand::Rng;

/// A generated archive plus the decoded content of each entity (empty for
/// remote entities), indexed by ordinal.
#[derive(Debug, Clone)]
pub struct Generated {
    pub archive: Archive,
    pub payloads: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub max_entities: usize,
    pub max_payload: usize,
    /// Probability an entity is remote.
    pub remote_ratio: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            max_entities: 50,
            max_payload: 64 * 1024,
            remote_ratio: 0.2,
        }
    }
}

const NAME_CHARS: &[char] = &[
    'a', 'b', 'c', 'x', 'y', 'z', 'A', 'B', 'Q', '0', '1', '9', '-', '_', '.', ' ', '~', '\\', '(',
    ')', '#', '%', '+', ';', 'é', 'ü', '日', '本',
];

fn name<R: Rng>(rng: &mut R) -> String {
    loop {
        let len = rng.gen_range(1..=12);
        let s: String = (0..len).map(|_| *NAME_CHARS.choose(rng).unwrap()).collect();
        let ok = s.trim() == s && s != "." && s != ".." && !s.contains(" ;") && !s.starts_with(';');
        if ok {
            return s;
        }
    }
}

fn text<R: Rng>(rng: &mut R) -> String {
    const WORDS: &[&str] = &[
        "This",
        "is",
        "the",
        "Vendors",
        "message",
        "file",
        "C:\\Program",
        "Files",
        "x=y",
        "a;b",
        "http://h/p?q=1;r=2",
        "Ω",
    ];
    let n = rng.gen_range(1..=5);
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn random_date<R: Rng>(rng: &mut R) -> NaiveDate {
    let year = if rng.gen_bool(0.8) {
        rng.gen_range(1970..=2069)
    } else {
        rng.gen_range(1900..=2199)
    };
    NaiveDate::from_ymd_opt(year, rng.gen_range(1..=12), rng.gen_range(1..=28)).unwrap()
}

fn random_timestamp<R: Rng>(rng: &mut R) -> NaiveDateTime {
    random_date(rng)
        .and_hms_opt(
            rng.gen_range(0..24),
            rng.gen_range(0..60),
            rng.gen_range(0..60),
        )
        .unwrap()
}

/// Random bytes; roughly a quarter of non-trivial payloads contain every
/// byte value.
pub fn random_payload<R: Rng>(rng: &mut R, max: usize) -> Vec<u8> {
    let len = match rng.gen_range(0..10) {
        0 => 0,
        1..=5 => rng.gen_range(0..=max.min(512)),
        _ => rng.gen_range(0..=max),
    };
    let mut data = vec![0u8; len];
    rng.fill(&mut data[..]);
    if len >= 256 && rng.gen_bool(0.25) {
        for (i, b) in data.iter_mut().take(256).enumerate() {
            *b = i as u8;
        }
        data.shuffle(rng);
    }
    data
}

fn extra_tags<R: Rng>(rng: &mut R, prefix: &str) -> Vec<(String, String)> {
    (0..rng.gen_range(0..3))
        .map(|i| (format!("{prefix}{i}"), text(rng)))
        .collect()
}

pub fn random_archive<R: Rng>(rng: &mut R, cfg: GenConfig) -> Generated {
    let mut header = WrapperHeader::new(random_date(rng));
    if rng.gen_bool(0.3) {
        header.version = format!("{}.{}", rng.gen_range(1..4), rng.gen_range(0..10));
    }
    header.extra_tags = extra_tags(rng, "futurekey");
    let mut archive = Archive::new(header);
    let mut payloads = Vec::new();
    let mut used = HashSet::new();
    let count = rng.gen_range(0..=cfg.max_entities);
    while archive.entities.len() < count {
        let depth = rng.gen_range(0..=3);
        let dir = (0..depth).map(|_| name(rng)).collect::<Vec<_>>().join("/");
        let long = name(rng);
        let path = if dir.is_empty() {
            long.clone()
        } else {
            format!("{dir}/{long}")
        };
        if !used.insert(path.clone()) {
            continue;
        }
        let remote = rng.gen_bool(cfg.remote_ratio);
        let (mut e, payload) = if remote {
            let scheme = if rng.gen_bool(0.5) { "http" } else { "https" };
            let url = format!(
                "{scheme}://origin{}.example/files/{}",
                rng.gen_range(0..9),
                rng.gen::<u32>()
            );
            (
                EntityRecord::remote(&dir, &long, rng.gen_range(0..100_000), &url),
                Vec::new(),
            )
        } else {
            let data = random_payload(rng, cfg.max_payload);
            let enc = if rng.gen_bool(0.5) {
                Encoding::Raw
            } else {
                Encoding::Uuencode
            };
            (
                EntityRecord::embedded(&dir, &long, data.len() as u64, enc),
                data,
            )
        };
        if rng.gen_bool(0.6) {
            e.original_name = Some(format!("C:\\src\\{}", path.replace('/', "\\")));
        }
        if rng.gen_bool(0.5) {
            e.short_name = Some(long.chars().take(8).collect::<String>().trim().to_string())
                .filter(|s| !s.is_empty());
        }
        if rng.gen_bool(0.7) {
            e.created = Some(random_timestamp(rng));
        }
        if rng.gen_bool(0.5) {
            e.origin = Some("Windows95".into());
        }
        if rng.gen_bool(0.4) {
            e.description = Some(text(rng));
        }
        e.extra_tags = extra_tags(rng, "x-future");
        archive.entities.push(e);
        payloads.push(payload);
    }
    Generated { archive, payloads }
}
