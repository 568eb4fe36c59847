use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use pfs_core::{parse_wrapper, serialize_wrapper, validate, EntityRecord, Exec};
use pfs_testkit::fixtures::SAMPLE_WRAPPER;
use pfs_testkit::gen::{random_archive, GenConfig};
use pfs_tool::{cmd_edit, cmd_verify, EditAction};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn canonical(seed: u64, max_entities: usize) -> Vec<u8> {
    let mut rng = StdRng::seed_from_u64(seed);
    let g = random_archive(
        &mut rng,
        GenConfig {
            max_entities,
            max_payload: 2048,
            ..GenConfig::default()
        },
    );
    let payloads = |i: usize, _: &EntityRecord| Ok(g.payloads[i].clone());
    serialize_wrapper(&g.archive, &payloads).unwrap().bytes
}

/// Parse, validate, then decode each embedded entity.
fn oracle_has_errors(bytes: &[u8]) -> bool {
    let Ok(a) = parse_wrapper(bytes) else {
        return true;
    };
    if validate(&a).iter().any(|i| i.is_error()) {
        return true;
    }
    a.entities
        .iter()
        .filter(|e| e.is_embedded())
        .any(|e| a.read_content(bytes, e).is_err())
}

fn mutate(rng: &mut StdRng, bytes: &[u8]) -> Vec<u8> {
    let mut b = bytes.to_vec();
    if b.is_empty() {
        return b;
    }
    match rng.gen_range(0..6) {
        0 => {
            let i = rng.gen_range(0..b.len());
            b[i] = rng.gen();
        }
        1 => b.truncate(rng.gen_range(0..b.len())),
        2 => {
            let i = rng.gen_range(0..b.len());
            b.remove(i);
        }
        3 => {
            let i = rng.gen_range(0..=b.len());
            b.insert(i, rng.gen());
        }
        4 => {
            let text = String::from_utf8_lossy(&b).into_owned();
            if let Some(p) = text.find("storedlength=") {
                b.insert(p + "storedlength=".len(), b'1');
            }
        }
        _ => {
            let text = String::from_utf8_lossy(&b).into_owned();
            if let Some(p) = text.find("length=") {
                b.insert(p + "length=".len(), b'9');
            }
        }
    }
    b
}

#[test]
fn verify_agrees_with_oracle_on_mutants() {
    let d = tempfile::tempdir().unwrap();
    let mut rng = StdRng::seed_from_u64(2024);
    let mut flagged = 0;
    for n in 0..100 {
        let base = canonical(n, 6);
        let mutant = mutate(&mut rng, &base);
        let path = d.path().join(format!("m{n}.pfs"));
        fs::write(&path, &mutant).unwrap();
        let outcome = cmd_verify(&path, Exec::default()).unwrap();
        let expected = oracle_has_errors(&mutant);
        assert_eq!(!outcome.ok(), expected, "mutant {n}: {:?}", outcome.issues);
        flagged += expected as usize;
    }
    assert!(flagged > 30, "mutations too gentle: {flagged}");
}

#[test]
fn verify_canonical_and_truncated() {
    let d = tempfile::tempdir().unwrap();
    let good = canonical(11, 10);
    let p = d.path().join("g.pfs");
    fs::write(&p, &good).unwrap();
    assert!(cmd_verify(&p, Exec::Sequential).unwrap().ok());

    let mut one = b"PFS!\nversion=1.0\ndate=01-01-97\n".to_vec();
    one.extend_from_slice(
        b"[ENTITY]\nlongname=a\ndirname=\nlength=10\nstoredlength=10\nmode=RO\nstorage=embedded\n[DATA]\n0123",
    );
    fs::write(&p, &one).unwrap();
    let out = cmd_verify(&p, Exec::Sequential).unwrap();
    assert!(!out.ok());
    assert!(
        out.issues[0].to_string().contains("PayloadOverrun"),
        "{}",
        out.issues[0]
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn add_then_remove_is_identity(seed in any::<u64>(), remote in any::<bool>(), data in prop::collection::vec(any::<u8>(), 0..300)) {
        let d = tempfile::tempdir().unwrap();
        let base = canonical(seed, 8);
        let w = d.path().join("w.pfs");
        fs::write(&w, &base).unwrap();
        let interior = "added/by/test.bin".to_string();
        let action = if remote {
            EditAction::AddRemote { url: "https://h.example/x".into(), interior: interior.clone(), length: 7 }
        } else {
            let f = d.path().join("f");
            fs::write(&f, &data).unwrap();
            EditAction::AddEmbedded { file: f, interior: interior.clone(), encoding: pfs_core::Encoding::Uuencode }
        };
        cmd_edit(&w, &action).unwrap();
        let mid = parse_wrapper(&fs::read(&w).unwrap()).unwrap();
        prop_assert!(mid.lookup_linear(&interior).is_some());
        cmd_edit(&w, &EditAction::Remove { interior }).unwrap();
        let after = fs::read(&w).unwrap();
        prop_assert_eq!(parse_wrapper(&after).unwrap(), parse_wrapper(&base).unwrap());
        prop_assert_eq!(after, base);
    }
}

fn pfsutil(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pfsutil"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cli_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let sample: PathBuf = d.path().join("s.pfs");
    fs::write(&sample, SAMPLE_WRAPPER).unwrap();

    let (code, out, _) = pfsutil(&["list", s(&sample)]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("Vendor.txt\tremote\t2952\t"));

    assert_eq!(pfsutil(&["verify", s(&sample)]).0, 0);
    assert_eq!(pfsutil(&["frobnicate"]).0, 2);
    assert_eq!(pfsutil(&["create", "--root"]).0, 2);
    assert_eq!(pfsutil(&["list"]).0, 2);
    assert_eq!(pfsutil(&["--help"]).0, 0);

    let bad = d.path().join("bad.pfs");
    fs::write(
        &bad,
        "PFS!\nversion=1.0\ndate=01-01-97\n[ENTITY]\nlongname=a\n",
    )
    .unwrap();
    let (code, out, _) = pfsutil(&["verify", s(&bad)]);
    assert_eq!(code, 1);
    assert!(out.starts_with("error: header: "), "{out}");
    let (code, _, err) = pfsutil(&["list", s(&d.path().join("missing.pfs"))]);
    assert_eq!(code, 1);
    assert!(err.starts_with("pfsutil: "), "{err}");
}

#[test]
fn cli_edit_and_extract() {
    let d = tempfile::tempdir().unwrap();
    let w = d.path().join("s.pfs");
    fs::write(&w, SAMPLE_WRAPPER).unwrap();
    let f = d.path().join("page.html");
    fs::write(&f, "<a href=\"http://other.example/\">x</a>\n").unwrap();

    assert_eq!(
        pfsutil(&["add", s(&w), "--from", s(&f), "--as", "site/page.html"]).0,
        0
    );
    assert_eq!(
        pfsutil(&["add", s(&w), "--from", s(&f), "--as", "site/page.html"]).0,
        1
    );
    assert_eq!(
        pfsutil(&[
            "add-remote",
            s(&w),
            "--url",
            "http://h/i.gif",
            "--as",
            "site/i.gif",
            "--length",
            "5"
        ])
        .0,
        0
    );
    let (_, out, _) = pfsutil(&["audit-links", s(&w), "--host", "example.org"]);
    assert_eq!(
        out,
        "site/page.html:1\tforeign-host\thttp://other.example/\n"
    );
    assert_eq!(pfsutil(&["remove", s(&w), "Vendor.txt"]).0, 0);
    assert_eq!(pfsutil(&["remove", s(&w), "Vendor.txt"]).0, 1);

    let dest = d.path().join("x");
    let (code, out, _) = pfsutil(&["extract", s(&w), "--dest", s(&dest)]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(
        fs::read(dest.join("site/page.html")).unwrap(),
        fs::read(&f).unwrap()
    );
    assert_eq!(
        fs::read_to_string(dest.join("PFS-REMOTE.txt")).unwrap(),
        "site/i.gif\thttp://h/i.gif\n"
    );
    assert_eq!(pfsutil(&["extract", s(&w), "--dest", s(&dest)]).0, 1);
    assert_eq!(
        pfsutil(&["extract", s(&w), "--dest", s(&dest), "--overwrite"]).0,
        0
    );

    let tree = d.path().join("tree");
    fs::create_dir(&tree).unwrap();
    fs::write(tree.join("a.txt"), "a").unwrap();
    let out_w = d.path().join("t.pfs");
    let (code, out, _) = pfsutil(&[
        "create",
        "--root",
        s(&tree),
        "--out",
        s(&out_w),
        "--encoding",
        "uuencode",
        "--sequential",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("1 entities (1 embedded, 0 remote)"), "{out}");
    assert_eq!(
        pfsutil(&["create", "--root", s(&tree), "--out", s(&out_w)]).0,
        1
    );
    assert_eq!(
        pfsutil(&[
            "create",
            "--root",
            s(&tree),
            "--out",
            s(&out_w),
            "--remote",
            "nourl"
        ])
        .0,
        1
    );
}
