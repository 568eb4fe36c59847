mod common;

use std::fs;
use std::sync::Arc;
use std::time::{Duration, Instant};

use pfs_core::parse_wrapper;
use pfs_server::{mime_for_path, Request, RouteDecision, Server, ServerConfig, NOT_FOUND_BODY};
use pfs_testkit::client::{get, request};
use pfs_testkit::fixtures::{accounts_tree, large_tree, sample_wrapper_with_url, SAMPLE_URL_PATH};
use pfs_testkit::{Reply, StubOrigin};

use common::{pack, start, start_with, RecordingFs};

const SITE: &str = "/~pstanski/account-site.pfs";

/// docroot with the Accounts site packed at `SITE` and unpacked under
/// `/plain`.
fn accounts_docroot() -> tempfile::TempDir {
    let root = tempfile::tempdir().unwrap();
    accounts_tree(&root.path().join("plain")).unwrap();
    fs::create_dir(root.path().join("~pstanski")).unwrap();
    pack(
        &root.path().join("plain"),
        &root.path().join("~pstanski/account-site.pfs"),
        &[],
    );
    root
}

#[test]
fn nested_wrapper_url_serves_entry() {
    let root = accounts_docroot();
    let srv = start(ServerConfig::new(root.path()));
    let r = get(srv.addr(), &format!("{SITE}/index.html")).unwrap();
    assert_eq!(r.status, 200);
    assert_eq!(r.header("Content-Type"), Some("text/html"));
    let want = fs::read(root.path().join("plain/index.html")).unwrap();
    assert_eq!(r.body, want);
    assert_eq!(
        r.header("Content-Length"),
        Some(want.len().to_string().as_str())
    );
    assert_eq!(r.header("Connection"), Some("close"));

    let slash = get(srv.addr(), &format!("{SITE}/")).unwrap();
    assert_eq!((slash.status, slash.body), (200, want));

    let gif = get(srv.addr(), &format!("{SITE}/Images/logo.gif")).unwrap();
    assert_eq!(gif.header("Content-Type"), Some("image/gif"));
    assert_eq!(
        gif.body,
        fs::read(root.path().join("plain/Images/logo.gif")).unwrap()
    );
}

#[test]
fn bare_wrapper_url_downloads_wrapper() {
    let root = accounts_docroot();
    let srv = start(ServerConfig::new(root.path()));
    let r = get(srv.addr(), SITE).unwrap();
    assert_eq!(r.status, 200);
    assert_eq!(r.header("Content-Type"), Some("application/octet-stream"));
    assert_eq!(
        r.body,
        fs::read(root.path().join("~pstanski/account-site.pfs")).unwrap()
    );
}

#[test]
fn missing_things_are_404() {
    let root = accounts_docroot();
    let srv = start(ServerConfig::new(root.path()));
    for target in [
        &format!("{SITE}/nope.html")[..],
        "/missing.pfs/x",
        "/missing.html",
        "/plain",
        "/plain/",
        "/",
        &format!("{SITE}/Images"),
        &format!("{SITE}/images/logo.gif"),
    ] {
        let r = get(srv.addr(), target).unwrap();
        assert_eq!(r.status, 404, "{target}");
        assert_eq!(String::from_utf8_lossy(&r.body), NOT_FOUND_BODY, "{target}");
    }
}

#[test]
fn traversal_is_400() {
    let root = accounts_docroot();
    let srv = start(ServerConfig::new(root.path()));
    for target in [
        "/x.pfs/../../etc/passwd",
        &format!("{SITE}/../../plain/index.html")[..],
        "/%2e%2e/etc/passwd",
        "/plain/%2E%2E/%2E%2E/x",
        "/a%00b",
    ] {
        assert_eq!(get(srv.addr(), target).unwrap().status, 400, "{target}");
    }
}

#[test]
fn real_files_take_precedence() {
    let root = accounts_docroot();
    let dir = root.path().join("real.pfs");
    fs::create_dir(&dir).unwrap();
    fs::write(dir.join("page.html"), "real file").unwrap();
    let srv = start(ServerConfig::new(root.path()));
    let r = get(srv.addr(), "/real.pfs/page.html").unwrap();
    assert_eq!((r.status, r.body.as_slice()), (200, &b"real file"[..]));
    assert_eq!(get(srv.addr(), "/real.pfs").unwrap().status, 404);
    assert_eq!(
        srv.server().route("/plain/index.html"),
        RouteDecision::PlainFile(srv.server().root().join("plain/index.html"))
    );
}

#[test]
fn methods() {
    let root = accounts_docroot();
    let srv = start(ServerConfig::new(root.path()));
    let r = request(srv.addr(), "POST", b"/plain/index.html").unwrap();
    assert_eq!(r.status, 405);
    assert_eq!(r.header("Allow"), Some("GET, HEAD"));
    let bad = request(srv.addr(), "GET", b"no-slash").unwrap();
    assert_eq!(bad.status, 400);
}

#[test]
fn head_matches_get() {
    let root = accounts_docroot();
    let srv = start(ServerConfig::new(root.path()));
    let targets = [
        format!("{SITE}/index.html"),
        format!("{SITE}/"),
        SITE.to_string(),
        format!("{SITE}/Dept2/budget.html"),
        "/plain/Images/banner.gif".into(),
        "/nothing".into(),
        "/../x".into(),
    ];
    for t in &targets {
        let g = get(srv.addr(), t).unwrap();
        let h = request(srv.addr(), "HEAD", t.as_bytes()).unwrap();
        assert_eq!(g.status, h.status, "{t}");
        assert_eq!(g.headers, h.headers, "{t}");
        assert!(h.body.is_empty(), "{t}");
    }
}

#[test]
fn every_entry_matches_read_content() {
    let src = tempfile::tempdir().unwrap();
    let root = tempfile::tempdir().unwrap();
    large_tree(src.path(), 9).unwrap();
    let wrapper = root.path().join("big.pfs");
    pack(src.path(), &wrapper, &[]);
    let bytes = fs::read(&wrapper).unwrap();
    let archive = parse_wrapper(&bytes).unwrap();
    let srv = start(ServerConfig::new(root.path()));
    for e in &archive.entities {
        let target = format!("/big.pfs/{}", encode_path(&e.interior_path()));
        let r = get(srv.addr(), &target).unwrap();
        assert_eq!(r.status, 200, "{target}");
        assert_eq!(r.body, archive.read_content(&bytes, e).unwrap(), "{target}");
        assert_eq!(r.header("Content-Length").unwrap(), e.length.to_string());
        assert_eq!(
            r.header("Content-Type").unwrap(),
            mime_for_path(&e.long_name)
        );
    }
    assert_eq!(srv.server().cache().parse_count(), 1);
}

fn encode_path(p: &str) -> String {
    p.bytes()
        .map(|b| match b {
            b'a'..=b'z' | b'A'..=b'Z' | b'0'..=b'9' | b'/' | b'.' | b'-' | b'_' => {
                (b as char).to_string()
            }
            _ => format!("%{b:02X}"),
        })
        .collect()
}

#[test]
fn wrapper_and_plain_bodies_are_identical() {
    let root = accounts_docroot();
    let srv = start(ServerConfig::new(root.path()));
    for rel in [
        "index.html",
        "Images/logo.gif",
        "Images/banner.gif",
        "Dept1/payroll.html",
    ] {
        let plain = get(srv.addr(), &format!("/plain/{rel}")).unwrap();
        let packed = get(srv.addr(), &format!("{SITE}/{rel}")).unwrap();
        assert_eq!(plain.status, 200);
        assert_eq!(plain.body, packed.body, "{rel}");
        assert_eq!(plain.header("Content-Type"), packed.header("Content-Type"));
    }
}

fn handle_ok(server: &Server, target: &str) -> u16 {
    server.handle(&Request::get(target)).status
}

#[test]
fn cache_parses_once_and_notices_changes() {
    let root = accounts_docroot();
    let server = Server::new(ServerConfig::new(root.path())).unwrap();
    let page = format!("{SITE}/index.html");
    assert_eq!(handle_ok(&server, &page), 200);
    assert_eq!(handle_ok(&server, &page), 200);
    assert_eq!(server.cache().parse_count(), 1);

    let wrapper = root.path().join("~pstanski/account-site.pfs");
    let f = fs::File::options().append(true).open(&wrapper).unwrap();
    f.set_modified(std::time::SystemTime::now() + Duration::from_secs(5))
        .unwrap();
    drop(f);
    assert_eq!(handle_ok(&server, &page), 200);
    assert_eq!(server.cache().parse_count(), 2);
}

#[test]
fn cache_capacity_one_evicts() {
    let root = accounts_docroot();
    fs::copy(
        root.path().join("~pstanski/account-site.pfs"),
        root.path().join("second.pfs"),
    )
    .unwrap();
    let mut config = ServerConfig::new(root.path());
    config.archive_cache_capacity = 1;
    let server = Server::new(config).unwrap();
    let a = format!("{SITE}/index.html");
    let b = "/second.pfs/index.html";
    for i in 1..=6u64 {
        let t = if i % 2 == 1 { a.as_str() } else { b };
        assert_eq!(handle_ok(&server, t), 200);
        assert_eq!(server.cache().parse_count(), i);
    }
    assert_eq!(server.cache().len(), 1);
}

#[test]
fn corrupt_wrapper_is_500() {
    let root = tempfile::tempdir().unwrap();
    fs::write(root.path().join("bad.pfs"), b"PFS!\nversion=1.0\n").unwrap();
    let srv = start(ServerConfig::new(root.path()));
    let r = get(srv.addr(), "/bad.pfs/index.html").unwrap();
    assert_eq!(r.status, 500);
    assert!(!String::from_utf8_lossy(&r.body).contains("date"));
    assert_eq!(get(srv.addr(), "/bad.pfs").unwrap().status, 200);
}

fn remote_docroot(url: &str) -> tempfile::TempDir {
    let root = tempfile::tempdir().unwrap();
    fs::write(root.path().join("vendor.pfs"), sample_wrapper_with_url(url)).unwrap();
    root
}

#[test]
fn relays_remote_entity() {
    let body: Vec<u8> = (0..2952u32).map(|i| (i * 13) as u8).collect();
    let origin = StubOrigin::start([(
        SAMPLE_URL_PATH.to_string(),
        Reply::ok("text/x-vendor", body.clone()),
    )]);
    let root = remote_docroot(&origin.url(SAMPLE_URL_PATH));
    let srv = start(ServerConfig::new(root.path()));
    let r = get(srv.addr(), "/vendor.pfs/Vendor.txt").unwrap();
    assert_eq!(r.status, 200);
    assert_eq!(r.body, body);
    assert_eq!(r.header("Content-Type"), Some("text/x-vendor"));
    assert_eq!(origin.requests().len(), 1);
}

#[test]
fn relay_falls_back_to_extension_type() {
    let origin = StubOrigin::start([]);
    origin.set_route(
        SAMPLE_URL_PATH,
        Reply::Body {
            status: 200,
            content_type: None,
            body: b"x".to_vec(),
        },
    );
    let root = remote_docroot(&origin.url(SAMPLE_URL_PATH));
    let srv = start(ServerConfig::new(root.path()));
    let r = get(srv.addr(), "/vendor.pfs/Vendor.txt").unwrap();
    assert_eq!(r.header("Content-Type"), Some("text/plain"));
}

#[test]
fn relay_failures_are_502() {
    let origin = StubOrigin::start([
        (
            "/big".to_string(),
            Reply::ok("application/octet-stream", vec![0u8; 4096]),
        ),
        ("/gone".to_string(), Reply::status(404)),
    ]);
    let cases = [
        ("/gone", 32 << 20, true),
        ("/big", 1024, true),
        (SAMPLE_URL_PATH, 32 << 20, false),
    ];
    for (path, max, relay) in cases {
        let root = remote_docroot(&origin.url(path));
        let mut config = ServerConfig::new(root.path());
        config.max_remote_bytes = max;
        config.remote_relay_enabled = relay;
        let srv = start(config);
        let r = get(srv.addr(), "/vendor.pfs/Vendor.txt").unwrap();
        assert_eq!(r.status, 502, "{path}");
        assert!(r.body.starts_with(b"502 Error: "), "{path}");
    }
}

#[test]
fn stopped_and_stalling_origins() {
    let origin = StubOrigin::start([(SAMPLE_URL_PATH.to_string(), Reply::Stall)]);
    let root = remote_docroot(&origin.url(SAMPLE_URL_PATH));
    let mut config = ServerConfig::new(root.path());
    config.remote_timeout = Duration::from_millis(600);
    let srv = start(config);
    let t = Instant::now();
    let r = get(srv.addr(), "/vendor.pfs/Vendor.txt").unwrap();
    assert_eq!(r.status, 502);
    assert!(
        t.elapsed() < Duration::from_millis(1600),
        "{:?}",
        t.elapsed()
    );
    origin.stop();
    assert_eq!(
        get(srv.addr(), "/vendor.pfs/Vendor.txt").unwrap().status,
        502
    );
}

#[test]
fn nothing_outside_docroot_is_touched() {
    let outer = tempfile::tempdir().unwrap();
    let root = outer.path().join("docroot");
    accounts_tree(&root.join("plain")).unwrap();
    pack(&root.join("plain"), &root.join("site.pfs"), &[]);
    fs::write(outer.path().join("secret.txt"), "secret").unwrap();
    #[cfg(unix)]
    std::os::unix::fs::symlink(outer.path().join("secret.txt"), root.join("link.txt")).unwrap();

    let fs_hook = Arc::new(RecordingFs::default());
    let srv = start_with(ServerConfig::new(&root), fs_hook.clone());
    for t in [
        "/link.txt",
        "/../secret.txt",
        "/site.pfs/../../secret.txt",
        "/%2e%2e/secret.txt",
    ] {
        let r = get(srv.addr(), t).unwrap();
        assert!(r.status == 400 || r.status == 404, "{t}: {}", r.status);
    }
    let canon = fs::canonicalize(&root).unwrap();
    assert!(fs_hook.opened().iter().all(|p| p.starts_with(&canon)));
    assert_eq!(fs_hook.escapes(&canon), vec![]);
}

#[test]
fn config_validation() {
    let d = tempfile::tempdir().unwrap();
    let mut c = ServerConfig::new(d.path());
    assert!(c.validate().is_ok());
    c.port = 0;
    assert!(c.validate().is_err());
    c.port = 80;
    c.remote_timeout = Duration::ZERO;
    assert!(c.validate().is_err());
    assert!(Server::new(ServerConfig::new(d.path().join("missing"))).is_err());
    let mut c = ServerConfig::new(d.path());
    c.index_name = "../x".into();
    assert!(c.validate().is_err());
}

#[test]
fn custom_index_name() {
    let root = accounts_docroot();
    let mut config = ServerConfig::new(root.path());
    config.index_name = "payroll.html".into();
    let server = Server::new(config).unwrap();
    let r = server.handle(&Request::get(&format!("{SITE}/Dept1/")));
    assert_eq!(r.status, 200);
    assert_eq!(
        r.body.into_bytes().unwrap(),
        fs::read(root.path().join("plain/Dept1/payroll.html")).unwrap()
    );
}
