//! On-disk fixture trees and reference wrapper text.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};

/// The sample remote-entity wrapper: header plus one `Vendor.txt` entity,
/// with comments and padding as written by hand.
pub const SAMPLE_WRAPPER: &str = "PFS!
version=1.0
date=25-06-97
[ENTITY]
originalname=C:\\Program Files\\WINZIP\\Vendor.txt
longname=Vendor.txt
shortname=Vendor.txt
dirname=                ;PFS directory (root)
created=14-08-95 6:00:00 AM
length=2952 ;physical file length
origin=Windows95 ;created Win-PFSutil ver1.0
description=This is the Vendors message file
remotereadhost=http://astral.ct.monash.edu.au/~files/vendor.txt
mode=RO ;read-only access
storage=remote ;stored on remotehost
";

pub const SAMPLE_URL_PATH: &str = "/~files/vendor.txt";

/// Sample wrapper with `remotereadhost` pointed at `url`.
pub fn sample_wrapper_with_url(url: &str) -> String {
    SAMPLE_WRAPPER.replace("http://astral.ct.monash.edu.au/~files/vendor.txt", url)
}

fn write(root: &Path, rel: &str, data: &[u8]) -> io::Result<PathBuf> {
    let p = root.join(rel);
    if let Some(parent) = p.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(&p, data)?;
    Ok(p)
}

/// An "Accounts" site: a root page, an Images directory holding two GIFs,
/// and two department subdirectories.
pub fn accounts_tree(root: &Path) -> io::Result<()> {
    write(
        root,
        "index.html",
        b"<html><body><img src=\"Images/logo.gif\"><a href=\"Dept1/payroll.html\">Payroll</a>\n\
          <a href=\"Dept2/budget.html\">Budget</a>\n\
          <img src=\"http://ABC.COM/banner.gif\"></body></html>\n",
    )?;
    write(root, "Images/logo.gif", &gif(1200, 7))?;
    write(root, "Images/banner.gif", &gif(3400, 11))?;
    write(
        root,
        "Dept1/payroll.html",
        b"<html><body>Payroll</body></html>\n",
    )?;
    write(
        root,
        "Dept2/budget.html",
        b"<html><body>Budget</body></html>\n",
    )?;
    Ok(())
}

fn gif(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut data = b"GIF89a".to_vec();
    data.resize(len, 0);
    rng.fill(&mut data[6..]);
    data
}

/// Paths (relative, `/`-separated) and sizes written by [`large_tree`].
pub struct TreeManifest {
    pub files: Vec<(String, usize)>,
}

/// At least 50 files across three directory levels, including an empty file
/// and a 1 MiB binary file.
pub fn large_tree(root: &Path, seed: u64) -> io::Result<TreeManifest> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut files = Vec::new();
    let dirs = [
        "",
        "alpha",
        "beta",
        "alpha/one",
        "alpha/two",
        "beta/three",
        "alpha/one/deep",
        "beta/three/deeper",
    ];
    for i in 0..56 {
        let dir = dirs[i % dirs.len()];
        let ext = ["html", "gif", "txt", "bin", "css", "htm", "js"][i % 7];
        let rel = if dir.is_empty() {
            format!("file{i:02}.{ext}")
        } else {
            format!("{dir}/file{i:02}.{ext}")
        };
        let len = rng.gen_range(0..20_000);
        let mut data = vec![0u8; len];
        rng.fill(&mut data[..]);
        write(root, &rel, &data)?;
        files.push((rel, len));
    }
    write(root, "alpha/empty.txt", b"")?;
    files.push(("alpha/empty.txt".into(), 0));
    let mut big = vec![0u8; 1 << 20];
    rng.fill(&mut big[..]);
    write(root, "beta/three/deeper/big.bin", &big)?;
    files.push(("beta/three/deeper/big.bin".into(), 1 << 20));
    write(root, ".hidden", b"dot file\n")?;
    files.push((".hidden".into(), 9));
    Ok(TreeManifest { files })
}

/// Sizes of the three-file test page; they total 26,180 bytes.
pub const PAGE_SIZES: [(&str, usize); 3] = [
    ("index.html", 4_180),
    ("photo.gif", 12_000),
    ("chart.gif", 10_000),
];

/// Writes the three-file test page into `root`.
pub fn timing_page(root: &Path) -> io::Result<()> {
    let mut html = b"<html><head><title>Diet</title></head><body>\n\
        <img src=\"photo.gif\"><img src=\"chart.gif\">\n"
        .to_vec();
    let (_, html_len) = PAGE_SIZES[0];
    while html.len() < html_len - 15 {
        html.extend_from_slice(b"<p>Eat well.</p>\n");
    }
    html.truncate(html_len - 15);
    html.extend_from_slice(b"</body></html>\n");
    assert_eq!(html.len(), html_len);
    write(root, PAGE_SIZES[0].0, &html)?;
    for (i, (name, len)) in PAGE_SIZES.iter().enumerate().skip(1) {
        write(root, name, &gif(*len, 100 + i as u64))?;
    }
    Ok(())
}

/// Recursively compares two directory trees by relative path and content.
/// Returns the first difference found.
pub fn diff_trees(a: &Path, b: &Path) -> Option<String> {
    fn collect(root: &Path, dir: &Path, out: &mut Vec<(String, PathBuf)>) -> io::Result<()> {
        for entry in fs::read_dir(dir)? {
            let entry = entry?;
            let path = entry.path();
            if entry.file_type()?.is_dir() {
                collect(root, &path, out)?;
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .replace('\\', "/");
                out.push((rel, path));
            }
        }
        Ok(())
    }
    let mut left = Vec::new();
    let mut right = Vec::new();
    if let Err(e) = collect(a, a, &mut left) {
        return Some(format!("reading {}: {e}", a.display()));
    }
    if let Err(e) = collect(b, b, &mut right) {
        return Some(format!("reading {}: {e}", b.display()));
    }
    left.sort();
    right.sort();
    let names = |v: &[(String, PathBuf)]| v.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>();
    if names(&left) != names(&right) {
        return Some(format!(
            "file sets differ: {:?} vs {:?}",
            names(&left),
            names(&right)
        ));
    }
    for ((rel, pa), (_, pb)) in left.iter().zip(&right) {
        match (fs::read(pa), fs::read(pb)) {
            (Ok(x), Ok(y)) if x == y => {}
            (Ok(_), Ok(_)) => return Some(format!("{rel}: contents differ")),
            (Err(e), _) | (_, Err(e)) => return Some(format!("{rel}: {e}")),
        }
    }
    None
}
