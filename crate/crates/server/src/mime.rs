/// Content type from the file extension, case-insensitively.
pub fn mime_for_path(name: &str) -> &'static str {
    let ext = match name.rsplit_once('.') {
        Some((_, ext)) if !ext.contains('/') => ext.to_ascii_lowercase(),
        _ => return "application/octet-stream",
    };
    match ext.as_str() {
        "html" | "htm" => "text/html",
        "txt" => "text/plain",
        "gif" => "image/gif",
        "jpg" | "jpeg" => "image/jpeg",
        "png" => "image/png",
        "css" => "text/css",
        "js" => "text/javascript",
        _ => "application/octet-stream",
    }
}

#[cfg(test)]
mod tests {
    use super::mime_for_path;

    #[test]
    fn table() {
        for (name, want) in [
            ("index.html", "text/html"),
            ("A.HTM", "text/html"),
            ("Vendor.txt", "text/plain"),
            ("logo.gif", "image/gif"),
            ("p.JPG", "image/jpeg"),
            ("p.jpeg", "image/jpeg"),
            ("p.png", "image/png"),
            ("s.css", "text/css"),
            ("app.js", "text/javascript"),
            ("account-site.pfs", "application/octet-stream"),
            ("file.unknownext", "application/octet-stream"),
            ("noext", "application/octet-stream"),
            ("dir.html/file", "application/octet-stream"),
        ] {
            assert_eq!(mime_for_path(name), want, "{name}");
        }
    }
}
