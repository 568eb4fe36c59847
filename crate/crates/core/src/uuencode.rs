//! Classic uuencode body encoding.
//!
//! Each line carries up to 45 input bytes: a length character followed by
//! four characters per three-byte group. Zero sextets are written as a
//! backtick rather than a space. The body ends with a lone "`" line. There
//! are no `begin`/`end` lines; the entity tags carry the name and mode.

use crate::error::{Error, Result};

pub const LINE_BYTES: usize = 45;

#[inline]
fn enc(v: u8) -> u8 {
    match v & 0x3f {
        0 => b'`',
        v => v + 0x20,
    }
}

#[inline]
fn dec(c: u8) -> Option<u8> {
    match c {
        b'`' | b' ' => Some(0),
        0x21..=0x5f => Some(c - 0x20),
        _ => None,
    }
}

/// Exact size of the encoded form of `len` input bytes.
pub fn encoded_len(len: usize) -> usize {
    let full = len / LINE_BYTES;
    let tail = len % LINE_BYTES;
    let line = |n: usize| 1 + n.div_ceil(3) * 4 + 1;
    full * line(LINE_BYTES) + if tail > 0 { line(tail) } else { 0 } + 2
}

pub fn encode(data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(encoded_len(data.len()));
    for line in data.chunks(LINE_BYTES) {
        out.push(enc(line.len() as u8));
        for group in line.chunks(3) {
            let b0 = group[0];
            let b1 = group.get(1).copied().unwrap_or(0);
            let b2 = group.get(2).copied().unwrap_or(0);
            out.push(enc(b0 >> 2));
            out.push(enc((b0 << 4) | (b1 >> 4)));
            out.push(enc((b1 << 2) | (b2 >> 6)));
            out.push(enc(b2));
        }
        out.push(b'\n');
    }
    out.extend_from_slice(b"`\n");
    out
}

/// Decodes a body produced by [`encode`]. The region must end with the
/// terminator line; nothing may follow it.
pub fn decode(data: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(data.len() / 4 * 3);
    let mut rest = data;
    let mut line_no = 0usize;
    loop {
        line_no += 1;
        if rest.is_empty() {
            return Err(Error::Decode("missing terminator line".into()));
        }
        let (line, next) = match rest.iter().position(|&b| b == b'\n') {
            Some(nl) => (&rest[..nl], &rest[nl + 1..]),
            None => return Err(Error::Decode(format!("line {line_no}: unterminated line"))),
        };
        rest = next;
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        let Some((&len_char, body)) = line.split_first() else {
            return Err(Error::Decode(format!("line {line_no}: empty line")));
        };
        let n = dec(len_char)
            .ok_or_else(|| Error::Decode(format!("line {line_no}: bad length character")))?
            as usize;
        if n == 0 {
            if !rest.is_empty() {
                return Err(Error::Decode("data after terminator line".into()));
            }
            return Ok(out);
        }
        if n > LINE_BYTES {
            return Err(Error::Decode(format!(
                "line {line_no}: length {n} exceeds 45"
            )));
        }
        let needed = n.div_ceil(3) * 4;
        if body.len() < needed {
            return Err(Error::Decode(format!("line {line_no}: truncated line")));
        }
        let mut produced = 0;
        for quad in body[..needed].chunks_exact(4) {
            let mut v = [0u8; 4];
            for (slot, &c) in v.iter_mut().zip(quad) {
                *slot = dec(c)
                    .ok_or_else(|| Error::Decode(format!("line {line_no}: bad character")))?;
            }
            let bytes = [
                (v[0] << 2) | (v[1] >> 4),
                (v[1] << 4) | (v[2] >> 2),
                (v[2] << 6) | v[3],
            ];
            let take = (n - produced).min(3);
            out.extend_from_slice(&bytes[..take]);
            produced += take;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat() {
        assert_eq!(encode(b"Cat"), b"#0V%T\n`\n");
        assert_eq!(decode(b"#0V%T\n`\n").unwrap(), b"Cat");
    }

    #[test]
    fn empty_is_terminator_only() {
        assert_eq!(encode(b""), b"`\n");
        assert_eq!(decode(b"`\n").unwrap(), b"");
    }

    #[test]
    fn space_accepted_for_zero() {
        let enc = encode(&[0, 0, 0]);
        assert_eq!(enc, b"#````\n`\n");
        assert_eq!(decode(b"#    \n \n").unwrap(), [0, 0, 0]);
    }

    #[test]
    fn crlf_lines_accepted() {
        assert_eq!(decode(b"#0V%T\r\n`\r\n").unwrap(), b"Cat");
    }

    #[test]
    fn encoded_len_matches() {
        for n in [0, 1, 2, 3, 44, 45, 46, 89, 90, 91, 1000] {
            assert_eq!(encode(&vec![7u8; n]).len(), encoded_len(n), "n={n}");
        }
    }

    #[test]
    fn errors() {
        assert!(decode(b"").is_err());
        assert!(decode(b"#0V%T\n").is_err(), "no terminator");
        assert!(decode(b"#0V%").is_err(), "truncated");
        assert!(decode(b"#0V\n`\n").is_err(), "short line");
        assert!(decode(b"#0V%T\n`\nxx").is_err(), "trailing bytes");
        assert!(decode(b"#0V~T\n`\n").is_err(), "bad char");
        assert!(decode(b"\n`\n").is_err(), "empty line");
    }
}
