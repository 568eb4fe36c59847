//! Bit-at-a-time uuencode reference, written without the 3-byte/4-char
//! shifting used by the production codec.

const LINE: usize = 45;

fn sextet_char(v: u32) -> u8 {
    if v == 0 {
        b'`'
    } else {
        (v + 32) as u8
    }
}

fn bits_of(bytes: &[u8]) -> Vec<u8> {
    let mut bits = Vec::with_capacity(bytes.len() * 8);
    for &b in bytes {
        for k in (0..8).rev() {
            bits.push((b >> k) & 1);
        }
    }
    bits
}

pub fn encode(data: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < data.len() {
        let end = (start + LINE).min(data.len());
        let chunk = &data[start..end];
        out.push(sextet_char(chunk.len() as u32));
        let mut bits = bits_of(chunk);
        while bits.len() % 24 != 0 {
            bits.push(0);
        }
        for six in bits.chunks(6) {
            let v = six.iter().fold(0u32, |acc, &b| acc * 2 + b as u32);
            out.push(sextet_char(v));
        }
        out.push(b'\n');
        start = end;
    }
    out.push(b'`');
    out.push(b'\n');
    out
}

/// Decodes the output of [`encode`]; `None` on any structural problem.
pub fn decode(text: &[u8]) -> Option<Vec<u8>> {
    let mut out = Vec::new();
    let lines: Vec<&[u8]> = text.split(|&b| b == b'\n').collect();
    if lines.last() != Some(&&b""[..]) {
        return None;
    }
    for (i, line) in lines[..lines.len() - 1].iter().enumerate() {
        let value = |c: u8| -> Option<u32> {
            match c {
                b'`' | b' ' => Some(0),
                33..=95 => Some(c as u32 - 32),
                _ => None,
            }
        };
        let (&first, rest) = line.split_first()?;
        let n = value(first)? as usize;
        if n == 0 {
            return (i == lines.len() - 2).then_some(out);
        }
        let chars = n.div_ceil(3) * 4;
        if rest.len() < chars {
            return None;
        }
        let mut bits = Vec::new();
        for &c in &rest[..chars] {
            let v = value(c)?;
            for k in (0..6).rev() {
                bits.push(((v >> k) & 1) as u8);
            }
        }
        for byte_bits in bits.chunks(8).take(n) {
            out.push(byte_bits.iter().fold(0u8, |acc, &b| acc * 2 + b));
        }
    }
    None
}
