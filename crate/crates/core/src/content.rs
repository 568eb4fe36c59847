//! Payload encoding and positional reads of embedded content.

use std::fs::File;
use std::io;

use crate::error::{Error, Result};
use crate::model::{Archive, Encoding, EntityRecord, Storage};
use crate::uuencode;

/// Random-access bytes a wrapper can be read from.
///
/// Reads are positional and take `&self`, so one source can serve many
/// concurrent readers without a shared cursor.
pub trait ByteSource {
    fn size(&self) -> io::Result<u64>;
    fn read_exact_at(&self, buf: &mut [u8], offset: u64) -> io::Result<()>;
}

impl ByteSource for [u8] {
    fn size(&self) -> io::Result<u64> {
        Ok(self.len() as u64)
    }

    fn read_exact_at(&self, buf: &mut [u8], offset: u64) -> io::Result<()> {
        let start = usize::try_from(offset).map_err(|_| io::ErrorKind::UnexpectedEof)?;
        let end = start
            .checked_add(buf.len())
            .filter(|&end| end <= self.len())
            .ok_or(io::ErrorKind::UnexpectedEof)?;
        buf.copy_from_slice(&self[start..end]);
        Ok(())
    }
}

impl ByteSource for Vec<u8> {
    fn size(&self) -> io::Result<u64> {
        self.as_slice().size()
    }

    fn read_exact_at(&self, buf: &mut [u8], offset: u64) -> io::Result<()> {
        self.as_slice().read_exact_at(buf, offset)
    }
}

impl ByteSource for File {
    fn size(&self) -> io::Result<u64> {
        Ok(self.metadata()?.len())
    }

    #[cfg(unix)]
    fn read_exact_at(&self, buf: &mut [u8], offset: u64) -> io::Result<()> {
        std::os::unix::fs::FileExt::read_exact_at(self, buf, offset)
    }

    #[cfg(windows)]
    fn read_exact_at(&self, mut buf: &mut [u8], mut offset: u64) -> io::Result<()> {
        use std::os::windows::fs::FileExt;
        while !buf.is_empty() {
            match self.seek_read(buf, offset) {
                Ok(0) => return Err(io::ErrorKind::UnexpectedEof.into()),
                Ok(n) => {
                    buf = &mut buf[n..];
                    offset += n as u64;
                }
                Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }
}

impl<S: ByteSource + ?Sized> ByteSource for &S {
    fn size(&self) -> io::Result<u64> {
        (**self).size()
    }

    fn read_exact_at(&self, buf: &mut [u8], offset: u64) -> io::Result<()> {
        (**self).read_exact_at(buf, offset)
    }
}

pub fn encode_content(data: &[u8], encoding: Encoding) -> Vec<u8> {
    match encoding {
        Encoding::Raw => data.to_vec(),
        Encoding::Uuencode => uuencode::encode(data),
    }
}

pub fn decode_content(data: &[u8], encoding: Encoding, expected_length: u64) -> Result<Vec<u8>> {
    let decoded = match encoding {
        Encoding::Raw => data.to_vec(),
        Encoding::Uuencode => uuencode::decode(data)?,
    };
    if decoded.len() as u64 != expected_length {
        return Err(Error::LengthMismatch {
            expected: expected_length,
            actual: decoded.len() as u64,
        });
    }
    Ok(decoded)
}

impl Archive {
    /// Reads and decodes the content of an embedded entity from `source`,
    /// which must hold the bytes this archive was parsed from.
    pub fn read_content<S: ByteSource + ?Sized>(
        &self,
        source: &S,
        entity: &EntityRecord,
    ) -> Result<Vec<u8>> {
        if entity.storage == Storage::Remote {
            return Err(Error::RemoteEntity);
        }
        let (start, end) = entity
            .payload_region()
            .ok_or_else(|| Error::Decode("embedded entity has no payload region".into()))?;
        if end > self.source_size {
            return Err(Error::Decode(format!(
                "payload region {start}..{end} exceeds wrapper size {}",
                self.source_size
            )));
        }
        let len = usize::try_from(end - start)
            .map_err(|_| Error::Decode("payload region too large".into()))?;
        let mut buf = vec![0u8; len];
        source.read_exact_at(&mut buf, start)?;
        match entity.encoding.unwrap_or_default() {
            Encoding::Raw if buf.len() as u64 == entity.length => Ok(buf),
            encoding => decode_content(&buf, encoding, entity.length),
        }
    }
}
